#include "leafwise/diophantine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "leafwise/parallel.hpp"

namespace leafwise {

namespace {

constexpr double kRankTol = 1e-12;
constexpr int kMaxStoredResonances = 512;

std::int64_t checked_lcm(std::int64_t a, std::int64_t b, bool& ok) {
  const std::int64_t g = std::gcd(a, b);
  const __int128 l = static_cast<__int128>(a / g) * b;
  if (l > 1'000'000'000'000LL) {
    ok = false;
    return 1;
  }
  return static_cast<std::int64_t>(l);
}

bool exact_resonant(const ExactCertifier& ex, const int* m, int N) {
  Freq f(N);
  for (int j = 0; j < N; ++j) f[j] = m[j];
  return ex.resonant(f);
}

inline int shell_of(std::int64_t n2) {
  // 2^s <= ||m|| < 2^{s+1}  <=>  4^s <= n2 < 4^{s+1}
  return (std::bit_width(static_cast<std::uint64_t>(n2)) - 1) >> 1;
}

std::int64_t box_mode_count(int N, int M) {
  __int128 c = 1;
  for (int i = 0; i < N; ++i) {
    c *= (2 * static_cast<__int128>(M) + 1);
    if (c > std::numeric_limits<std::int64_t>::max()) return -1;
  }
  return static_cast<std::int64_t>(c) - 1;
}

// Odometer over the box {m : ||m||_inf <= M, m[0] in [lo,hi]} with prefix
// dot products, visiting every mode except 0. The visitor gets the raw
// coordinates, ||m||_2^2 and delta(m)^2; it must not retain the pointer.
template <class Visitor>
void scan_range(const Eigen::MatrixXd& V, int M, int lo, int hi,
                Visitor&& visit) {
  const int N = static_cast<int>(V.cols());
  const int p = static_cast<int>(V.rows());
  if (lo > hi) return;

  std::vector<int> m(N);
  m[0] = lo;
  for (int a = 1; a < N; ++a) m[a] = -M;
  // prefix[(a+1)*p + i] = sum_{j<=a} m[j] * V(i,j); prefix[0..p) = 0.
  std::vector<double> prefix((N + 1) * p, 0.0);
  std::vector<std::int64_t> sq(N + 1, 0);
  auto recompute_from = [&](int axis) {
    for (int a = axis; a < N; ++a) {
      for (int i = 0; i < p; ++i)
        prefix[(a + 1) * p + i] = prefix[a * p + i] + m[a] * V(i, a);
      sq[a + 1] = sq[a] + static_cast<std::int64_t>(m[a]) * m[a];
    }
  };
  recompute_from(0);

  while (true) {
    const std::int64_t n2 = sq[N];
    if (n2 != 0) {
      double d2 = 0.0;
      const double* tail = prefix.data() + N * p;
      for (int i = 0; i < p; ++i) d2 += tail[i] * tail[i];
      visit(m.data(), n2, d2);
    }
    int a = N - 1;
    for (; a >= 0; --a) {
      const int top = (a == 0) ? hi : M;
      if (m[a] < top) {
        ++m[a];
        recompute_from(a);
        break;
      }
      m[a] = (a == 0) ? lo : -M;
    }
    if (a < 0) break;
  }
}

Freq to_freq(const int* m, int N) {
  Freq f(N);
  for (int j = 0; j < N; ++j) f[j] = m[j];
  return f;
}

struct ShellSlot {
  double delta2 = std::numeric_limits<double>::infinity();
  std::vector<int> m;
};

struct PassOneAcc {
  std::vector<ShellSlot> shells;
  std::vector<Freq> exact_res;
  std::int64_t exact_res_count = 0;
  std::vector<Freq> numeric_res;
  std::int64_t count = 0;
};

struct Offender {
  double key = 0.0;  // delta * ||m||^tau
  Freq m;
  double delta = 0.0;
};

bool offender_less(const Offender& a, const Offender& b) {
  if (a.key != b.key) return a.key < b.key;
  return FreqLess{}(a.m, b.m);
}

// Least-squares slope of y on x.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxx == 0.0 ? std::numeric_limits<double>::quiet_NaN() : sxy / sxx;
}

std::vector<std::pair<int, int>> thread_chunks(int M, int threads) {
  // Contiguous first-coordinate ranges; merged in index order downstream.
  std::vector<std::pair<int, int>> out;
  const std::int64_t span = 2 * static_cast<std::int64_t>(M) + 1;
  const int t = std::max(
      1, static_cast<int>(std::min<std::int64_t>(threads, span)));
  std::int64_t start = -M;
  for (int i = 0; i < t; ++i) {
    std::int64_t len = span / t + (i < span % t ? 1 : 0);
    out.emplace_back(static_cast<int>(start),
                     static_cast<int>(start + len - 1));
    start += len;
  }
  return out;
}

}  // namespace

ActionMatrix::ActionMatrix(Eigen::MatrixXd rows) : V_(std::move(rows)) {
  if (V_.rows() < 1 || V_.cols() < 1)
    throw std::invalid_argument("degenerate action: empty generator matrix");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(V_);
  const auto& sv = svd.singularValues();
  const double tol = kRankTol * std::max(1.0, sv.size() ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  if (rank != V_.rows())
    throw std::invalid_argument(
        "degenerate action: generator rows are not independent (rank " +
        std::to_string(rank) + " < p = " + std::to_string(V_.rows()) + ")");
}

ExactCertifier::ExactCertifier(const Eigen::MatrixXd& V) {
  w_.assign(V.rows(), {});
  for (Eigen::Index i = 0; i < V.rows(); ++i) {
    std::vector<Rational> rats;
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
      auto r = recognize_rational(V(i, j));
      if (!r) return;  // ok_ stays false
      rats.push_back(*r);
    }
    bool ok = true;
    std::int64_t D = 1;
    for (const auto& r : rats) D = checked_lcm(D, r.den, ok);
    if (!ok) return;
    std::vector<std::int64_t> row;
    for (const auto& r : rats) {
      const __int128 w = static_cast<__int128>(r.num) * (D / r.den);
      if (w > 1'000'000'000'000'000LL || w < -1'000'000'000'000'000LL) return;
      row.push_back(static_cast<std::int64_t>(w));
    }
    w_[i] = std::move(row);
  }
  ok_ = true;
}

bool ExactCertifier::resonant(const Freq& m) const {
  if (!ok_) return false;
  for (const auto& row : w_) {
    __int128 s = 0;
    for (std::size_t j = 0; j < row.size(); ++j)
      s += static_cast<__int128>(m[static_cast<Eigen::Index>(j)]) * row[j];
    if (s != 0) return false;
  }
  return true;
}

std::optional<Rational> recognize_rational(double v, std::int64_t max_den) {
  if (!std::isfinite(v)) return std::nullopt;
  if (v == std::floor(v) && std::abs(v) < 9.0e15)
    return Rational{static_cast<std::int64_t>(v), 1};
  // Walk the convergents; any p/q with q <= max_den that re-rounds to v is a
  // best approximation, hence shows up here.
  double x = v;
  std::int64_t p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double fa = std::floor(x);
    if (std::abs(fa) > 9.0e15) break;
    const std::int64_t a = static_cast<std::int64_t>(fa);
    const __int128 pw = static_cast<__int128>(a) * p1 + p2;
    const __int128 qw = static_cast<__int128>(a) * q1 + q2;
    if (qw > max_den || pw > 9.0e15 || pw < -9.0e15) break;
    const std::int64_t p = static_cast<std::int64_t>(pw);
    const std::int64_t q = static_cast<std::int64_t>(qw);
    if (q > 0 && static_cast<double>(p) / static_cast<double>(q) == v)
      return Rational{p, q};
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
    const double frac = x - fa;
    if (frac == 0.0) break;
    x = 1.0 / frac;
    if (!std::isfinite(x)) break;
  }
  return std::nullopt;
}

std::vector<SmallDivisor> small_divisors(const ActionMatrix& V, int M,
                                         const ScanOptions& opts) {
  if (M < 1) throw std::invalid_argument("small_divisors: M must be >= 1");
  const std::int64_t count = box_mode_count(V.N(), M);
  if (count < 0 || count > opts.mode_budget)
    throw std::invalid_argument(
        "small_divisors: box of " +
        (count < 0 ? std::string("overflowing size")
                   : std::to_string(count) + " modes") +
        " exceeds the mode budget " + std::to_string(opts.mode_budget));
  std::vector<SmallDivisor> out;
  out.reserve(static_cast<std::size_t>(count));
  scan_range(V.rows(), M, -M, M, [&](const int* m, std::int64_t, double d2) {
    out.push_back({to_freq(m, V.N()), std::sqrt(d2)});
  });
  return out;
}

DiophantineReport estimate_type(const ActionMatrix& V, int M,
                                const ScanOptions& opts) {
  if (M < 1) throw std::invalid_argument("estimate_type: M must be >= 1");
  const std::int64_t count = box_mode_count(V.N(), M);
  if (count < 0 || count > opts.mode_budget)
    throw std::invalid_argument(
        "estimate_type: box of " +
        (count < 0 ? std::string("overflowing size")
                   : std::to_string(count) + " modes") +
        " exceeds the mode budget " + std::to_string(opts.mode_budget));

  const int N = V.N();
  const ExactCertifier ex(V.rows());
  const double vnorm = V.frobenius();
  // delta < scale * ||m|| * ||V||_F, squared to keep sqrt out of the loop.
  const double numeric_thresh2 =
      opts.resonance_scale * opts.resonance_scale * vnorm * vnorm;

  const int max_shell = shell_of(static_cast<std::int64_t>(N) * M * M) + 1;
  const int threads = opts.threads > 0 ? opts.threads : max_threads();
  const auto chunks = thread_chunks(M, threads);

  // ---- pass one: shell minimizers, resonances ----
  std::vector<PassOneAcc> acc(chunks.size());
  {
    auto work = [&](std::size_t ci) {
      PassOneAcc& a = acc[ci];
      a.shells.assign(max_shell + 1, {});
      scan_range(V.rows(), M, chunks[ci].first, chunks[ci].second,
                 [&](const int* m, std::int64_t n2, double d2) {
                   ++a.count;
                   if (d2 < numeric_thresh2 * static_cast<double>(n2)) {
                     if (ex.available() && exact_resonant(ex, m, N)) {
                       ++a.exact_res_count;
                       if (a.exact_res.size() < kMaxStoredResonances)
                         a.exact_res.push_back(to_freq(m, N));
                       return;
                     }
                     if (!ex.available()) {
                       if (a.numeric_res.size() < kMaxStoredResonances)
                         a.numeric_res.push_back(to_freq(m, N));
                       return;
                     }
                     // certified non-resonant tiny divisor: fall through
                   }
                   ShellSlot& s = a.shells[shell_of(n2)];
                   if (d2 < s.delta2) {
                     s.delta2 = d2;
                     s.m.assign(m, m + N);
                   }
                 });
    };
    std::vector<std::thread> pool;
    for (std::size_t ci = 1; ci < chunks.size(); ++ci)
      pool.emplace_back(work, ci);
    work(0);
    for (auto& t : pool) t.join();
  }

  DiophantineReport rep;
  rep.radius = M;
  rep.rational_certified = ex.available();
  std::int64_t exact_total = 0;
  for (const auto& a : acc) {
    rep.modes_scanned += a.count;
    exact_total += a.exact_res_count;
    for (const auto& m : a.exact_res)
      if (rep.resonances.size() < kMaxStoredResonances)
        rep.resonances.push_back(m);
    for (const auto& m : a.numeric_res)
      if (rep.numeric_resonances.size() < kMaxStoredResonances)
        rep.numeric_resonances.push_back(m);
  }
  std::sort(rep.resonances.begin(), rep.resonances.end(), FreqLess{});
  std::sort(rep.numeric_resonances.begin(), rep.numeric_resonances.end(),
            FreqLess{});
  if (exact_total > static_cast<std::int64_t>(rep.resonances.size()))
    rep.note += "resonance list truncated (" + std::to_string(exact_total) +
                " certified); ";

  std::vector<ShellSlot> shells(max_shell + 1);
  for (const auto& a : acc)
    for (int s = 0; s <= max_shell; ++s) {
      const ShellSlot& c = a.shells[s];
      if (c.delta2 < shells[s].delta2 ||
          (c.delta2 == shells[s].delta2 && !c.m.empty() &&
           (shells[s].m.empty() ||
            std::lexicographical_compare(c.m.begin(), c.m.end(),
                                         shells[s].m.begin(),
                                         shells[s].m.end()))))
        shells[s] = c;
    }

  // A shell is complete inside the box iff every mode with ||m||_2 < 2^(s+1)
  // was scanned; since infinity norms are integers this is 2^(s+1) <= M + 1.
  // Partial boundary shells see only far-from-resonant corner modes and
  // would wreck the slope fit, so they are dropped from the report.
  int complete_shell = -1;
  while (complete_shell + 2 <= 62 &&
         (std::int64_t{1} << (complete_shell + 2)) <=
             static_cast<std::int64_t>(M) + 1)
    ++complete_shell;

  std::vector<double> xs, ys;
  bool dropped_partial = false;
  for (int s = 0; s <= max_shell; ++s) {
    if (shells[s].m.empty()) continue;
    if (s > complete_shell) {
      dropped_partial = true;
      continue;
    }
    ShellMinimizer sm;
    sm.shell = s;
    sm.m = to_freq(shells[s].m.data(), N);
    sm.delta = std::sqrt(shells[s].delta2);
    sm.norm = norm2(sm.m);
    rep.shells.push_back(sm);
    xs.push_back(std::log(sm.norm));
    ys.push_back(-std::log(sm.delta));
  }
  if (dropped_partial)
    rep.note += "partial boundary shells excluded from the type fit; ";

  if (rep.shells.empty())
    throw std::domain_error(
        "estimate_type: all scanned modes are resonant; type fit impossible");

  // tau over each dyadic prefix of shells, then the full-box estimate.
  for (std::size_t k = 2; k <= rep.shells.size(); ++k) {
    std::vector<double> px(xs.begin(), xs.begin() + k);
    std::vector<double> py(ys.begin(), ys.begin() + k);
    const double t = ls_slope(px, py);
    if (std::isnan(t)) continue;
    rep.tau_by_radius.push_back(
        {rep.shells[k - 1].shell,
         std::ldexp(1.0, rep.shells[k - 1].shell + 1), t});
  }
  if (rep.tau_by_radius.empty()) {
    rep.tau_estimate = std::numeric_limits<double>::quiet_NaN();
    rep.note += "too few shells for a type fit; ";
  } else {
    rep.tau_estimate = rep.tau_by_radius.back().tau;
    // Liouville-like: the fit keeps steepening as the box grows.
    double min_prefix = std::numeric_limits<double>::infinity();
    for (const auto& d : rep.tau_by_radius)
      if (d.shell >= 3) min_prefix = std::min(min_prefix, d.tau);
    if (std::isfinite(min_prefix) &&
        rep.tau_estimate - min_prefix > 0.75 && rep.tau_estimate > 1.3)
      rep.liouville_like = true;
  }

  // ---- pass two: type constant and offenders at the fitted tau ----
  const double tau = std::isnan(rep.tau_estimate) ? 1.0 : rep.tau_estimate;
  std::vector<std::vector<Offender>> heaps(chunks.size());
  std::vector<double> cmin(chunks.size(),
                           std::numeric_limits<double>::infinity());
  std::vector<std::vector<int>> cargmin(chunks.size());
  {
    auto work = [&](std::size_t ci) {
      auto& heap = heaps[ci];
      const std::size_t cap = static_cast<std::size_t>(
          std::max(0, opts.offender_count));
      scan_range(V.rows(), M, chunks[ci].first, chunks[ci].second,
                 [&](const int* m, std::int64_t n2, double d2) {
                   if (d2 < numeric_thresh2 * static_cast<double>(n2)) {
                     if (!ex.available() || exact_resonant(ex, m, N)) return;
                   }
                   const double delta = std::sqrt(d2);
                   const double key =
                       delta * std::pow(static_cast<double>(n2), 0.5 * tau);
                   if (key < cmin[ci]) {
                     cmin[ci] = key;
                     cargmin[ci].assign(m, m + N);
                   }
                   if (cap == 0) return;
                   if (heap.size() < cap) {
                     heap.push_back({key, to_freq(m, N), delta});
                     std::push_heap(heap.begin(), heap.end(), offender_less);
                   } else if (key < heap.front().key) {
                     std::pop_heap(heap.begin(), heap.end(), offender_less);
                     heap.back() = {key, to_freq(m, N), delta};
                     std::push_heap(heap.begin(), heap.end(), offender_less);
                   }
                 });
    };
    std::vector<std::thread> pool;
    for (std::size_t ci = 1; ci < chunks.size(); ++ci)
      pool.emplace_back(work, ci);
    work(0);
    for (auto& t : pool) t.join();
  }
  rep.c_estimate = std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < chunks.size(); ++ci) {
    if (cargmin[ci].empty()) continue;
    const Freq cand = to_freq(cargmin[ci].data(), N);
    if (cmin[ci] < rep.c_estimate ||
        (cmin[ci] == rep.c_estimate &&
         (rep.c_argmin.size() == 0 || FreqLess{}(cand, rep.c_argmin)))) {
      rep.c_estimate = cmin[ci];
      rep.c_argmin = cand;
    }
  }
  std::vector<Offender> all;
  for (auto& h : heaps) all.insert(all.end(), h.begin(), h.end());
  std::sort(all.begin(), all.end(), offender_less);
  if (static_cast<int>(all.size()) > opts.offender_count)
    all.resize(opts.offender_count);
  for (auto& o : all) rep.offenders.push_back({o.m, o.delta});

  return rep;
}

std::vector<Convergent> continued_fraction(double alpha, int max_terms) {
  std::vector<Convergent> out;
  if (!std::isfinite(alpha))
    throw std::invalid_argument("continued_fraction: alpha must be finite");
  double x = alpha;
  std::int64_t p2 = 0, p1 = 1, q2 = 1, q1 = 0;
  for (int k = 0; k < max_terms; ++k) {
    const double fa = std::floor(x);
    if (std::abs(fa) > 9.0e15) break;
    const std::int64_t a = static_cast<std::int64_t>(fa);
    const __int128 pw = static_cast<__int128>(a) * p1 + p2;
    const __int128 qw = static_cast<__int128>(a) * q1 + q2;
    if (qw > 4'000'000'000'000'000'000LL || pw > 4'000'000'000'000'000'000LL ||
        pw < -4'000'000'000'000'000'000LL)
      break;
    const std::int64_t p = static_cast<std::int64_t>(pw);
    const std::int64_t q = static_cast<std::int64_t>(qw);
    const double value = static_cast<double>(p) / static_cast<double>(q);
    out.push_back({p, q, value, alpha - value});
    // Once a convergent reproduces the input double exactly, further terms
    // would only expand the rounding noise of the remainder.
    if (out.back().error == 0.0) break;
    p2 = p1;
    p1 = p;
    q2 = q1;
    q1 = q;
    const double frac = x - fa;
    if (frac == 0.0) break;  // exact rational: full finite expansion emitted
    x = 1.0 / frac;
    if (!std::isfinite(x)) break;
  }
  return out;
}

LiouvilleResult liouville_vector(const std::vector<int>& schedule) {
  LiouvilleResult out;
  out.schedule = schedule;
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] <= 0)
      throw std::invalid_argument(
          "liouville_vector: exponents must be positive");
    if (i > 0 && schedule[i] <= schedule[i - 1])
      throw std::invalid_argument(
          "liouville_vector: schedule must be strictly increasing");
  }
  // Smallest terms first so nothing is lost to the running sum before the
  // representable terms arrive.
  double value = 0.0;
  for (auto it = schedule.rbegin(); it != schedule.rend(); ++it) {
    const double term = std::pow(10.0, -static_cast<double>(*it));
    if (term == 0.0) {
      out.dropped.push_back(*it);
      continue;
    }
    value += term;
  }
  if (!schedule.empty() && out.dropped.size() == schedule.size())
    throw std::domain_error(
        "liouville_vector: schedule exceeds double-precision representability "
        "(every term underflowed)");
  out.value = value;
  return out;
}

}  // namespace leafwise
