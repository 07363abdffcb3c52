#include "leafwise/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace leafwise {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;

void check_dims_match(const FourierSeries& a, const FourierSeries& b) {
  if (a.dims() != b.dims())
    throw std::invalid_argument("FourierSeries dimension mismatch");
}
}  // namespace

FourierSeries::FourierSeries(int dims, bool real_flag)
    : dims_(dims), real_(real_flag) {
  if (dims < 1) throw std::invalid_argument("FourierSeries: dims must be >= 1");
}

int FourierSeries::radius() const {
  if (radius_cache_ >= 0) return radius_cache_;
  int r = 0;
  for (const auto& [m, c] : coeffs_) r = std::max(r, norm_inf(m));
  radius_cache_ = r;
  return r;
}

Complex FourierSeries::coeff(const Freq& m) const {
  auto it = coeffs_.find(m);
  return it == coeffs_.end() ? Complex{0.0, 0.0} : it->second;
}

void FourierSeries::set(const Freq& m, Complex value) {
  if (m.size() != dims_)
    throw std::invalid_argument("FourierSeries::set: frequency dimension mismatch");
  radius_cache_ = -1;
  if (real_ && is_zero(m)) value = Complex{value.real(), 0.0};
  if (value == Complex{0.0, 0.0}) {
    coeffs_.erase(m);
    return;
  }
  coeffs_[m] = value;
}

void FourierSeries::set_pair(const Freq& m, Complex value) {
  set(m, value);
  if (!is_zero(m)) set(Freq(-m), std::conj(value));
}

Complex FourierSeries::mean() const {
  return coeff(Freq::Zero(dims_));
}

double FourierSeries::l1_norm() const {
  double s = 0.0;
  for (const auto& [m, c] : coeffs_) s += std::abs(c);
  return s;
}

std::vector<Freq> FourierSeries::sorted_modes() const {
  std::vector<Freq> out;
  out.reserve(coeffs_.size());
  for (const auto& [m, c] : coeffs_) out.push_back(m);
  std::sort(out.begin(), out.end(), FreqLess{});
  return out;
}

bool FourierSeries::conjugate_symmetric(double tol) const {
  for (const auto& [m, c] : coeffs_) {
    Complex other = coeff(Freq(-m));
    if (std::abs(other - std::conj(c)) > tol) return false;
  }
  return true;
}

void FourierSeries::prune(double eps) {
  radius_cache_ = -1;
  double dropped = 0.0;
  for (auto it = coeffs_.begin(); it != coeffs_.end();) {
    if (std::abs(it->second) <= eps) {
      dropped += std::abs(it->second);
      it = coeffs_.erase(it);
    } else {
      ++it;
    }
  }
  truncation_loss_ += dropped;
}

FourierSeries FourierSeries::zero(int dims, bool real_flag) {
  return FourierSeries(dims, real_flag);
}

FourierSeries FourierSeries::constant(int dims, double value) {
  FourierSeries f(dims, true);
  f.set(Freq::Zero(dims), Complex{value, 0.0});
  return f;
}

FourierSeries FourierSeries::cosine(int dims, const Freq& m, double amplitude) {
  FourierSeries f(dims, true);
  f.set_pair(m, Complex{amplitude / 2.0, 0.0});
  return f;
}

FourierSeries FourierSeries::sine(int dims, const Freq& m, double amplitude) {
  FourierSeries f(dims, true);
  f.set_pair(m, Complex{0.0, -amplitude / 2.0});
  return f;
}

FourierSeries FourierSeries::random_band_limited(int dims, int radius,
                                                 int modes,
                                                 std::mt19937_64& rng,
                                                 double scale) {
  FourierSeries f(dims, true);
  std::uniform_int_distribution<int> coord(-radius, radius);
  std::normal_distribution<double> gauss(0.0, scale);
  int placed = 0, attempts = 0;
  while (placed < modes && attempts < 100 * modes + 100) {
    ++attempts;
    Freq m(dims);
    for (int i = 0; i < dims; ++i) m[i] = coord(rng);
    if (is_zero(m)) continue;
    f.set_pair(m, Complex{gauss(rng), gauss(rng)});
    ++placed;
  }
  return f;
}

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b) {
  check_dims_match(a, b);
  FourierSeries out(a.dims(), a.real_flag() && b.real_flag());
  out.add_truncation_loss(a.truncation_loss() + b.truncation_loss());
  for (const auto& [m, c] : a.coeffs()) out.set(m, c);
  for (const auto& [m, c] : b.coeffs()) out.set(m, out.coeff(m) + c);
  return out;
}

FourierSeries operator-(const FourierSeries& a, const FourierSeries& b) {
  check_dims_match(a, b);
  FourierSeries out(a.dims(), a.real_flag() && b.real_flag());
  out.add_truncation_loss(a.truncation_loss() + b.truncation_loss());
  for (const auto& [m, c] : a.coeffs()) out.set(m, c);
  for (const auto& [m, c] : b.coeffs()) out.set(m, out.coeff(m) - c);
  return out;
}

FourierSeries operator*(double s, const FourierSeries& a) {
  FourierSeries out(a.dims(), a.real_flag());
  out.add_truncation_loss(std::abs(s) * a.truncation_loss());
  for (const auto& [m, c] : a.coeffs()) out.set(m, s * c);
  return out;
}

FourierSeries scale(const FourierSeries& a, Complex s) {
  bool real = a.real_flag() && s.imag() == 0.0;
  FourierSeries out(a.dims(), real);
  out.add_truncation_loss(std::abs(s) * a.truncation_loss());
  for (const auto& [m, c] : a.coeffs()) out.set(m, s * c);
  return out;
}

Complex evaluate(const FourierSeries& f, const Eigen::VectorXd& x) {
  if (x.size() != f.dims())
    throw std::invalid_argument("evaluate: point dimension mismatch");
  Complex s{0.0, 0.0};
  for (const auto& [m, c] : f.coeffs()) {
    double phase = kTwoPi * dot(m, x);
    s += c * Complex{std::cos(phase), std::sin(phase)};
  }
  return s;
}

double evaluate_real(const FourierSeries& f, const Eigen::VectorXd& x) {
  return evaluate(f, x).real();
}

FourierSeries directional_derivative(const FourierSeries& f,
                                     const Eigen::VectorXd& v) {
  if (v.size() != f.dims())
    throw std::invalid_argument("directional_derivative: direction dimension mismatch");
  FourierSeries out(f.dims(), f.real_flag());
  out.add_truncation_loss(f.truncation_loss() * kTwoPi * v.lpNorm<1>() *
                          std::max(1, f.radius()));
  for (const auto& [m, c] : f.coeffs()) {
    if (is_zero(m)) continue;  // 2*pi*i*<0,v> = 0 exactly
    double w = kTwoPi * dot(m, v);
    out.set(m, Complex{0.0, w} * c);
  }
  return out;
}

double decay_diagnostic(const FourierSeries& f, int k) {
  if (k < 0) throw std::invalid_argument("decay_diagnostic: k must be >= 0");
  double best = 0.0;
  for (const auto& [m, c] : f.coeffs()) {
    if (is_zero(m)) continue;
    best = std::max(best, std::pow(norm2(m), k) * std::abs(c));
  }
  return best;
}

FourierSeries multiply(const FourierSeries& a, const FourierSeries& b,
                       const MultiplyOptions& opts) {
  check_dims_match(a, b);
  FourierSeries out(a.dims(), a.real_flag() && b.real_flag());
  // Pre-existing losses amplify by the partner's l1 norm (Young's bound).
  out.add_truncation_loss(a.truncation_loss() * b.l1_norm() +
                          b.truncation_loss() * a.l1_norm() +
                          a.truncation_loss() * b.truncation_loss());

  // Sorted iteration pins the floating-point summation order: reruns of the
  // same inputs accumulate identically.
  const std::vector<Freq> am = a.sorted_modes();
  const std::vector<Freq> bm = b.sorted_modes();
  FourierSeries::CoeffMap acc;
  FourierSeries::CoeffMap cut;
  acc.reserve(am.size() * 2 + 8);
  for (const Freq& ma : am) {
    const Complex ca = a.coeff(ma);
    for (const Freq& mb : bm) {
      Freq m = ma + mb;
      Complex term = ca * b.coeff(mb);
      if (opts.max_radius >= 0 && norm_inf(m) > opts.max_radius) {
        cut[m] += term;  // per-mode accumulation keeps cancellations exact
        continue;
      }
      acc[m] += term;
    }
  }
  double dropped = 0.0;
  {
    std::vector<Freq> cm;
    cm.reserve(cut.size());
    for (const auto& [m, c] : cut) cm.push_back(m);
    std::sort(cm.begin(), cm.end(), FreqLess{});
    for (const Freq& m : cm) dropped += std::abs(cut[m]);
  }
  if (out.real_flag()) {
    // Exact conjugate symmetry: one representative decides each pair.
    for (const auto& [m, c] : acc) {
      if (FreqLess{}(Freq(-m), m)) continue;
      auto it = acc.find(Freq(-m));
      Complex sym = it == acc.end() ? c : 0.5 * (c + std::conj(it->second));
      out.set_pair(m, sym);
    }
  } else {
    for (const auto& [m, c] : acc) out.set(m, c);
  }
  out.add_truncation_loss(dropped);
  return out;
}

std::int64_t GridSamples::total() const {
  std::int64_t t = 1;
  for (int r : resolution) t *= r;
  return t;
}

Eigen::VectorXd GridSamples::point(std::int64_t flat) const {
  Eigen::VectorXd x(dims);
  for (int axis = dims - 1; axis >= 0; --axis) {
    int r = resolution[axis];
    x[axis] = static_cast<double>(flat % r) / r;
    flat /= r;
  }
  return x;
}

namespace {

// Axiswise transform core. `forward` false: synthesis from a dense
// coefficient block of half-width M per axis to grid values. `forward` true:
// analysis from grid values to the coefficient block. Index layout is C
// order, last axis fastest, frequencies stored at offset m+M per axis.
Eigen::VectorXcd axiswise_transform(Eigen::VectorXcd data,
                                    const std::vector<int>& in_extent,
                                    const std::vector<int>& out_extent,
                                    const std::vector<int>& resolution, int M,
                                    bool forward) {
  const int dims = static_cast<int>(in_extent.size());
  std::vector<int> extent = in_extent;
  for (int axis = 0; axis < dims; ++axis) {
    const int in_n = extent[axis];
    const int out_n = out_extent[axis];
    const int R = resolution[axis];
    // Dense transform matrix for this axis.
    Eigen::MatrixXcd T(out_n, in_n);
    for (int r = 0; r < out_n; ++r) {
      for (int c = 0; c < in_n; ++c) {
        double phase;
        if (forward) {
          // out: frequency index r -> m = r - M; in: grid index c.
          phase = -kTwoPi * static_cast<double>(r - M) * c / R;
        } else {
          // out: grid index r; in: frequency index c -> m = c - M.
          phase = kTwoPi * static_cast<double>(c - M) * r / R;
        }
        T(r, c) = Complex{std::cos(phase), std::sin(phase)};
      }
    }
    // Apply along `axis`: view data as (outer, in_n, inner).
    std::int64_t outer = 1, inner = 1;
    for (int i = 0; i < axis; ++i) outer *= extent[i];
    for (int i = axis + 1; i < dims; ++i) inner *= extent[i];
    Eigen::VectorXcd next(outer * out_n * inner);
    for (std::int64_t o = 0; o < outer; ++o) {
      // (in_n x inner) block starting at o*in_n*inner, row stride inner.
      Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                                     Eigen::RowMajor>>
          in_block(data.data() + o * in_n * inner, in_n, inner);
      Eigen::Map<Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic,
                               Eigen::RowMajor>>
          out_block(next.data() + o * out_n * inner, out_n, inner);
      out_block = T * in_block;
    }
    data = std::move(next);
    extent[axis] = out_n;
  }
  return data;
}

}  // namespace

GridSamples sample(const FourierSeries& f, const std::vector<int>& resolution) {
  if (static_cast<int>(resolution.size()) != f.dims())
    throw std::invalid_argument("sample: resolution rank mismatch");
  for (int r : resolution)
    if (r < 1) throw std::invalid_argument("sample: resolution must be >= 1");

  GridSamples g;
  g.dims = f.dims();
  g.resolution = resolution;
  g.real_flag = f.real_flag();

  const int M = f.radius();
  const int side = 2 * M + 1;
  std::int64_t block = 1;
  for (int i = 0; i < f.dims(); ++i) block *= side;
  if (block > (std::int64_t{1} << 28))
    throw std::invalid_argument("sample: coefficient block too large");

  // Scatter sparse coefficients into the dense block.
  Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(block);
  for (const auto& [m, c] : f.coeffs()) {
    std::int64_t flat = 0;
    for (int i = 0; i < f.dims(); ++i) flat = flat * side + (m[i] + M);
    dense[flat] = c;
  }
  std::vector<int> in_extent(f.dims(), side);
  std::vector<int> out_extent(resolution.begin(), resolution.end());
  g.values = axiswise_transform(std::move(dense), in_extent, out_extent,
                                resolution, M, /*forward=*/false);
  if (g.real_flag)
    for (std::int64_t i = 0; i < g.values.size(); ++i)
      g.values[i] = Complex{g.values[i].real(), 0.0};
  return g;
}

FourierSeries from_samples(const GridSamples& g, int M) {
  if (M < 0) throw std::invalid_argument("from_samples: M must be >= 0");
  if (static_cast<int>(g.resolution.size()) != g.dims || g.dims < 1)
    throw std::invalid_argument("from_samples: malformed grid");
  if (g.values.size() != g.total())
    throw std::invalid_argument("from_samples: value count does not match grid");
  for (int r : g.resolution)
    if (r < 2 * M + 1)
      throw std::invalid_argument(
          "from_samples: grid under-resolved for requested truncation "
          "(need resolution >= 2M+1 per axis)");

  const int side = 2 * M + 1;
  std::vector<int> in_extent(g.resolution.begin(), g.resolution.end());
  std::vector<int> out_extent(g.dims, side);
  Eigen::VectorXcd block =
      axiswise_transform(g.values, in_extent, out_extent, g.resolution, M,
                         /*forward=*/true);
  block /= static_cast<double>(g.total());

  FourierSeries f(g.dims, g.real_flag);
  // Unpack; for real inputs symmetrize so that the flag invariant is exact.
  std::int64_t count = block.size();
  for (std::int64_t flat = 0; flat < count; ++flat) {
    Freq m(g.dims);
    std::int64_t rest = flat;
    for (int axis = g.dims - 1; axis >= 0; --axis) {
      m[axis] = static_cast<int>(rest % side) - M;
      rest /= side;
    }
    Complex c = block[flat];
    if (g.real_flag) {
      // One write per conjugate pair, from the lex-smaller representative.
      if (FreqLess{}(Freq(-m), m)) continue;
      std::int64_t conj_flat = 0;
      for (int axis = 0; axis < g.dims; ++axis)
        conj_flat = conj_flat * side + (-m[axis] + M);
      Complex sym = 0.5 * (c + std::conj(block[conj_flat]));
      if (is_zero(m)) sym = Complex{c.real(), 0.0};
      if (sym != Complex{0.0, 0.0}) f.set_pair(m, sym);
    } else {
      if (c != Complex{0.0, 0.0}) f.set(m, c);
    }
  }
  return f;
}

double coeff_distance(const FourierSeries& a, const FourierSeries& b) {
  double worst = 0.0;
  for (const auto& [m, c] : a.coeffs())
    worst = std::max(worst, std::abs(c - b.coeff(m)));
  for (const auto& [m, c] : b.coeffs())
    worst = std::max(worst, std::abs(c - a.coeff(m)));
  return worst;
}

}  // namespace leafwise
