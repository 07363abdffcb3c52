#include "leafwise/circle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace leafwise {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double eval1(const FourierSeries& f, double x) {
  // Reduce to [0,1) first; the series is periodic and large arguments would
  // otherwise waste precision in the phase.
  const double xr = x - std::floor(x);
  Eigen::VectorXd p(1);
  p(0) = xr;
  return evaluate_real(f, p);
}

// Fractional distance to the nearest integer, exact when m*alpha is integral
// in double arithmetic.
double frac_dist(double prod) {
  return std::abs(prod - std::nearbyint(prod));
}

// e^{2 pi i m alpha} - 1 evaluated through the reduced fractional part, so
// the magnitude stays accurate for large m.
Complex unit_divisor(double m_alpha) {
  const double r = m_alpha - std::nearbyint(m_alpha);
  return Complex{std::cos(kTwoPi * r) - 1.0, std::sin(kTwoPi * r)};
}

std::vector<int> resolution1(int res) { return std::vector<int>{res}; }

int pick_odd_resolution(int cap, int oversample) {
  int res = std::max(1, oversample) * (2 * cap + 1);
  if (res % 2 == 0) ++res;
  return res;
}

double residual_to_rotation(const CircleMap& f, double alpha, int grid) {
  double worst = 0.0;
  for (int j = 0; j < grid; ++j) {
    const double x = static_cast<double>(j) / grid;
    worst = std::max(worst, std::abs(f.lift(x) - x - alpha));
  }
  return worst;
}

}  // namespace

CircleMap::CircleMap(double drift_, FourierSeries periodic_)
    : drift(drift_), periodic(std::move(periodic_)) {
  if (periodic.dims() != 1)
    throw std::invalid_argument("circle maps need a 1-D periodic part");
  if (!periodic.real_flag())
    throw std::invalid_argument("circle maps need a real periodic part");
}

double CircleMap::lift(double x) const { return x + drift + eval1(periodic, x); }

CircleMap CircleMap::rotation(double alpha) {
  return CircleMap(alpha, FourierSeries::zero(1));
}

OrientationReport check_orientation(const CircleMap& f, int grid) {
  OrientationReport out;
  Eigen::VectorXd dir(1);
  dir(0) = 1.0;
  const FourierSeries du = directional_derivative(f.periodic, dir);
  if (grid <= 0) grid = std::max(256, 8 * (2 * f.radius() + 1));

  double min_deriv = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j) {
    const double x = static_cast<double>(j) / grid;
    min_deriv = std::min(min_deriv, 1.0 + eval1(du, x));
  }
  out.grid_min_derivative = min_deriv;

  // |F''| <= 4 pi^2 sum m^2 |a_m| bounds the derivative drift between nodes.
  double second = 0.0;
  for (const auto& [m, c] : f.periodic.coeffs())
    second += kTwoPi * kTwoPi * static_cast<double>(m(0)) * m(0) * std::abs(c);
  out.margin = second / (2.0 * grid);
  out.ok = out.grid_min_derivative > 0.0;
  out.certified = out.grid_min_derivative - out.margin > 0.0;
  return out;
}

RotationNumberResult rotation_number(const CircleMap& f, std::int64_t n) {
  if (n <= 0) throw std::invalid_argument("iteration count must be positive");
  RotationNumberResult out;
  out.iterations = n;

  // Track the fractional position and accumulate displacements with
  // compensated summation; the orbit sum grows linearly and would otherwise
  // eat the enclosure's accuracy.
  double x = 0.0;
  double total = 0.0;
  double comp = 0.0;
  for (std::int64_t k = 0; k < n; ++k) {
    const double step = f.drift + eval1(f.periodic, x);
    const double y = step - comp;
    const double t = total + y;
    comp = (t - total) - y;
    total = t;
    x += step;
    x -= std::floor(x);
  }
  out.estimate = total / static_cast<double>(n);
  out.halfwidth = 1.0 / static_cast<double>(n);

  const auto convergents = continued_fraction(out.estimate, 64);
  bool found = false;
  for (const auto& cv : convergents) {
    if (std::abs(cv.value - out.estimate) <= out.halfwidth) {
      out.nearest = Rational{cv.p, cv.q};
      // Far better rational fit than the generic 1/q^2 scale: flag it.
      out.rational_hint =
          static_cast<double>(cv.q) * static_cast<double>(cv.q) *
              std::abs(cv.value - out.estimate) <
          0.01;
      found = true;
      break;
    }
  }
  if (!found && !convergents.empty()) {
    const auto& best = convergents.back();
    out.nearest = Rational{best.p, best.q};
    out.rational_hint = false;
  }
  return out;
}

ComposeResult compose(const CircleMap& f, const CircleMap& g,
                      const CircleOptions& opts) {
  const int cap = opts.truncation >= 0 ? opts.truncation
                                       : f.radius() + g.radius() + 8;
  const int res = pick_odd_resolution(cap, opts.oversample);

  GridSamples samples;
  samples.dims = 1;
  samples.resolution = resolution1(res);
  samples.values.resize(res);
  samples.real_flag = true;
  for (int j = 0; j < res; ++j) {
    const double x = static_cast<double>(j) / res;
    const double gx = g.lift(x);
    samples.values(j) =
        Complex{eval1(g.periodic, x) + eval1(f.periodic, gx), 0.0};
  }

  ComposeResult out;
  out.map = CircleMap(f.drift + g.drift, from_samples(samples, cap));

  const int check = 2 * res + 1;
  for (int j = 0; j < check; ++j) {
    const double x = static_cast<double>(j) / check;
    out.defect = std::max(out.defect,
                          std::abs(out.map.lift(x) - f.lift(g.lift(x))));
  }
  return out;
}

ComposeResult inverse(const CircleMap& f, const CircleOptions& opts) {
  const OrientationReport orient = check_orientation(f);
  if (!orient.ok)
    throw std::domain_error(
        "inverse requires an orientation-preserving circle map");

  const int cap = opts.truncation >= 0
                      ? opts.truncation
                      : (f.radius() == 0 ? 0 : 2 * f.radius() + 8);
  const int res = pick_odd_resolution(cap, opts.oversample);
  const double pad = f.periodic.l1_norm() + 1e-9;

  GridSamples samples;
  samples.dims = 1;
  samples.resolution = resolution1(res);
  samples.values.resize(res);
  samples.real_flag = true;
  for (int j = 0; j < res; ++j) {
    const double x = static_cast<double>(j) / res;
    double lo = x - f.drift - pad;
    double hi = x - f.drift + pad;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f.lift(mid) < x)
        lo = mid;
      else
        hi = mid;
    }
    const double y = 0.5 * (lo + hi);
    samples.values(j) = Complex{y - x + f.drift, 0.0};
  }

  ComposeResult out;
  out.map = CircleMap(-f.drift, from_samples(samples, cap));

  const int check = 2 * res + 1;
  for (int j = 0; j < check; ++j) {
    const double x = static_cast<double>(j) / check;
    out.defect =
        std::max(out.defect, std::abs(f.lift(out.map.lift(x)) - x));
  }
  return out;
}

CommutationReport commuting_check(const std::vector<CircleMap>& maps,
                                  double tol, int grid) {
  if (maps.size() < 2)
    throw std::invalid_argument("commutation check needs at least two maps");
  if (grid <= 0) throw std::invalid_argument("grid must be positive");
  CommutationReport out;
  for (std::size_t i = 0; i < maps.size(); ++i)
    for (std::size_t j = i + 1; j < maps.size(); ++j) {
      double worst = 0.0;
      for (int t = 0; t < grid; ++t) {
        const double x = static_cast<double>(t) / grid;
        worst = std::max(worst, std::abs(maps[i].lift(maps[j].lift(x)) -
                                         maps[j].lift(maps[i].lift(x))));
      }
      if (worst > out.worst) {
        out.worst = worst;
        out.worst_i = static_cast<int>(i);
        out.worst_j = static_cast<int>(j);
      }
    }
  out.commuting = out.worst <= tol;
  return out;
}

MoserReport check_moser_condition(const Eigen::VectorXd& alphas, int radius,
                                  double exponent, double threshold) {
  if (alphas.size() == 0)
    throw std::invalid_argument("at least one rotation number required");
  if (radius < 1) throw std::invalid_argument("radius must be >= 1");
  MoserReport out;
  out.radius = radius;
  out.exponent = exponent;
  out.threshold = threshold;
  out.c_estimate = std::numeric_limits<double>::infinity();

  std::vector<MoserDivisor> all;
  all.reserve(static_cast<std::size_t>(radius));
  for (int m = 1; m <= radius; ++m) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
      const double r = frac_dist(static_cast<double>(m) * alphas(i));
      // r == 0.0 marks an exact resonance for this map; the sine evaluation
      // never substitutes a rounded tiny value for a true zero.
      const double term = r == 0.0 ? 0.0 : 2.0 * std::sin(M_PI * r);
      d = std::max(d, term);
    }
    const double scaled = d * std::pow(static_cast<double>(m), exponent);
    all.push_back(MoserDivisor{m, d, scaled});
    if (d == 0.0) {
      out.exact_resonance = true;
      out.resonant_modes.push_back(m);
    }
    if (scaled < out.c_estimate) {
      out.c_estimate = scaled;
      out.argmin_m = m;
    }
  }

  std::sort(all.begin(), all.end(), [](const MoserDivisor& a, const MoserDivisor& b) {
    if (a.scaled != b.scaled) return a.scaled < b.scaled;
    return a.m < b.m;
  });
  const std::size_t keep = std::min<std::size_t>(16, all.size());
  out.worst.assign(all.begin(), all.begin() + keep);

  out.holds = !out.exact_resonance &&
              (threshold <= 0.0 || out.c_estimate >= threshold);
  return out;
}

LinearizedReport linearized_conjugacy(const std::vector<FourierSeries>& u,
                                      const Eigen::VectorXd& alphas,
                                      const SolveOptions& opts) {
  if (u.empty()) throw std::invalid_argument("need at least one right-hand side");
  if (static_cast<Eigen::Index>(u.size()) != alphas.size())
    throw std::invalid_argument("one rotation number per right-hand side");
  bool real = true;
  for (const auto& f : u) {
    if (f.dims() != 1)
      throw std::invalid_argument("right-hand sides must be 1-D series");
    real = real && f.real_flag();
  }

  LinearizedReport out;
  out.h = FourierSeries::zero(1, real);
  out.mean_correction = Eigen::VectorXd::Zero(alphas.size());
  out.min_divisor = std::numeric_limits<double>::infinity();

  FourierSeries::CoeffMap mode_union;
  for (const auto& f : u)
    for (const auto& [m, c] : f.coeffs()) mode_union.emplace(m, Complex{});
  std::vector<Freq> modes;
  modes.reserve(mode_union.size());
  for (const auto& [m, c] : mode_union) modes.push_back(m);
  std::sort(modes.begin(), modes.end(), FreqLess{});

  struct Row {
    double amp;
    int m;
    double divisor;
  };
  std::vector<Row> rows;

  for (const Freq& mf : modes) {
    const int m = mf(0);
    if (m == 0) {
      for (std::size_t i = 0; i < u.size(); ++i)
        out.mean_correction(static_cast<Eigen::Index>(i)) =
            u[i].coeff(mf).real();
      continue;
    }
    int best = -1;
    double best_mag = 0.0;
    Complex best_div{0.0, 0.0};
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
      const double prod = static_cast<double>(m) * alphas(i);
      if (frac_dist(prod) == 0.0) continue;
      const Complex div = unit_divisor(prod);
      const double mag = std::abs(div);
      if (mag > best_mag) {
        best_mag = mag;
        best_div = div;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) {
      // Every map is exactly resonant at this mode; nonzero mass obstructs.
      double worst = 0.0;
      for (const auto& f : u) worst = std::max(worst, std::abs(f.coeff(mf)));
      if (worst > opts.tol) out.obstruction_modes.push_back(m);
      continue;
    }
    const Complex a = u[static_cast<std::size_t>(best)].coeff(mf);
    const Complex hm = a / best_div;
    if (hm != Complex{0.0, 0.0}) out.h.set(mf, hm);
    if (best_mag < out.min_divisor) {
      out.min_divisor = best_mag;
      out.min_divisor_mode = m;
    }
    const double amp = std::abs(a) > 0.0 ? std::abs(hm) / std::abs(a) : 0.0;
    out.amplification = std::max(out.amplification, amp);
    rows.push_back(Row{amp, m, best_mag});
    for (Eigen::Index i = 0; i < alphas.size(); ++i) {
      if (i == best) continue;
      const double prod = static_cast<double>(m) * alphas(i);
      const Complex div = frac_dist(prod) == 0.0 ? Complex{0.0, 0.0}
                                                 : unit_divisor(prod);
      out.residual_sup =
          std::max(out.residual_sup,
                   std::abs(hm * div - u[static_cast<std::size_t>(i)].coeff(mf)));
    }
  }

  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.amp != b.amp) return a.amp > b.amp;
    return a.m < b.m;
  });
  const std::size_t keep = std::min<std::size_t>(16, rows.size());
  for (std::size_t i = 0; i < keep; ++i) {
    ModeResidual mr;
    mr.m = make_freq({rows[i].m});
    mr.divisor = rows[i].divisor;
    mr.amplification = rows[i].amp;
    out.residual_table.push_back(mr);
  }

  if (!out.obstruction_modes.empty()) {
    out.status = SolveStatus::obstructed;
    out.note = "exactly resonant modes carry mass above the tolerance";
  } else if (out.amplification > opts.blowup_factor) {
    out.status = SolveStatus::divergent;
    out.note = "mode amplification exceeds the divergence threshold";
  } else {
    out.status = SolveStatus::solved;
  }
  return out;
}

KamReport kam_iterate(const CircleMap& f, double alpha,
                      const KamOptions& opts) {
  if (!std::isfinite(alpha))
    throw std::invalid_argument("target rotation number must be finite");
  if (opts.max_steps < 1)
    throw std::invalid_argument("at least one step required");

  KamReport out;
  out.conjugated = f;
  const int grid = opts.grid > 0
                       ? opts.grid
                       : std::max(2048, 8 * (2 * (f.radius() + opts.truncation) + 1));
  out.initial_residual = residual_to_rotation(f, alpha, grid);
  out.final_residual = out.initial_residual;

  CircleMap g = f;
  double res_before = out.initial_residual;
  CircleOptions copts;
  copts.truncation = opts.truncation;

  for (int step = 1; step <= opts.max_steps; ++step) {
    FourierSeries u = g.periodic + FourierSeries::constant(1, g.drift - alpha);

    FourierSeries h = FourierSeries::zero(1, u.real_flag());
    double dropped = 0.0;
    bool obstructed = false;
    for (const Freq& mf : u.sorted_modes()) {
      const int m = mf(0);
      if (m == 0) continue;  // drift defect stays in the residual
      const double prod = static_cast<double>(m) * alpha;
      if (frac_dist(prod) == 0.0) {
        if (std::abs(u.coeff(mf)) > opts.tol) {
          out.status = SolveStatus::obstructed;
          out.note = "resonant mode " + std::to_string(m) +
                     " obstructs the linearized equation";
          obstructed = true;
          break;
        }
        continue;
      }
      if (std::abs(m) > opts.truncation) {
        dropped += std::abs(u.coeff(mf));
        continue;
      }
      const Complex hm = u.coeff(mf) / unit_divisor(prod);
      if (hm != Complex{0.0, 0.0}) h.set(mf, hm);
    }
    if (obstructed) break;

    // The conjugacy must stay a diffeomorphism; l1 of h' bounds |h'|.
    double dh = 0.0;
    for (const auto& [m, c] : h.coeffs())
      dh += kTwoPi * std::abs(static_cast<double>(m(0))) * std::abs(c);
    if (dh >= 0.9) {
      out.status = SolveStatus::divergent;
      out.note = "conjugacy step too large to stay invertible";
      break;
    }

    const CircleMap hmap(0.0, h);
    const ComposeResult hinv = inverse(hmap, copts);
    const ComposeResult gh = compose(g, hmap, copts);
    const ComposeResult conj = compose(hinv.map, gh.map, copts);
    const double res_after = residual_to_rotation(conj.map, alpha, grid);

    KamStep rec;
    rec.step = step;
    rec.residual_before = res_before;
    rec.residual_after = res_after;
    rec.h_sup = h.l1_norm();
    rec.truncation_loss =
        dropped + hinv.defect + gh.defect + conj.defect;
    out.steps.push_back(rec);

    if (res_after >= res_before) {
      out.note = "residual stopped improving at step " + std::to_string(step);
      break;
    }
    g = conj.map;
    res_before = res_after;
    out.conjugated = g;
    out.final_residual = res_after;
  }

  out.converged =
      out.final_residual <= out.initial_residual * opts.target_reduction;
  if (out.status != SolveStatus::obstructed) {
    out.status = out.converged ? SolveStatus::solved : SolveStatus::divergent;
  }
  return out;
}

}  // namespace leafwise
