#include "leafwise/cohomeq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace leafwise {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;
constexpr int kResidualTableRows = 16;

struct TableAcc {
  std::vector<ModeResidual> rows;
  void offer(const Freq& m, double divisor, double amp) {
    rows.push_back({m, divisor, amp});
    std::push_heap(rows.begin(), rows.end(), less);
    if (rows.size() > kResidualTableRows) {
      std::pop_heap(rows.begin(), rows.end(), less);
      rows.pop_back();
    }
  }
  std::vector<ModeResidual> sorted() && {
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      if (a.amplification != b.amplification)
        return a.amplification > b.amplification;
      return FreqLess{}(a.m, b.m);
    });
    return std::move(rows);
  }
  static bool less(const ModeResidual& a, const ModeResidual& b) {
    if (a.amplification != b.amplification)
      return a.amplification > b.amplification;  // min-heap on amplification
    return FreqLess{}(b.m, a.m);
  }
};

void finish_status(SolveReport& rep, const SolveOptions& opts) {
  rep.amplification =
      rep.decay_in > 0.0 ? rep.decay_out / rep.decay_in : 0.0;
  if (!rep.obstruction_modes.empty()) {
    rep.status = SolveStatus::obstructed;
    std::sort(rep.obstruction_modes.begin(), rep.obstruction_modes.end(),
              FreqLess{});
  } else if (rep.decay_in > 0.0 &&
             rep.decay_out > opts.blowup_factor * rep.decay_in) {
    rep.status = SolveStatus::divergent;
    rep.note += "small-divisor amplification exceeded the blow-up factor; ";
  } else {
    rep.status = SolveStatus::solved;
  }
}
}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::obstructed: return "obstructed";
    case SolveStatus::divergent: return "divergent";
  }
  return "unknown";
}

void LeafwiseOneForm::validate() const {
  if (static_cast<int>(comp.size()) != base.p())
    throw std::invalid_argument(
        "LeafwiseOneForm: one component per generator row required");
  for (const auto& s : comp)
    if (s.dims() != base.N())
      throw std::invalid_argument(
          "LeafwiseOneForm: component dimension does not match the torus");
}

SolveReport solve_flow(const FourierSeries& f, const Eigen::VectorXd& v,
                       const SolveOptions& opts) {
  if (v.size() != f.dims())
    throw std::invalid_argument("solve_flow: direction dimension mismatch");
  if (v.norm() == 0.0)
    throw std::invalid_argument("solve_flow: zero direction");

  Eigen::MatrixXd V(1, v.size());
  V.row(0) = v;
  const ExactCertifier exact(V);
  const double vnorm = v.norm();

  SolveReport rep;
  rep.g = FourierSeries(f.dims(), f.real_flag());
  rep.c = Eigen::VectorXcd::Zero(1);
  rep.c[0] = f.mean();  // exact: the derivative cannot produce mode 0
  rep.decay_in = decay_diagnostic(f, 2);
  rep.min_divisor = std::numeric_limits<double>::infinity();

  TableAcc table;
  double dropped_l1 = 0.0;
  double rounding_l1 = 0.0;
  for (const Freq& m : f.sorted_modes()) {
    if (is_zero(m)) continue;
    const Complex a = f.coeff(m);
    const double mdotv = dot(m, v);
    const double delta = std::abs(mdotv);
    const bool resonant =
        delta < opts.resonance_scale * norm2(m) * vnorm &&
        (!exact.available() || exact.resonant(m));
    if (resonant) {
      if (std::abs(a) > opts.tol) {
        rep.obstruction_modes.push_back(m);
      } else {
        dropped_l1 += std::abs(a);
      }
      continue;
    }
    const double d = kTwoPi * mdotv;
    // a / (i d) = -i a / d, one rounding per component.
    const Complex g{a.imag() / d, -a.real() / d};
    rep.g.set(m, g);
    const double amp = 1.0 / (kTwoPi * delta);
    if (delta < rep.min_divisor) {
      rep.min_divisor = delta;
      rep.min_divisor_mode = m;
    }
    table.offer(m, delta, amp);
    // reconstruction residual of this mode (ulp-level)
    rounding_l1 += std::abs(Complex{-g.imag() * d, g.real() * d} - a);
  }
  rep.decay_out = decay_diagnostic(rep.g, 2);
  rep.residual_sup = dropped_l1 + rounding_l1;
  rep.residual_table = std::move(table).sorted();
  if (!std::isfinite(rep.min_divisor)) rep.min_divisor = 0.0;
  finish_status(rep, opts);
  return rep;
}

ClosednessReport check_closed(const LeafwiseOneForm& omega, double tol) {
  omega.validate();
  const int p = omega.base.p();
  ClosednessReport rep;
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      const FourierSeries dji =
          directional_derivative(omega.comp[j], omega.base.row(i));
      const FourierSeries dij =
          directional_derivative(omega.comp[i], omega.base.row(j));
      const FourierSeries diff = dji - dij;
      for (const auto& [m, c] : diff.coeffs()) {
        const double mag = std::abs(c);
        if (mag > rep.residual) {
          rep.residual = mag;
          rep.worst_i = i;
          rep.worst_j = j;
          rep.worst_mode = m;
        }
      }
    }
  }
  rep.closed = rep.residual <= tol;
  return rep;
}

SolveReport solve_action(const LeafwiseOneForm& omega,
                         const SolveOptions& opts) {
  omega.validate();
  const ClosednessReport cl = check_closed(omega, opts.tol);
  if (!cl.closed)
    throw std::invalid_argument(
        "solve_action: input one-form is not closed (residual " +
        std::to_string(cl.residual) + " at the leafwise pair " +
        std::to_string(cl.worst_i) + "," + std::to_string(cl.worst_j) + ")");

  const int p = omega.base.p();
  const int N = omega.base.N();
  const Eigen::MatrixXd& V = omega.base.rows();
  const ExactCertifier exact(V);
  const double vnorm = omega.base.frobenius();

  bool real = true;
  for (const auto& s : omega.comp) real = real && s.real_flag();

  SolveReport rep;
  rep.g = FourierSeries(N, real);
  rep.c = Eigen::VectorXcd::Zero(p);
  for (int i = 0; i < p; ++i) {
    rep.c[i] = omega.comp[i].mean();
    rep.decay_in = std::max(rep.decay_in, decay_diagnostic(omega.comp[i], 2));
  }
  rep.min_divisor = std::numeric_limits<double>::infinity();

  // Union of supports, deterministic order.
  std::vector<Freq> modes;
  {
    FourierSeries::CoeffMap seen;
    for (const auto& s : omega.comp)
      for (const auto& [m, c] : s.coeffs()) seen[m] = Complex{1.0, 0.0};
    modes.reserve(seen.size());
    for (const auto& [m, c] : seen) modes.push_back(m);
    std::sort(modes.begin(), modes.end(), FreqLess{});
  }

  TableAcc table;
  double dropped_l1 = 0.0;
  double rounding_l1 = 0.0;
  Eigen::VectorXd t(p);
  for (const Freq& m : modes) {
    if (is_zero(m)) continue;
    double delta2 = 0.0;
    for (int i = 0; i < p; ++i) {
      t[i] = dot(m, V.row(i));
      delta2 += t[i] * t[i];
    }
    const double delta = std::sqrt(delta2);
    double worst_coeff = 0.0;
    for (int i = 0; i < p; ++i)
      worst_coeff = std::max(worst_coeff, std::abs(omega.comp[i].coeff(m)));
    const bool resonant =
        delta < opts.resonance_scale * norm2(m) * vnorm &&
        (!exact.available() || exact.resonant(m));
    if (resonant) {
      if (worst_coeff > opts.tol) {
        rep.obstruction_modes.push_back(m);
      } else {
        dropped_l1 += worst_coeff;
      }
      continue;
    }
    int best = 0;
    for (int i = 1; i < p; ++i)
      if (std::abs(t[i]) > std::abs(t[best])) best = i;
    const double d = kTwoPi * t[best];
    const Complex a = omega.comp[best].coeff(m);
    const Complex g{a.imag() / d, -a.real() / d};
    rep.g.set(m, g);
    if (delta < rep.min_divisor) {
      rep.min_divisor = delta;
      rep.min_divisor_mode = m;
    }
    if (worst_coeff > 0.0)
      table.offer(m, delta, std::abs(g) / worst_coeff);
    // Cross-component reconstruction residual: closedness makes the other
    // components consistent up to rounding; accumulate the actual defect.
    for (int i = 0; i < p; ++i) {
      const double di = kTwoPi * t[i];
      rounding_l1 += std::abs(Complex{-g.imag() * di, g.real() * di} -
                              omega.comp[i].coeff(m));
    }
  }
  rep.decay_out = decay_diagnostic(rep.g, 2);
  rep.residual_sup = dropped_l1 + rounding_l1;
  rep.residual_table = std::move(table).sorted();
  if (!std::isfinite(rep.min_divisor)) rep.min_divisor = 0.0;
  finish_status(rep, opts);
  return rep;
}

ObstructionSpace obstruction_space(const ActionMatrix& V, int M,
                                   const ScanOptions& opts) {
  if (M < 1)
    throw std::invalid_argument("obstruction_space: M must be >= 1");
  const ExactCertifier exact(V.rows());
  const double vnorm = V.frobenius();

  ObstructionSpace out;
  out.certified = exact.available();
  if (!exact.available())
    out.note =
        "entries not recognized as exact rationals; resonances are numeric "
        "(delta below 1e-12 * ||m|| * ||V||) and uncertified";

  // Reuse the complete enumeration; the budget guards the box size.
  for (const SmallDivisor& sd : small_divisors(V, M, opts)) {
    const bool res = exact.available()
                         ? exact.resonant(sd.m)
                         : sd.delta <
                               opts.resonance_scale * norm2(sd.m) * vnorm;
    if (res) out.modes.push_back(sd.m);
  }
  std::sort(out.modes.begin(), out.modes.end(), FreqLess{});
  out.pairs = static_cast<std::int64_t>(out.modes.size()) / 2;
  out.dimension = static_cast<std::int64_t>(V.p()) *
                  static_cast<std::int64_t>(out.modes.size());
  return out;
}

EquivalenceReport parameter_equivalence(const ActionMatrix& V1,
                                        const ActionMatrix& V2, double tol) {
  if (V1.p() != V2.p())
    throw std::invalid_argument(
        "parameter_equivalence: actions of different rank are not comparable");
  if (V1.N() != V2.N())
    throw std::invalid_argument(
        "parameter_equivalence: actions on different tori are not comparable");

  const Eigen::MatrixXd& A = V1.rows();
  const Eigen::MatrixXd& B = V2.rows();

  EquivalenceReport rep;
  // Least-squares Theta from Theta * V1 = V2 (transpose to a standard solve).
  rep.theta = A.transpose()
                  .completeOrthogonalDecomposition()
                  .solve(B.transpose())
                  .transpose();
  rep.residual = (rep.theta * A - B).norm() / std::max(1.0, B.norm());

  // Largest principal angle between the row spans.
  const auto thin_basis = [](const Eigen::MatrixXd& M) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M.transpose(), Eigen::ComputeThinU);
    return Eigen::MatrixXd(svd.matrixU().leftCols(M.rows()));
  };
  const Eigen::MatrixXd Q1 = thin_basis(A);
  const Eigen::MatrixXd Q2 = thin_basis(B);
  Eigen::JacobiSVD<Eigen::MatrixXd> angles(Q1.transpose() * Q2);
  const double cos_min =
      std::clamp(angles.singularValues().minCoeff(), -1.0, 1.0);
  rep.span_defect_angle = std::acos(cos_min);

  rep.equivalent = rep.residual <= tol;
  if (rep.equivalent) {
    const double det = rep.theta.determinant();
    rep.theta_invertible = std::abs(det) > tol;
    if (!rep.theta_invertible)
      rep.note += "parameter change is singular; ";
    rep.note += "row spans agree; Theta is the unique parameter change";
  } else {
    rep.note = "row spans differ; largest principal angle reported";
  }
  return rep;
}

RigidityReport infinitesimal_rigidity_report(const ActionMatrix& V, int M,
                                             const ScanOptions& opts) {
  RigidityReport rep;
  rep.p = V.p();
  rep.N = V.N();
  rep.radius = M;
  rep.obstructions = obstruction_space(V, M, opts);
  const std::int64_t normal = rep.N - rep.p;
  rep.constant_dim = static_cast<std::int64_t>(rep.p) * normal;
  rep.obstruction_dim = rep.obstructions.dimension * normal;
  rep.total_dim = rep.constant_dim + rep.obstruction_dim;
  rep.infinitesimally_rigid = rep.total_dim == 0;
  rep.description =
      "dim H^1 with normal-bundle coefficients at truncation " +
      std::to_string(M) + ": (" + std::to_string(rep.p) + " + " +
      std::to_string(rep.obstructions.dimension) + ") * " +
      std::to_string(normal) +
      (rep.infinitesimally_rigid
           ? "; rigid (no normal directions remain)"
           : "; leafwise-constant block persists: not infinitesimally rigid");
  return rep;
}

}  // namespace leafwise
