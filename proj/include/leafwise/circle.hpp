#pragma once

// Analytic circle diffeomorphisms presented through their lifts
// F(x) = x + drift + u(x) with u a real trigonometric polynomial. Rotation
// numbers with rigorous enclosures, compositions and inverses reprojected to
// trigonometric polynomials with measured defects, the simultaneous divisor
// bound for commuting families, the linearized conjugacy equation, and a
// quadratically convergent conjugation iteration toward a target rotation.

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/cohomeq.hpp"
#include "leafwise/diophantine.hpp"
#include "leafwise/fourier.hpp"

namespace leafwise {

struct CircleMap {
  double drift = 0.0;
  FourierSeries periodic;  // 1-D real series; the zero mode is allowed

  CircleMap() : periodic(FourierSeries::zero(1)) {}
  CircleMap(double drift_, FourierSeries periodic_);

  double lift(double x) const;
  int radius() const { return periodic.radius(); }

  static CircleMap rotation(double alpha);
};

struct CircleOptions {
  int truncation = -1;  // output radius cap; -1 picks one from the inputs
  int oversample = 4;   // grid oversampling for reprojection
};

struct OrientationReport {
  double grid_min_derivative = 0.0;
  double margin = 0.0;     // Lipschitz slack of the derivative between nodes
  bool certified = false;  // grid_min_derivative - margin > 0
  bool ok = false;         // grid_min_derivative > 0
};

OrientationReport check_orientation(const CircleMap& f, int grid = 0);

struct RotationNumberResult {
  double estimate = 0.0;    // (F^n(0) - 0) / n
  double halfwidth = 0.0;   // 1/n; the true value lies within this radius
  std::int64_t iterations = 0;
  bool rational_hint = false;  // a convergent fits far better than generic
  Rational nearest{0, 1};
};

RotationNumberResult rotation_number(const CircleMap& f,
                                     std::int64_t n = 1000000);

struct ComposeResult {
  CircleMap map;
  // Sup-norm gap between the reprojected lift and the exact composition,
  // measured on a finer grid.
  double defect = 0.0;
};

ComposeResult compose(const CircleMap& f, const CircleMap& g,
                      const CircleOptions& opts = {});

// Inverse lift by bisection per node, then reprojection. Throws
// std::domain_error when the map is not orientation-preserving on the grid.
ComposeResult inverse(const CircleMap& f, const CircleOptions& opts = {});

struct CommutationReport {
  bool commuting = false;
  double worst = 0.0;  // sup over the grid of |F_i(F_j(x)) - F_j(F_i(x))|
  int worst_i = -1;
  int worst_j = -1;
};

CommutationReport commuting_check(const std::vector<CircleMap>& maps,
                                  double tol = 1e-9, int grid = 4096);

struct MoserDivisor {
  int m = 0;
  double value = 0.0;       // D(m) = max_i 2 |sin(pi m alpha_i)|
  double scaled = 0.0;      // D(m) * m^t
};

struct MoserReport {
  int radius = 0;
  double exponent = 0.0;
  double c_estimate = 0.0;  // min over 0 < m <= radius of D(m) m^t
  int argmin_m = 0;
  bool exact_resonance = false;     // some D(m) is exactly zero
  std::vector<int> resonant_modes;  // the m with D(m) == 0
  std::vector<MoserDivisor> worst;  // smallest scaled divisors, ascending
  double threshold = 0.0;           // required lower bound (0 = report only)
  bool holds = false;               // no exact zero and c_estimate >= threshold
};

// Simultaneous divisor bound for a family of rotation numbers: exact zeros
// are detected through the fractional part being 0.0 in double arithmetic,
// never through a tolerance.
MoserReport check_moser_condition(const Eigen::VectorXd& alphas, int radius,
                                  double exponent, double threshold = 0.0);

struct LinearizedReport {
  SolveStatus status = SolveStatus::solved;
  FourierSeries h;                    // mean-zero solution candidate
  Eigen::VectorXd mean_correction;    // per-map zero-mode mass (drift defect)
  std::vector<int> obstruction_modes;
  double residual_sup = 0.0;          // worst cross-map compatibility defect
  double amplification = 0.0;         // sup |h_m| / |u_m| over solved modes
  double min_divisor = 0.0;
  int min_divisor_mode = 0;
  std::vector<ModeResidual> residual_table;
  std::string note;

  LinearizedReport() : h(FourierSeries::zero(1)) {}
};

// First-order conjugacy equation for a commuting family: find h with
// h(x + alpha_i) - h(x) = u_i(x) for every i, solving each mode against the
// best-conditioned divisor and reporting the compatibility defect against
// the others.
LinearizedReport linearized_conjugacy(const std::vector<FourierSeries>& u,
                                      const Eigen::VectorXd& alphas,
                                      const SolveOptions& opts = {});

struct KamOptions {
  int max_steps = 3;
  int truncation = 32;          // radius cap for h and the conjugated maps
  double tol = 1e-12;           // resonant-mode obstruction threshold
  double target_reduction = 0.1;
  int grid = 0;                 // residual-measurement grid (0 = auto)
};

struct KamStep {
  int step = 0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  double h_sup = 0.0;            // l1 bound for the step conjugacy
  double truncation_loss = 0.0;
};

struct KamReport {
  SolveStatus status = SolveStatus::solved;
  bool converged = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  CircleMap conjugated;          // best conjugated map reached
  std::vector<KamStep> steps;
  std::string note;
};

// Iterated linearize-and-conjugate toward the rigid rotation by alpha.
// Keeps the last improving iterate; stops early on resonant obstructions or
// when the residual stops decreasing.
KamReport kam_iterate(const CircleMap& f, double alpha,
                      const KamOptions& opts = {});

}  // namespace leafwise
