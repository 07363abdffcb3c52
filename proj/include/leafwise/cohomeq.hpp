#pragma once

// Leafwise cohomological equations over linear actions on T^N. The flow
// form: given f and a direction v, find g and a constant c with
// X_v g = f - c. The action form: given a closed leafwise one-form with
// components omega(X_{v_i}), find g and constants c_i with X_{v_i} g =
// omega(X_{v_i}) - c_i simultaneously. Both are diagonal in the Fourier
// basis: each nonresonant mode divides by 2*pi*i*<m,v>, resonant modes are
// obstructions, and the constants are the exact mode-0 coefficients.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/diophantine.hpp"
#include "leafwise/fourier.hpp"
#include "leafwise/frequency.hpp"

namespace leafwise {

struct LeafwiseOneForm {
  ActionMatrix base;                 // p x N generator rows
  std::vector<FourierSeries> comp;   // comp[i] = omega(X_{v_i}), size p

  void validate() const;  // sizes and dims; throws on mismatch
};

enum class SolveStatus { solved, obstructed, divergent };
const char* to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-9;            // residual / obstruction coefficient floor
  double blowup_factor = 1e6;   // divergence: decay_2(g) > factor * decay_2(f)
  double resonance_scale = 1e-12;
};

struct ModeResidual {
  Freq m;
  double divisor = 0.0;        // delta(m)
  double amplification = 0.0;  // |g_m| / |a_m|
};

struct SolveReport {
  SolveStatus status = SolveStatus::solved;
  FourierSeries g;              // mean-zero primitive (partial when obstructed)
  Eigen::VectorXcd c;           // exact mode-0 coefficients, one per generator
  double residual_sup = 0.0;    // l1 bound on |X g + c - data|
  std::vector<Freq> obstruction_modes;  // resonant modes carrying coefficients
  double decay_in = 0.0;        // decay_diagnostic(data, 2)
  double decay_out = 0.0;       // decay_diagnostic(g, 2)
  double amplification = 0.0;   // decay_out / decay_in
  double min_divisor = 0.0;
  Freq min_divisor_mode;
  std::vector<ModeResidual> residual_table;  // worst amplification rows
  std::string note;
};

SolveReport solve_flow(const FourierSeries& f, const Eigen::VectorXd& v,
                       const SolveOptions& opts = {});

struct ClosednessReport {
  bool closed = true;
  double residual = 0.0;  // max coefficient of X_i w_j - X_j w_i over pairs
  int worst_i = -1, worst_j = -1;
  Freq worst_mode;
};

ClosednessReport check_closed(const LeafwiseOneForm& omega, double tol = 1e-9);

// Rejects non-closed input (std::invalid_argument) at the same tolerance.
SolveReport solve_action(const LeafwiseOneForm& omega,
                         const SolveOptions& opts = {});

// ---- truncated first cohomology bookkeeping ------------------------------

struct ObstructionSpace {
  std::vector<Freq> modes;     // resonant modes, 0 < ||m||_inf <= M, sorted
  std::int64_t pairs = 0;      // {m, -m} pairs among them
  std::int64_t dimension = 0;  // real dimension beyond constants: p * #modes
  bool certified = true;       // exact rational certification was available
  std::string note;
};

ObstructionSpace obstruction_space(const ActionMatrix& V, int M,
                                   const ScanOptions& opts = {});

struct EquivalenceReport {
  bool equivalent = false;
  Eigen::MatrixXd theta;          // best Theta with V2 ~ Theta * V1
  double residual = 0.0;          // ||Theta*V1 - V2|| / max(1, ||V2||)
  double span_defect_angle = 0.0; // largest principal angle between row spans
  bool theta_invertible = false;
  std::string note;
};

// Same-rank parameter change: V2 = Theta * V1 for an invertible p x p Theta.
// Ranks must match (different p is non-comparable input, not NotEquivalent).
EquivalenceReport parameter_equivalence(const ActionMatrix& V1,
                                        const ActionMatrix& V2,
                                        double tol = 1e-9);

struct RigidityReport {
  int p = 0, N = 0, radius = 0;
  ObstructionSpace obstructions;
  std::int64_t constant_dim = 0;     // p * (N - p)
  std::int64_t obstruction_dim = 0;  // p * #modes * (N - p)
  std::int64_t total_dim = 0;        // (p + p * #modes) * (N - p)
  bool infinitesimally_rigid = false;
  std::string description;
};

// Dimension count of the truncated first cohomology with coefficients in the
// normal bundle of the orbit foliation of the linear model.
RigidityReport infinitesimal_rigidity_report(const ActionMatrix& V, int M,
                                             const ScanOptions& opts = {});

}  // namespace leafwise
