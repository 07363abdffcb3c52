#pragma once

// Small-divisor diagnostics for linear actions on T^N given by a p x N
// generator matrix V (rows act as constant vector fields X_{v_i}). The
// divisor of a mode m is delta(m) = ||(<m,v_1>, ..., <m,v_p>)||_2; resonances
// are the nonzero integer modes with delta(m) = 0. Euclidean norms are used
// in every divisor/decay formula; the sup norm only delimits scan boxes.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/frequency.hpp"

namespace leafwise {

class ActionMatrix {
 public:
  ActionMatrix() = default;
  // Throws std::invalid_argument("degenerate action: ...") unless the rows
  // are independent (numerical rank p at tolerance 1e-12 relative).
  explicit ActionMatrix(Eigen::MatrixXd rows);

  int p() const { return static_cast<int>(V_.rows()); }
  int N() const { return static_cast<int>(V_.cols()); }
  const Eigen::MatrixXd& rows() const { return V_; }
  Eigen::VectorXd row(int i) const { return V_.row(i); }
  double frobenius() const { return V_.norm(); }

 private:
  Eigen::MatrixXd V_;
};

// ---- exact rational recognition -----------------------------------------

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// Recognizes v as p/q, q <= max_den, when some continued-fraction convergent
// of v re-rounds to exactly v in double precision. Recognition at this bound
// is intentional for user-entered fractions; quadratic irrationals are
// provably out of reach (they would need q beyond ~6e7).
std::optional<Rational> recognize_rational(double v,
                                           std::int64_t max_den = 1000000);

// Exact resonance test for a generator matrix whose entries were all
// recognized as rationals: <m, v_i> == 0 for every row, decided in integer
// arithmetic over the row's common denominator. available() is false when
// recognition (or the safe integer range) failed, in which case callers fall
// back to the numeric flag.
class ExactCertifier {
 public:
  explicit ExactCertifier(const Eigen::MatrixXd& V);
  bool available() const { return ok_; }
  bool resonant(const Freq& m) const;

 private:
  bool ok_ = false;
  std::vector<std::vector<std::int64_t>> w_;
};

// ---- scans ---------------------------------------------------------------

struct ScanOptions {
  // Mode count cap for a scan over 0 < ||m||_inf <= M, i.e. (2M+1)^N - 1
  // must not exceed this. Default per the desk-scale contract; callers with
  // bigger boxes must raise it explicitly.
  std::int64_t mode_budget = 10'000'000;
  int offender_count = 16;
  // Numeric resonance flag: delta(m) < resonance_scale * ||m||_2 * ||V||_F.
  double resonance_scale = 1e-12;
  int threads = 0;  // 0 = max_threads()
};

struct SmallDivisor {
  Freq m;
  double delta = 0.0;
};

// Complete enumeration (no sampling) of all divisors in the box. Materializes
// the full list, hence enforces the budget strictly.
std::vector<SmallDivisor> small_divisors(const ActionMatrix& V, int M,
                                         const ScanOptions& opts = {});

struct ShellMinimizer {
  // Dyadic shell 2^shell <= ||m||_2 < 2^(shell+1). Only shells lying fully
  // inside the scan box are reported; partial boundary shells would bias the
  // type fit toward their far-from-resonant corner modes.
  int shell = 0;
  Freq m;               // argmin of delta within the shell (resonances aside)
  double delta = 0.0;
  double norm = 0.0;    // ||m||_2
};

struct DyadicTau {
  int shell = 0;      // fit over shells 0..shell
  double radius = 0;  // 2^(shell+1), the norm reach of that prefix
  double tau = 0.0;
};

struct DiophantineReport {
  int radius = 0;                       // scan box, inf norm
  double tau_estimate = 0.0;            // LS slope of -log delta* vs log||m*||
  double c_estimate = 0.0;              // min delta(m) * ||m||^tau, scanned m
  Freq c_argmin;
  std::vector<ShellMinimizer> shells;
  std::vector<DyadicTau> tau_by_radius; // growth of tau across dyadic prefixes
  std::vector<SmallDivisor> offenders;  // ascending delta * ||m||^tau
  std::vector<Freq> resonances;         // exact: certified rational input rows
  bool rational_certified = false;
  std::vector<Freq> numeric_resonances; // flagged below the numeric threshold
  bool liouville_like = false;
  std::int64_t modes_scanned = 0;
  std::string note;
};

// Streaming two-pass scan: pass one finds shell minimizers and resonances and
// fits tau (overall and per dyadic prefix); pass two evaluates the type
// constant and the offender table at the fitted tau. Nothing is materialized,
// but the same mode budget applies to the box size.
DiophantineReport estimate_type(const ActionMatrix& V, int M,
                                const ScanOptions& opts = {});

// ---- classical one-dimensional tools ------------------------------------

struct Convergent {
  std::int64_t p = 0;
  std::int64_t q = 1;
  double value = 0.0;  // p/q
  double error = 0.0;  // alpha - p/q
};

// Convergents of alpha, at most max_terms of them; stops early (returning the
// full finite expansion) when the remainder vanishes or the denominators
// leave the exactly-representable integer range.
std::vector<Convergent> continued_fraction(double alpha, int max_terms);

struct LiouvilleResult {
  double value = 0.0;
  std::vector<int> schedule;
  std::vector<int> dropped;  // exponents whose term underflowed to 0.0
};

// sum of 10^-s over the schedule (strictly increasing positive exponents).
// Terms below double-precision range underflow to zero and are reported in
// `dropped`; a nonempty schedule losing every term this way throws.
LiouvilleResult liouville_vector(const std::vector<int>& schedule);

}  // namespace leafwise
