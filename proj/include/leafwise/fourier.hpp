#pragma once

// Truncated Fourier series on the N-torus (coordinates in [0,1)^N, basis
// characters e_m(x) = exp(2*pi*i*<m,x>)). Coefficients are stored sparsely,
// keyed by exact integer frequency vectors; dense grids appear only
// transiently inside the sampling transforms. Values are immutable by
// convention once built: every operation below is pure and returns a fresh
// series, so sharing across threads needs no locks.

#include <complex>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/frequency.hpp"

namespace leafwise {

using Complex = std::complex<double>;

// Coefficients with |value| below this are dropped on serialization, and
// treated as zero when deciding whether a resonant mode obstructs a solve.
inline constexpr double kCoeffWriteEps = 1e-15;

class FourierSeries {
 public:
  using CoeffMap = std::unordered_map<Freq, Complex, FreqHash, FreqEq>;

  FourierSeries() = default;
  explicit FourierSeries(int dims, bool real_flag = true);

  int dims() const { return dims_; }
  bool real_flag() const { return real_; }

  // Max ||m||_inf over stored modes (0 for the zero series).
  int radius() const;

  // l1 norm dropped by any truncating operation that produced this series
  // (accumulated through downstream operations). Rigorous sup-norm bound on
  // the discarded part.
  double truncation_loss() const { return truncation_loss_; }
  void add_truncation_loss(double l) { truncation_loss_ += l; }

  std::size_t size() const { return coeffs_.size(); }
  const CoeffMap& coeffs() const { return coeffs_; }

  // 0 for absent modes; exact integer key lookup.
  Complex coeff(const Freq& m) const;

  // Insert/overwrite one coefficient. Exact zeros are erased, never stored.
  // On a real-flagged series the caller is responsible for the conjugate
  // partner (or use set_pair); the mode-0 coefficient is forced real.
  void set(const Freq& m, Complex value);

  // Write value at m and conj(value) at -m; the way to build real series.
  void set_pair(const Freq& m, Complex value);

  // Mode-0 coefficient (the mean of the function). Exact.
  Complex mean() const;

  double l1_norm() const;  // sum |a_m|, rigorous sup-norm bound

  // Modes in lexicographic order; the deterministic iteration order for
  // serialization and reports.
  std::vector<Freq> sorted_modes() const;

  // True when coeff(-m) == conj(coeff(m)) within tol for every stored mode.
  bool conjugate_symmetric(double tol = 0.0) const;

  // Drop |a_m| <= eps (used by reprojection cleanups); adds the dropped l1
  // mass to truncation_loss.
  void prune(double eps);

  static FourierSeries zero(int dims, bool real_flag = true);
  static FourierSeries constant(int dims, double value);
  // cos(2*pi*<m,x>) and sin(2*pi*<m,x>) as real series.
  static FourierSeries cosine(int dims, const Freq& m, double amplitude = 1.0);
  static FourierSeries sine(int dims, const Freq& m, double amplitude = 1.0);

  // Random real trigonometric polynomial supported in ||m||_inf <= radius
  // with roughly `modes` independent mode pairs, coefficient scale `scale`.
  static FourierSeries random_band_limited(int dims, int radius,
                                           int modes, std::mt19937_64& rng,
                                           double scale = 1.0);

 private:
  int dims_ = 0;
  bool real_ = true;
  double truncation_loss_ = 0.0;
  CoeffMap coeffs_;
  mutable int radius_cache_ = -1;
};

// ---- pointwise / coefficientwise operations (all pure) ----

FourierSeries operator+(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator-(const FourierSeries& a, const FourierSeries& b);
FourierSeries operator*(double s, const FourierSeries& a);
FourierSeries scale(const FourierSeries& a, Complex s);

// Evaluate at a point of [0,1)^N by direct summation over stored modes.
Complex evaluate(const FourierSeries& f, const Eigen::VectorXd& x);
double evaluate_real(const FourierSeries& f, const Eigen::VectorXd& x);

// Derivative along the constant vector field v: multiplies each coefficient
// by 2*pi*i*<m,v>. Mode 0 is annihilated exactly.
FourierSeries directional_derivative(const FourierSeries& f,
                                     const Eigen::VectorXd& v);

// sup over stored m != 0 of ||m||_2^k * |a_m| (0 for series with no nonzero
// mode). Finite truncations always give a finite value; the growth of this
// number across radii is the smoothness diagnostic.
double decay_diagnostic(const FourierSeries& f, int k);

struct MultiplyOptions {
  // Cap on the output radius (inf norm). Negative = no cap (exact support
  // sum). Modes beyond the cap are dropped and their l1 mass recorded in the
  // result's truncation_loss.
  int max_radius = -1;
};

// Pointwise product == coefficient convolution.
FourierSeries multiply(const FourierSeries& a, const FourierSeries& b,
                       const MultiplyOptions& opts = {});

// ---- uniform grid sampling / inversion ----

struct GridSamples {
  int dims = 0;
  std::vector<int> resolution;      // points per axis, >= 1
  Eigen::VectorXcd values;          // C order, last axis fastest
  bool real_flag = true;

  std::int64_t total() const;
  // Flat index -> sample point (j_1/R_1, ..., j_N/R_N).
  Eigen::VectorXd point(std::int64_t flat) const;
};

// Evaluate on the uniform grid via axiswise synthesis (exact up to rounding).
GridSamples sample(const FourierSeries& f, const std::vector<int>& resolution);

// Discrete inverse transform restricted to ||m||_inf <= M. Requires
// resolution >= 2M+1 on every axis (rejects aliased grids). When the input is
// flagged real the result is conjugate-symmetrized, making the flag invariant
// exact.
FourierSeries from_samples(const GridSamples& g, int M);

// max |a_m - b_m| over the union of supports.
double coeff_distance(const FourierSeries& a, const FourierSeries& b);

}  // namespace leafwise
