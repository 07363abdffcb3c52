#pragma once

// Finite-dimensional real Lie algebras given by structure constants, with an
// optional matrix realization.  Provides the Chevalley-Eilenberg complex with
// numerically ranked differentials, algebra-valued leafwise one-forms over a
// linear torus action, the Maurer-Cartan residual, and gauge transforms of
// flat connection forms in the matrix realization.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/cohomeq.hpp"
#include "leafwise/diophantine.hpp"
#include "leafwise/fourier.hpp"

namespace leafwise {

// Lie algebra of dimension n with bracket table
//   [xi_i, xi_j] = sum_k table(i*n + j, k) xi_k.
// Antisymmetry and the Jacobi identity are validated, never assumed.  An
// optional matrix realization rep[i] (all of one square size) lets gauge
// computations work with concrete matrix-valued series.
struct LieAlgebra {
  int n = 0;
  Eigen::MatrixXd table;              // (n*n) x n structure constants
  std::vector<Eigen::MatrixXd> rep;   // empty, or n matrices of equal size

  Eigen::VectorXd bracket(int i, int j) const {
    return table.row(i * n + j).transpose();
  }
  // Bracket of two coefficient vectors, [x, y]^k = sum_ij x_i y_j c_ij^k.
  Eigen::VectorXd bracket_vec(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) const;
  bool has_rep() const { return !rep.empty(); }
  int rep_dim() const { return rep.empty() ? 0 : static_cast<int>(rep[0].rows()); }

  // New basis xi'_k = sum_a s(a, k) xi_a; s must be invertible.
  LieAlgebra change_basis(const Eigen::MatrixXd& s) const;

  static LieAlgebra abelian(int p);
  static LieAlgebra heisenberg();   // [x1,x2] = x3, strictly upper 3x3 realization
  static LieAlgebra ga();           // [x1,x2] = x2, affine 2x2 realization
  static LieAlgebra sl2();          // [h,e] = 2e, [h,f] = -2f, [e,f] = h
};

struct AlgebraValidation {
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  double realization_residual = 0.0;  // zero when no realization is attached
  double tol = 0.0;
  bool ok = false;
};

AlgebraValidation validate(const LieAlgebra& alg, double tol = 1e-12);

// Matrix of d^k : Lambda^k g* -> Lambda^{k+1} g* in the lexicographic
// k-subset basis, so the returned matrix is C(n,k+1) x C(n,k).
Eigen::MatrixXd ce_differential(const LieAlgebra& alg, int k);

// Max-entry norm of d^{k+1} d^k over all degrees; a direct check that the
// validated bracket really yields a complex.
double d_squared_residual(const LieAlgebra& alg);

struct RankInfo {
  int degree = 0;          // rank of d^degree
  int rank = 0;
  double smallest_kept = 0.0;
  double largest_dropped = 0.0;
  double spectral_gap = 0.0;  // smallest_kept / largest_dropped, inf-like if clean
  bool unstable = false;      // a singular value sits near the cut
};

struct CohomologyDims {
  std::vector<int> dims;        // dims[k] = dim H^k, k = 0..n
  std::vector<RankInfo> ranks;  // one entry per differential d^0..d^{n-1}
  double rank_tol = 0.0;
  std::vector<std::string> warnings;
};

CohomologyDims cohomology_dims(const LieAlgebra& alg, double rank_tol = 1e-9);

// Leafwise form with values in the algebra: degree 0 stores n component
// series, degree 1 stores n*p series indexed part(k, i) = value component k
// against generator direction i of the action.
struct AlgebraValuedForm {
  ActionMatrix base;
  LieAlgebra algebra;
  int degree = 0;
  std::vector<FourierSeries> parts;

  AlgebraValuedForm(ActionMatrix base_, LieAlgebra alg_, int degree_);
  FourierSeries& part(int k, int i = 0);
  const FourierSeries& part(int k, int i = 0) const;
  void validate() const;  // throws std::invalid_argument on shape mismatch
};

// Canonical flat connection form of the model action: part(k, i) is the
// constant delta_{ki}.  Its Maurer-Cartan residual vanishes identically in
// the abelian case.
AlgebraValuedForm canonical_form(const ActionMatrix& base,
                                 const LieAlgebra& alg);

// Sup over coefficient magnitudes of
//   X_a omega_b - X_b omega_a + [omega_a, omega_b]
// across generator pairs a < b; zero means the form is flat.
double maurer_cartan_residual(const AlgebraValuedForm& omega);

// Dense matrix of scalar series; entries stored row-major.
struct MatrixSeries {
  int rows = 0;
  int cols = 0;
  std::vector<FourierSeries> entries;

  MatrixSeries() = default;
  MatrixSeries(int rows_, int cols_, int torus_dims);
  FourierSeries& at(int r, int c) { return entries[r * cols + c]; }
  const FourierSeries& at(int r, int c) const { return entries[r * cols + c]; }

  static MatrixSeries identity(int size, int torus_dims);
  static MatrixSeries constant(const Eigen::MatrixXd& m, int torus_dims);
};

struct GaugeOptions {
  // Radius cap for products and for the projected inverse; -1 picks a cap
  // from the input radii.
  int truncation = -1;
  // Grid oversampling factor for the pointwise inverse of b.
  int oversample = 2;
  double tol = 1e-9;
};

struct GaugeReport {
  AlgebraValuedForm omega;       // transformed connection form
  double min_abs_det = 0.0;      // of b over the sampling grid
  double inverse_defect = 0.0;   // sup coeff of b * binv - id
  double offspan_residual = 0.0; // part of b^{-1}(...)b outside the realization span
  double truncation_loss = 0.0;  // accumulated projection loss
  double theta_hom_residual = 0.0;
  bool theta_invertible = false;
};

// Gauge action on connection forms: push the value coordinates through the
// algebra map theta (n x n, identity for a plain gauge move) and conjugate
// by the invertible matrix-valued map b,
//   omega'_i = binv rho(theta omega_i) b + binv X_i b,
// decomposed back into algebra coordinates through the realization rho.
// Requires a matrix realization on omega.algebra.  theta_hom_residual in the
// report measures how far theta is from a bracket homomorphism; flatness is
// preserved exactly when it vanishes.
GaugeReport gauge_transform(const AlgebraValuedForm& omega,
                            const MatrixSeries& b,
                            const Eigen::MatrixXd& theta,
                            const GaugeOptions& opts = {});

}  // namespace leafwise
