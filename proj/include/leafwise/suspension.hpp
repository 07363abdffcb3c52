#pragma once

// Cohomology dimension counts for foliations built by suspension: a leaf
// model enters as its cohomology dimensions plus the matrices of the return
// map on each degree, and the suspended dimensions come out of the exact
// sequence relating fixed vectors and coinvariants of the return action.
// Includes the classical pipeline for suspensions of hyperbolic toral
// automorphisms and the iterated-suspension count for linear foliations.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace leafwise {

// dims[k] = dim H^k of the leaf model for k = 0..kmax; maps[k] = matrix of
// the return map on H^k (square, size dims[k]).
struct SuspensionData {
  std::vector<int> dims;
  std::vector<Eigen::MatrixXd> maps;

  int kmax() const { return static_cast<int>(dims.size()) - 1; }
  void validate() const;  // throws std::invalid_argument on shape mismatch
};

struct MvDimension {
  int degree = 0;
  int dim = 0;              // dim H^degree of the suspension
  int fixed_dim = 0;        // nullity of (I - h* on H^degree)
  int coinvariant_dim = 0;  // dims[degree-1] - rank(I - h* on H^{degree-1})
  bool exact_rank = false;  // both ranks computed fraction-free over the integers
};

// Suspension cohomology in one degree from the two neighbouring return-map
// ranks. Integer matrices are ranked exactly (fraction-free elimination with
// overflow fallback to SVD); everything else uses singular values with the
// given relative tolerance.
MvDimension mv_dimension(const SuspensionData& s, int degree,
                         double rank_tol = 1e-9);

// All degrees 0..kmax+1 of the suspension.
std::vector<int> suspension_dims(const SuspensionData& s,
                                 double rank_tol = 1e-9);

// Rank with the same dispatch as mv_dimension; exposed for oracles.
int matrix_rank(const Eigen::MatrixXd& m, double rank_tol = 1e-9,
                bool* exact = nullptr);

struct ToralReport {
  Eigen::Matrix2d a;
  long long trace = 0;
  long long det = 0;
  double lambda = 0.0;          // eigenvalue of largest modulus
  double lambda_inv = 0.0;      // the other eigenvalue (product is det = 1)
  double char_residual = 0.0;   // |lambda^2 - tr lambda + det| / max(1, lambda^2)
  Eigen::Vector2d stable;       // unit eigenvector for lambda_inv
  double eigen_residual = 0.0;  // ||A stable - lambda_inv stable||_inf
  double slope = 0.0;           // stable(1) / stable(0)
  bool slope_quadratic_irrational = false;
  int h1_dim = 0;               // leafwise H^1 of the suspended stable foliation
  std::string note;
};

// Full pipeline for an integer matrix: hyperbolicity check (det 1, |tr| > 2),
// eigendata with residuals, stable slope, and the leafwise H^1 count through
// mv_dimension with leaf data {H^0 = R, H^1 = R} and return maps (1), (1/lambda).
// Throws std::invalid_argument when the matrix is not hyperbolic with det 1.
ToralReport toral_pipeline(const Eigen::Matrix2i& a, double rank_tol = 1e-9);

// Cohomology dimensions of the dimension-p linear foliation obtained by
// suspending p times with identity return maps; returns the p+1 numbers
// dim H^k, k = 0..p (binomial coefficients, but computed by iterating
// mv_dimension, never by a closed formula).
std::vector<int> linear_foliation_dims(int p, double rank_tol = 1e-9);

}  // namespace leafwise
