#include "leafwise/suspension.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/SVD>

namespace leafwise {

namespace {

bool is_integral(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v != std::nearbyint(v) || std::abs(v) > 9.0e15)
        return false;
    }
  return true;
}

// Fraction-free Gaussian elimination (Bareiss). Exact over the integers;
// returns -1 when an intermediate value leaves the safe range, in which case
// the caller falls back to singular values.
int bareiss_rank(const Eigen::MatrixXd& m) {
  using I128 = __int128;
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  std::vector<std::vector<I128>> a(rows, std::vector<I128>(cols));
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      a[i][j] = static_cast<I128>(static_cast<long long>(m(i, j)));

  const I128 limit = static_cast<I128>(9) * 1000000000000000000LL;  // 9e18
  I128 prev = 1;
  int rank = 0;
  int row = 0;
  for (int col = 0; col < cols && row < rows; ++col) {
    int pivot = -1;
    for (int i = row; i < rows; ++i)
      if (a[i][col] != 0) {
        pivot = i;
        break;
      }
    if (pivot < 0) continue;
    std::swap(a[row], a[pivot]);
    for (int i = row + 1; i < rows; ++i) {
      for (int j = col + 1; j < cols; ++j) {
        const I128 num = a[i][j] * a[row][col] - a[i][col] * a[row][j];
        const I128 q = num / prev;  // exact division in Bareiss elimination
        if (q > limit || q < -limit) return -1;
        a[i][j] = q;
      }
      a[i][col] = 0;
    }
    prev = a[row][col];
    if (prev > limit || prev < -limit) return -1;
    ++row;
    ++rank;
  }
  return rank;
}

int svd_rank(const Eigen::MatrixXd& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double thr = rank_tol * std::max(1.0, smax);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  return rank;
}

}  // namespace

int matrix_rank(const Eigen::MatrixXd& m, double rank_tol, bool* exact) {
  if (exact != nullptr) *exact = false;
  if (m.size() == 0) return 0;
  if (is_integral(m)) {
    const int r = bareiss_rank(m);
    if (r >= 0) {
      if (exact != nullptr) *exact = true;
      return r;
    }
  }
  return svd_rank(m, rank_tol);
}

void SuspensionData::validate() const {
  if (dims.empty())
    throw std::invalid_argument("suspension data needs at least degree 0");
  if (maps.size() != dims.size())
    throw std::invalid_argument("one return-map matrix per degree required");
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (dims[k] < 0)
      throw std::invalid_argument("negative cohomology dimension");
    if (maps[k].rows() != dims[k] || maps[k].cols() != dims[k])
      throw std::invalid_argument(
          "return-map matrix size does not match the degree dimension");
  }
}

MvDimension mv_dimension(const SuspensionData& s, int degree, double rank_tol) {
  s.validate();
  if (degree < 0 || degree > s.kmax() + 1)
    throw std::invalid_argument("degree out of range for this leaf model");
  MvDimension out;
  out.degree = degree;
  bool exact_hi = true;
  bool exact_lo = true;

  if (degree <= s.kmax() && s.dims[degree] > 0) {
    const Eigen::MatrixXd d =
        Eigen::MatrixXd::Identity(s.dims[degree], s.dims[degree]) -
        s.maps[degree];
    out.fixed_dim = s.dims[degree] - matrix_rank(d, rank_tol, &exact_hi);
  } else {
    out.fixed_dim = 0;
  }

  if (degree >= 1 && degree - 1 <= s.kmax() && s.dims[degree - 1] > 0) {
    const Eigen::MatrixXd d =
        Eigen::MatrixXd::Identity(s.dims[degree - 1], s.dims[degree - 1]) -
        s.maps[degree - 1];
    out.coinvariant_dim =
        s.dims[degree - 1] - matrix_rank(d, rank_tol, &exact_lo);
  } else {
    out.coinvariant_dim = 0;
  }

  out.exact_rank = exact_hi && exact_lo;
  out.dim = out.fixed_dim + out.coinvariant_dim;
  return out;
}

std::vector<int> suspension_dims(const SuspensionData& s, double rank_tol) {
  s.validate();
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(s.kmax()) + 2);
  for (int k = 0; k <= s.kmax() + 1; ++k)
    out.push_back(mv_dimension(s, k, rank_tol).dim);
  return out;
}

ToralReport toral_pipeline(const Eigen::Matrix2i& a, double rank_tol) {
  ToralReport out;
  out.a = a.cast<double>();
  const long long a00 = a(0, 0), a01 = a(0, 1), a10 = a(1, 0), a11 = a(1, 1);
  out.trace = a00 + a11;
  out.det = a00 * a11 - a01 * a10;
  if (out.det != 1)
    throw std::invalid_argument("toral pipeline needs determinant exactly 1");
  if (out.trace <= 2 && out.trace >= -2)
    throw std::invalid_argument("not hyperbolic: |trace| must exceed 2");

  const double tr = static_cast<double>(out.trace);
  const double disc = std::sqrt(tr * tr - 4.0);
  // Root of largest modulus; the sign of the trace decides the branch.
  out.lambda = out.trace > 0 ? (tr + disc) / 2.0 : (tr - disc) / 2.0;
  out.lambda_inv = tr - out.lambda;  // the companion root, |.| < 1
  out.char_residual = std::abs(out.lambda * out.lambda - tr * out.lambda + 1.0) /
                      std::max(1.0, out.lambda * out.lambda);

  // Kernel direction of (A - lambda_inv I), taken from the larger row.
  const Eigen::Vector2d cand1(static_cast<double>(a01),
                              out.lambda_inv - static_cast<double>(a00));
  const Eigen::Vector2d cand2(out.lambda_inv - static_cast<double>(a11),
                              static_cast<double>(a10));
  Eigen::Vector2d v = cand1.norm() >= cand2.norm() ? cand1 : cand2;
  if (v.norm() == 0.0)
    throw std::domain_error("failed to extract a stable eigenvector");
  v.normalize();
  out.stable = v;
  out.eigen_residual =
      (out.a * v - out.lambda_inv * v).cwiseAbs().maxCoeff();
  out.slope = std::abs(v(0)) > 0.0
                  ? v(1) / v(0)
                  : std::numeric_limits<double>::infinity();

  // tr^2 - 4 = k^2 forces (tr-k)(tr+k) = 4, impossible for |tr| > 2; checked
  // anyway so the report never asserts more than the arithmetic shows.
  const long long disc_int = out.trace * out.trace - 4;
  long long root = std::llround(std::sqrt(static_cast<double>(disc_int)));
  root = std::max(root, 0LL);
  while (root > 0 && root * root > disc_int) --root;
  while ((root + 1) * (root + 1) <= disc_int) ++root;
  out.slope_quadratic_irrational = root * root != disc_int;

  SuspensionData leaf;
  leaf.dims = {1, 1};
  leaf.maps.resize(2);
  leaf.maps[0] = Eigen::MatrixXd::Constant(1, 1, 1.0);
  leaf.maps[1] = Eigen::MatrixXd::Constant(1, 1, out.lambda_inv);
  out.h1_dim = mv_dimension(leaf, 1, rank_tol).dim;

  out.note = out.slope_quadratic_irrational
                 ? "stable slope is a quadratic irrational; the single "
                   "degree-1 class comes from the fibration direction"
                 : "stable slope is rational; foliation has compact leaves";
  return out;
}

std::vector<int> linear_foliation_dims(int p, double rank_tol) {
  if (p < 0) throw std::invalid_argument("dimension must be nonnegative");
  std::vector<int> dims = {1};  // the point leaf
  for (int step = 0; step < p; ++step) {
    SuspensionData s;
    s.dims = dims;
    s.maps.resize(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k)
      s.maps[k] = Eigen::MatrixXd::Identity(dims[k], dims[k]);
    dims = suspension_dims(s, rank_tol);
  }
  return dims;
}

}  // namespace leafwise
