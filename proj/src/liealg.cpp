#include "leafwise/liealg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace leafwise {

namespace {

std::int64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// All k-subsets of {0..n-1} as sorted tuples, lexicographic order.
std::vector<std::vector<int>> subsets_lex(int n, int k) {
  std::vector<std::vector<int>> out;
  if (k < 0 || k > n) return out;
  out.reserve(static_cast<std::size_t>(binom(n, k)));
  std::vector<int> c(k);
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    if (k == 0) break;
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

std::uint64_t subset_mask(const std::vector<int>& c) {
  std::uint64_t m = 0;
  for (int v : c) m |= (std::uint64_t{1} << v);
  return m;
}

void check_table_shape(const LieAlgebra& alg) {
  if (alg.n < 0) throw std::invalid_argument("Lie algebra dimension is negative");
  if (alg.table.rows() != static_cast<Eigen::Index>(alg.n) * alg.n ||
      alg.table.cols() != alg.n)
    throw std::invalid_argument(
        "structure constant table must be (n*n) x n");
  if (!alg.rep.empty()) {
    if (static_cast<int>(alg.rep.size()) != alg.n)
      throw std::invalid_argument(
          "matrix realization must supply one matrix per basis element");
    const Eigen::Index d = alg.rep[0].rows();
    for (const auto& r : alg.rep)
      if (r.rows() != d || r.cols() != d)
        throw std::invalid_argument(
            "matrix realization entries must be square of one size");
  }
}

double sup_coeff(const FourierSeries& f) {
  double s = 0.0;
  for (const auto& [m, c] : f.coeffs()) s = std::max(s, std::abs(c));
  return s;
}

}  // namespace

Eigen::VectorXd LieAlgebra::bracket_vec(const Eigen::VectorXd& x,
                                        const Eigen::VectorXd& y) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    if (x(i) == 0.0) continue;
    for (int j = 0; j < n; ++j) {
      if (y(j) == 0.0) continue;
      out += x(i) * y(j) * table.row(i * n + j).transpose();
    }
  }
  return out;
}

LieAlgebra LieAlgebra::change_basis(const Eigen::MatrixXd& s) const {
  check_table_shape(*this);
  if (s.rows() != n || s.cols() != n)
    throw std::invalid_argument("change of basis must be n x n");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(s);
  if (!lu.isInvertible())
    throw std::invalid_argument("change of basis is singular");
  const Eigen::MatrixXd sinv = lu.inverse();

  LieAlgebra out;
  out.n = n;
  out.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n) * n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // [xi'_i, xi'_j] in old coordinates, then back through sinv.
      const Eigen::VectorXd w = bracket_vec(s.col(i), s.col(j));
      out.table.row(i * n + j) = (sinv * w).transpose();
    }
  if (!rep.empty()) {
    out.rep.resize(n);
    for (int k = 0; k < n; ++k) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rep[0].rows(), rep[0].cols());
      for (int a = 0; a < n; ++a) m += s(a, k) * rep[a];
      out.rep[k] = m;
    }
  }
  return out;
}

LieAlgebra LieAlgebra::abelian(int p) {
  if (p <= 0) throw std::invalid_argument("abelian algebra needs dimension >= 1");
  LieAlgebra out;
  out.n = p;
  out.table = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p) * p, p);
  // Faithful strictly-upper realization in dimension p+1: xi_k = E_{0,k+1}.
  out.rep.resize(p);
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p + 1);
    m(0, k + 1) = 1.0;
    out.rep[k] = m;
  }
  return out;
}

LieAlgebra LieAlgebra::heisenberg() {
  LieAlgebra out;
  out.n = 3;
  out.table = Eigen::MatrixXd::Zero(9, 3);
  out.table(0 * 3 + 1, 2) = 1.0;   // [x1, x2] = x3
  out.table(1 * 3 + 0, 2) = -1.0;
  out.rep.resize(3);
  for (auto& m : out.rep) m = Eigen::MatrixXd::Zero(3, 3);
  out.rep[0](0, 1) = 1.0;
  out.rep[1](1, 2) = 1.0;
  out.rep[2](0, 2) = 1.0;
  return out;
}

LieAlgebra LieAlgebra::ga() {
  LieAlgebra out;
  out.n = 2;
  out.table = Eigen::MatrixXd::Zero(4, 2);
  out.table(0 * 2 + 1, 1) = 1.0;   // [x1, x2] = x2
  out.table(1 * 2 + 0, 1) = -1.0;
  out.rep.resize(2);
  out.rep[0] = Eigen::MatrixXd::Zero(2, 2);
  out.rep[0](0, 0) = 1.0;
  out.rep[1] = Eigen::MatrixXd::Zero(2, 2);
  out.rep[1](0, 1) = 1.0;
  return out;
}

LieAlgebra LieAlgebra::sl2() {
  LieAlgebra out;
  out.n = 3;  // basis order h, e, f
  out.table = Eigen::MatrixXd::Zero(9, 3);
  out.table(0 * 3 + 1, 1) = 2.0;   // [h, e] = 2e
  out.table(1 * 3 + 0, 1) = -2.0;
  out.table(0 * 3 + 2, 2) = -2.0;  // [h, f] = -2f
  out.table(2 * 3 + 0, 2) = 2.0;
  out.table(1 * 3 + 2, 0) = 1.0;   // [e, f] = h
  out.table(2 * 3 + 1, 0) = -1.0;
  out.rep.resize(3);
  out.rep[0] = Eigen::MatrixXd::Zero(2, 2);
  out.rep[0](0, 0) = 1.0;
  out.rep[0](1, 1) = -1.0;
  out.rep[1] = Eigen::MatrixXd::Zero(2, 2);
  out.rep[1](0, 1) = 1.0;
  out.rep[2] = Eigen::MatrixXd::Zero(2, 2);
  out.rep[2](1, 0) = 1.0;
  return out;
}

AlgebraValidation validate(const LieAlgebra& alg, double tol) {
  check_table_shape(alg);
  AlgebraValidation out;
  out.tol = tol;
  const int n = alg.n;

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const double r = (alg.table.row(i * n + j) + alg.table.row(j * n + i))
                           .cwiseAbs()
                           .maxCoeff();
      out.antisymmetry_residual = std::max(out.antisymmetry_residual, r);
    }

  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Eigen::VectorXd cyc =
            alg.bracket_vec(alg.bracket(i, j), Eigen::VectorXd::Unit(n, k)) +
            alg.bracket_vec(alg.bracket(j, k), Eigen::VectorXd::Unit(n, i)) +
            alg.bracket_vec(alg.bracket(k, i), Eigen::VectorXd::Unit(n, j));
        out.jacobi_residual =
            std::max(out.jacobi_residual, cyc.cwiseAbs().maxCoeff());
      }

  if (alg.has_rep()) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::MatrixXd comm = alg.rep[i] * alg.rep[j] - alg.rep[j] * alg.rep[i];
        const Eigen::VectorXd w = alg.bracket(i, j);
        for (int k = 0; k < n; ++k)
          if (w(k) != 0.0) comm -= w(k) * alg.rep[k];
        if (comm.size() > 0)
          out.realization_residual = std::max(out.realization_residual,
                                              comm.cwiseAbs().maxCoeff());
      }
  }

  out.ok = out.antisymmetry_residual <= tol && out.jacobi_residual <= tol &&
           out.realization_residual <= tol;
  return out;
}

Eigen::MatrixXd ce_differential(const LieAlgebra& alg, int k) {
  check_table_shape(alg);
  const int n = alg.n;
  if (k < 0 || k > n)
    throw std::invalid_argument("differential degree out of range");
  const auto rows = subsets_lex(n, k + 1);
  const auto cols = subsets_lex(n, k);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  if (rows.empty() || cols.empty()) return d;

  std::map<std::uint64_t, int> col_index;
  for (std::size_t q = 0; q < cols.size(); ++q)
    col_index[subset_mask(cols[q])] = static_cast<int>(q);

  std::vector<int> rest;
  std::vector<int> merged;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const std::vector<int>& J = rows[r];
    const int kk = static_cast<int>(J.size());
    for (int a = 0; a < kk; ++a)
      for (int b = a + 1; b < kk; ++b) {
        const double sign_ab = ((a + b) % 2 == 0) ? 1.0 : -1.0;
        const Eigen::VectorXd w = alg.bracket(J[a], J[b]);
        rest.clear();
        for (int t = 0; t < kk; ++t)
          if (t != a && t != b) rest.push_back(J[t]);
        for (int c = 0; c < n; ++c) {
          if (w(c) == 0.0) continue;
          if (std::binary_search(rest.begin(), rest.end(), c)) continue;
          int pos = static_cast<int>(
              std::lower_bound(rest.begin(), rest.end(), c) - rest.begin());
          const double sigma = (pos % 2 == 0) ? 1.0 : -1.0;
          merged = rest;
          merged.insert(merged.begin() + pos, c);
          d(static_cast<Eigen::Index>(r), col_index.at(subset_mask(merged))) +=
              sign_ab * sigma * w(c);
        }
      }
  }
  return d;
}

double d_squared_residual(const LieAlgebra& alg) {
  check_table_shape(alg);
  double worst = 0.0;
  for (int k = 0; k + 1 <= alg.n - 1; ++k) {
    Eigen::MatrixXd a = ce_differential(alg, k);
    Eigen::MatrixXd b = ce_differential(alg, k + 1);
    if (a.size() == 0 || b.size() == 0) continue;
    Eigen::MatrixXd prod = b * a;
    if (prod.size() > 0) worst = std::max(worst, prod.cwiseAbs().maxCoeff());
  }
  return worst;
}

namespace {

RankInfo rank_of(const Eigen::MatrixXd& d, double rank_tol, int degree,
                 std::vector<std::string>* warnings) {
  RankInfo info;
  info.degree = degree;
  if (d.size() == 0) {
    info.spectral_gap = std::numeric_limits<double>::infinity();
    return info;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double thr = rank_tol * std::max(1.0, smax);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  info.rank = rank;
  info.smallest_kept = rank > 0 ? sv(rank - 1) : 0.0;
  info.largest_dropped = rank < sv.size() ? sv(rank) : 0.0;
  info.spectral_gap = info.largest_dropped > 0.0
                          ? info.smallest_kept / info.largest_dropped
                          : std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr / 10.0 && sv(i) < thr * 10.0) info.unstable = true;
  if (info.unstable && warnings != nullptr)
    warnings->push_back("singular value near the rank cut in d^" +
                        std::to_string(degree) +
                        "; cohomology dimensions may be unreliable");
  return info;
}

}  // namespace

CohomologyDims cohomology_dims(const LieAlgebra& alg, double rank_tol) {
  check_table_shape(alg);
  const int n = alg.n;
  CohomologyDims out;
  out.rank_tol = rank_tol;
  out.dims.assign(n + 1, 0);
  int prev_rank = 0;
  for (int k = 0; k <= n; ++k) {
    int rank_k = 0;
    if (k < n) {
      RankInfo info =
          rank_of(ce_differential(alg, k), rank_tol, k, &out.warnings);
      rank_k = info.rank;
      out.ranks.push_back(info);
    }
    out.dims[k] =
        static_cast<int>(binom(n, k)) - rank_k - prev_rank;
    prev_rank = rank_k;
  }
  return out;
}

AlgebraValuedForm::AlgebraValuedForm(ActionMatrix base_, LieAlgebra alg_,
                                     int degree_)
    : base(std::move(base_)), algebra(std::move(alg_)), degree(degree_) {
  if (degree != 0 && degree != 1)
    throw std::invalid_argument("algebra-valued forms support degree 0 and 1");
  check_table_shape(algebra);
  const int count = algebra.n * (degree == 1 ? base.p() : 1);
  parts.assign(static_cast<std::size_t>(count), FourierSeries::zero(base.N()));
}

FourierSeries& AlgebraValuedForm::part(int k, int i) {
  return const_cast<FourierSeries&>(
      static_cast<const AlgebraValuedForm&>(*this).part(k, i));
}

const FourierSeries& AlgebraValuedForm::part(int k, int i) const {
  if (k < 0 || k >= algebra.n) throw std::out_of_range("value index");
  const int p = degree == 1 ? base.p() : 1;
  if (i < 0 || i >= p) throw std::out_of_range("direction index");
  return parts[static_cast<std::size_t>(k) * p + i];
}

void AlgebraValuedForm::validate() const {
  const std::size_t want =
      static_cast<std::size_t>(algebra.n) * (degree == 1 ? base.p() : 1);
  if (parts.size() != want)
    throw std::invalid_argument("component count does not match n and p");
  for (const auto& f : parts)
    if (f.dims() != base.N())
      throw std::invalid_argument("component torus dimension mismatch");
}

AlgebraValuedForm canonical_form(const ActionMatrix& base,
                                 const LieAlgebra& alg) {
  if (alg.n < base.p())
    throw std::invalid_argument(
        "canonical form needs algebra dimension >= number of generators");
  AlgebraValuedForm out(base, alg, 1);
  for (int i = 0; i < base.p(); ++i)
    out.part(i, i) = FourierSeries::constant(base.N(), 1.0);
  return out;
}

double maurer_cartan_residual(const AlgebraValuedForm& omega) {
  omega.validate();
  if (omega.degree != 1)
    throw std::invalid_argument("Maurer-Cartan residual needs a degree-1 form");
  const int n = omega.algebra.n;
  const int p = omega.base.p();
  double worst = 0.0;
  for (int a = 0; a < p; ++a)
    for (int b = a + 1; b < p; ++b) {
      const Eigen::VectorXd va = omega.base.row(a);
      const Eigen::VectorXd vb = omega.base.row(b);
      // Products of components are shared across value indices.
      std::map<int, FourierSeries> prod;
      for (int k = 0; k < n; ++k) {
        FourierSeries t = directional_derivative(omega.part(k, b), va) -
                          directional_derivative(omega.part(k, a), vb);
        for (int r = 0; r < n; ++r)
          for (int s = 0; s < n; ++s) {
            const double c = omega.algebra.table(r * n + s, k);
            if (c == 0.0) continue;
            auto it = prod.find(r * n + s);
            if (it == prod.end())
              it = prod.emplace(r * n + s,
                                multiply(omega.part(r, a), omega.part(s, b)))
                       .first;
            t = t + c * it->second;
          }
        worst = std::max(worst, sup_coeff(t));
      }
    }
  return worst;
}

MatrixSeries::MatrixSeries(int rows_, int cols_, int torus_dims)
    : rows(rows_), cols(cols_) {
  if (rows <= 0 || cols <= 0)
    throw std::invalid_argument("matrix series needs positive dimensions");
  entries.assign(static_cast<std::size_t>(rows) * cols,
                 FourierSeries::zero(torus_dims));
}

MatrixSeries MatrixSeries::identity(int size, int torus_dims) {
  MatrixSeries out(size, size, torus_dims);
  for (int i = 0; i < size; ++i)
    out.at(i, i) = FourierSeries::constant(torus_dims, 1.0);
  return out;
}

MatrixSeries MatrixSeries::constant(const Eigen::MatrixXd& m, int torus_dims) {
  MatrixSeries out(static_cast<int>(m.rows()), static_cast<int>(m.cols()),
                   torus_dims);
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c)
      if (m(r, c) != 0.0)
        out.at(r, c) = FourierSeries::constant(torus_dims, m(r, c));
  return out;
}

namespace {

MatrixSeries mat_mul(const MatrixSeries& a, const MatrixSeries& b,
                     const MultiplyOptions& mo, int torus_dims) {
  if (a.cols != b.rows)
    throw std::invalid_argument("matrix series shape mismatch");
  MatrixSeries out(a.rows, b.cols, torus_dims);
  for (int r = 0; r < a.rows; ++r)
    for (int c = 0; c < b.cols; ++c) {
      FourierSeries acc = FourierSeries::zero(torus_dims);
      for (int t = 0; t < a.cols; ++t)
        acc = acc + multiply(a.at(r, t), b.at(t, c), mo);
      out.at(r, c) = acc;
    }
  return out;
}

double matrix_truncation_loss(const MatrixSeries& m) {
  double s = 0.0;
  for (const auto& e : m.entries) s = std::max(s, e.truncation_loss());
  return s;
}

}  // namespace

GaugeReport gauge_transform(const AlgebraValuedForm& omega,
                            const MatrixSeries& b,
                            const Eigen::MatrixXd& theta,
                            const GaugeOptions& opts) {
  omega.validate();
  if (omega.degree != 1)
    throw std::invalid_argument("gauge transform needs a degree-1 form");
  const LieAlgebra& alg = omega.algebra;
  if (!alg.has_rep())
    throw std::invalid_argument("gauge transform requires a matrix realization");
  const int n = alg.n;
  const int p = omega.base.p();
  const int N = omega.base.N();
  const int d = alg.rep_dim();
  if (b.rows != d || b.cols != d)
    throw std::invalid_argument("frame size does not match the realization");
  for (const auto& e : b.entries)
    if (e.dims() != N)
      throw std::invalid_argument("frame torus dimension mismatch");
  if (theta.rows() != n || theta.cols() != n)
    throw std::invalid_argument("theta must act on the value algebra (n x n)");

  GaugeReport report{AlgebraValuedForm(omega.base, alg, 1)};

  // How far theta is from respecting the bracket; zero for automorphisms.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd lhs = theta * alg.bracket(i, j);
      const Eigen::VectorXd rhs = alg.bracket_vec(theta.col(i), theta.col(j));
      report.theta_hom_residual = std::max(
          report.theta_hom_residual, (lhs - rhs).cwiseAbs().maxCoeff());
    }
  report.theta_invertible = std::abs(theta.determinant()) > opts.tol;

  int rb = 0;
  for (const auto& e : b.entries) rb = std::max(rb, e.radius());
  int rw = 0;
  for (const auto& e : omega.parts) rw = std::max(rw, e.radius());
  const int cap = opts.truncation >= 0 ? opts.truncation : rw + 3 * rb;
  const MultiplyOptions mo{cap};

  bool out_real = true;
  for (const auto& e : b.entries) out_real = out_real && e.real_flag();
  for (const auto& e : omega.parts) out_real = out_real && e.real_flag();
  if (!out_real)
    report.omega.parts.assign(static_cast<std::size_t>(n) * p,
                              FourierSeries::zero(N, false));

  // Pointwise inverse of b on an oversampled grid, reprojected to the cap.
  const int oversample = std::max(opts.oversample, 1);
  int res = oversample * (2 * cap + 1);
  if (res % 2 == 0) ++res;
  const std::vector<int> resolution(static_cast<std::size_t>(N), res);
  std::vector<GridSamples> bs;
  bs.reserve(static_cast<std::size_t>(d) * d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) bs.push_back(sample(b.at(r, c), resolution));
  const std::int64_t total = bs[0].total();
  std::vector<Eigen::VectorXcd> inv_values(
      static_cast<std::size_t>(d) * d, Eigen::VectorXcd(total));
  report.min_abs_det = std::numeric_limits<double>::infinity();
  Eigen::MatrixXcd point(d, d);
  for (std::int64_t t = 0; t < total; ++t) {
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) point(r, c) = bs[r * d + c].values(t);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(point);
    const double adet = std::abs(lu.determinant());
    report.min_abs_det = std::min(report.min_abs_det, adet);
    if (adet < 1e-12)
      throw std::domain_error(
          "gauge frame is numerically singular on the sampling grid");
    const Eigen::MatrixXcd inv = lu.inverse();
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) inv_values[r * d + c](t) = inv(r, c);
  }
  MatrixSeries binv(d, d, N);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) {
      GridSamples g;
      g.dims = N;
      g.resolution = resolution;
      g.values = std::move(inv_values[r * d + c]);
      g.real_flag = out_real;
      binv.at(r, c) = from_samples(g, cap);
    }

  // Certify the projected inverse: sup coefficient of b * binv - id.
  {
    MatrixSeries check = mat_mul(b, binv, MultiplyOptions{-1}, N);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) {
        FourierSeries e = check.at(r, c);
        if (r == c) e = e - FourierSeries::constant(N, 1.0);
        report.inverse_defect = std::max(report.inverse_defect, sup_coeff(e));
      }
  }

  // Realization span and its pseudoinverse for the coordinate decomposition.
  Eigen::MatrixXd span(static_cast<Eigen::Index>(d) * d, n);
  for (int k = 0; k < n; ++k)
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        span(static_cast<Eigen::Index>(r) * d + c, k) = alg.rep[k](r, c);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(span);

  double loss = matrix_truncation_loss(binv);
  for (int i = 0; i < p; ++i) {
    const Eigen::VectorXd vi = omega.base.row(i);
    // Realize the theta-pushed value coordinates for direction i.
    MatrixSeries w(d, d, N);
    for (int k = 0; k < n; ++k) {
      FourierSeries tp = FourierSeries::zero(N);
      for (int l = 0; l < n; ++l)
        if (theta(k, l) != 0.0) tp = tp + theta(k, l) * omega.part(l, i);
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
          if (alg.rep[k](r, c) != 0.0)
            w.at(r, c) = w.at(r, c) + alg.rep[k](r, c) * tp;
    }
    MatrixSeries conj = mat_mul(binv, mat_mul(w, b, mo, N), mo, N);
    MatrixSeries db(d, d, N);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        db.at(r, c) = directional_derivative(b.at(r, c), vi);
    MatrixSeries deriv = mat_mul(binv, db, mo, N);
    MatrixSeries total_i(d, d, N);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        total_i.at(r, c) = conj.at(r, c) + deriv.at(r, c);
    loss = std::max(loss, matrix_truncation_loss(total_i));

    // Decompose every mode back into algebra coordinates.
    FourierSeries::CoeffMap mode_union;
    for (const auto& e : total_i.entries)
      for (const auto& [m, c] : e.coeffs()) mode_union.emplace(m, Complex{});
    std::vector<Freq> modes;
    modes.reserve(mode_union.size());
    for (const auto& [m, c] : mode_union) modes.push_back(m);
    std::sort(modes.begin(), modes.end(), FreqLess{});
    Eigen::VectorXd re(static_cast<Eigen::Index>(d) * d);
    Eigen::VectorXd im(static_cast<Eigen::Index>(d) * d);
    for (const Freq& m : modes) {
      for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c) {
          const Complex v = total_i.at(r, c).coeff(m);
          re(static_cast<Eigen::Index>(r) * d + c) = v.real();
          im(static_cast<Eigen::Index>(r) * d + c) = v.imag();
        }
      const Eigen::VectorXd lam_re = cod.solve(re);
      const Eigen::VectorXd lam_im = cod.solve(im);
      const Eigen::VectorXd res_re = span * lam_re - re;
      const Eigen::VectorXd res_im = span * lam_im - im;
      for (Eigen::Index t = 0; t < res_re.size(); ++t)
        report.offspan_residual =
            std::max(report.offspan_residual,
                     std::hypot(res_re(t), res_im(t)));
      for (int k = 0; k < n; ++k) {
        const Complex val{lam_re(k), lam_im(k)};
        if (val != Complex{0.0, 0.0}) report.omega.part(k, i).set(m, val);
      }
    }
  }
  report.truncation_loss = loss;
  return report;
}

}  // namespace leafwise
