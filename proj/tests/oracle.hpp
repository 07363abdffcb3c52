#pragma once

// Independent recomputation paths used as oracles by the test suite. Every
// helper is deliberately naive and shares no code with the library routines
// it cross-checks: correctness here should be decidable by inspection.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "leafwise/fourier.hpp"
#include "leafwise/liealg.hpp"

namespace oracle {

inline constexpr double kTau = 6.283185307179586476925286766559;

// Plain term-by-term summation of the trigonometric polynomial at x.
inline std::complex<double> eval_naive(const leafwise::FourierSeries& f,
                                       const Eigen::VectorXd& x) {
  std::complex<double> acc{0.0, 0.0};
  for (const auto& [m, c] : f.coeffs()) {
    double phase = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      phase += static_cast<double>(m(i)) * x(i);
    acc += c * std::polar(1.0, kTau * phase);
  }
  return acc;
}

// Dense double loop over both supports; no sorting, no symmetrization.
inline leafwise::FourierSeries convolve_naive(const leafwise::FourierSeries& a,
                                              const leafwise::FourierSeries& b) {
  leafwise::FourierSeries out(a.dims(), false);
  for (const auto& [ma, ca] : a.coeffs())
    for (const auto& [mb, cb] : b.coeffs()) {
      const leafwise::Freq m = ma + mb;
      out.set(m, out.coeff(m) + ca * cb);
    }
  return out;
}

// Consecutive Fibonacci numbers (F_1, F_2) = (1, 1); convergents of the
// golden ratio are F_{k+1} / F_k.
inline std::vector<std::pair<std::int64_t, std::int64_t>> fibonacci_pairs(
    int count) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t a = 1, b = 1;  // (F_1, F_2)
  for (int k = 0; k < count; ++k) {
    out.emplace_back(b, a);  // (F_{k+2}, F_{k+1})
    const std::int64_t next = a + b;
    a = b;
    b = next;
  }
  return out;
}

inline std::int64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::int64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// dim H^1 = dim g - dim [g, g]: corank of the matrix whose columns are all
// bracket values. Independent of the Chevalley-Eilenberg machinery.
inline int h1_from_bracket_span(const leafwise::LieAlgebra& alg,
                                double tol = 1e-9) {
  const int n = alg.n;
  Eigen::MatrixXd span(n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      span.col(i * n + j) = alg.bracket(i, j);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(span);
  const double thr = tol * std::max(1.0, svd.singularValues().size() > 0
                                             ? svd.singularValues()(0)
                                             : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++rank;
  return n - rank;
}

// Uncompensated long-orbit mean displacement; fine at modest lengths.
inline double rotation_long_orbit(double drift,
                                  const leafwise::FourierSeries& periodic,
                                  std::int64_t n) {
  double x = 0.0;
  double total = 0.0;
  Eigen::VectorXd pt(1);
  for (std::int64_t k = 0; k < n; ++k) {
    pt(0) = x - std::floor(x);
    const double step =
        drift + eval_naive(periodic, pt).real();
    total += step;
    x += step;
  }
  return total / static_cast<double>(n);
}

}  // namespace oracle
