#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace leafwise {

// Integer frequency vector m in Z^N. Kept exact: everything downstream that
// decides resonance or truncation membership works on these integers, never
// on rounded doubles.
using Freq = Eigen::VectorXi;

struct FreqHash {
  std::size_t operator()(const Freq& m) const noexcept {
    // FNV-1a over the raw int32 words.
    std::uint64_t h = 1469598103934665603ULL;
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      std::uint32_t w = static_cast<std::uint32_t>(m[i]);
      for (int b = 0; b < 4; ++b) {
        h ^= (w >> (8 * b)) & 0xffU;
        h *= 1099511628211ULL;
      }
    }
    return static_cast<std::size_t>(h);
  }
};

struct FreqEq {
  bool operator()(const Freq& a, const Freq& b) const noexcept {
    return a.size() == b.size() && a == b;
  }
};

// Lexicographic order; used wherever a deterministic mode order is needed
// (serialization, reports, reductions).
struct FreqLess {
  bool operator()(const Freq& a, const Freq& b) const noexcept {
    if (a.size() != b.size()) return a.size() < b.size();
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return a[i] < b[i];
    return false;
  }
};

inline Freq make_freq(std::initializer_list<int> v) {
  Freq m(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (int x : v) m[i++] = x;
  return m;
}

inline int norm_inf(const Freq& m) {
  return m.size() == 0 ? 0 : m.cwiseAbs().maxCoeff();
}

// ||m||_2^2 as exact integer arithmetic.
inline std::int64_t norm2_sq(const Freq& m) {
  std::int64_t s = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i)
    s += static_cast<std::int64_t>(m[i]) * static_cast<std::int64_t>(m[i]);
  return s;
}

inline double norm2(const Freq& m) {
  return std::sqrt(static_cast<double>(norm2_sq(m)));
}

inline double dot(const Freq& m, const Eigen::VectorXd& v) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += m[i] * v[i];
  return s;
}

inline bool is_zero(const Freq& m) { return m.isZero(0); }

}  // namespace leafwise
