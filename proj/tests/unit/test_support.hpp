#pragma once

// Independent reference constructions used by several test files. Nothing here calls into the
// library's operator builders.

#include <Eigen/Dense>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

namespace testsupport {

using Mat = Eigen::MatrixXcd;
using cd = std::complex<double>;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Mat kron_all(const std::vector<Mat>& ms) {
  Mat out = Mat::Identity(1, 1);
  for (const auto& m : ms) out = kron(out, m);
  return out;
}

// Pauli-based spin-1/2 and explicit spin-1 matrices, |+s> first.
inline Mat sx(int two_s) {
  if (two_s == 1) return (Mat(2, 2) << 0, 0.5, 0.5, 0).finished();
  const double r = 1.0 / std::sqrt(2.0);
  return (Mat(3, 3) << 0, r, 0, r, 0, r, 0, r, 0).finished();
}
inline Mat sy(int two_s) {
  const cd i(0, 1);
  if (two_s == 1) return (Mat(2, 2) << 0, -0.5 * i, 0.5 * i, 0).finished();
  const double r = 1.0 / std::sqrt(2.0);
  return (Mat(3, 3) << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0).finished();
}
inline Mat sz(int two_s) {
  if (two_s == 1) return (Mat(2, 2) << 0.5, 0, 0, -0.5).finished();
  return (Mat(3, 3) << 1, 0, 0, 0, 0, 0, 0, 0, -1).finished();
}
inline Mat spin(int axis, int two_s) { return axis == 0 ? sx(two_s) : (axis == 1 ? sy(two_s) : sz(two_s)); }
inline Mat eye(Eigen::Index n) { return Mat::Identity(n, n); }

// Purely relative comparison; doctest::Approx adds an absolute floor of epsilon by default
// and its strict inequality rejects exact zeros once that floor is removed.
struct Rel {
  double value;
  double eps = 1e-12;
  Rel epsilon(double e) const { return {value, e}; }
  friend bool operator==(double lhs, const Rel& r) {
    return lhs == r.value || std::abs(lhs - r.value) <= r.eps * std::max(std::abs(lhs), std::abs(r.value));
  }
  friend bool operator!=(double lhs, const Rel& r) { return !(lhs == r); }
};

inline Rel approx(double v) { return {v}; }

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testsupport

namespace doctest {
template <>
struct StringMaker<testsupport::Rel> {
  static String convert(const testsupport::Rel& r) { return ("Rel(" + std::to_string(r.value) + ")").c_str(); }
};
}  // namespace doctest
