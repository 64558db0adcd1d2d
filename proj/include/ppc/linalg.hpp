#pragma once

// Fixed-size 3-vectors and 3x3 matrices, templated on the scalar so the same
// routines serve plain doubles and jets.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace ppc {

template <typename T> using Vec3 = std::array<T, 3>;
template <typename T> using Mat3 = std::array<std::array<T, 3>, 3>;

/// Coefficients t[i][j][k], three indices each in {0,1,2}.
template <typename T> using Tensor3 = std::array<Mat3<T>, 3>;

template <typename T> Mat3<T> zero_mat() {
  Mat3<T> m{};
  for (auto &row : m) row.fill(T(0.0));
  return m;
}

template <typename T> Mat3<T> identity_mat() {
  Mat3<T> m = zero_mat<T>();
  for (std::size_t i = 0; i < 3; ++i) m[i][i] = T(1.0);
  return m;
}

template <typename T> T det(const Mat3<T> &m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// Adjugate; inverse = adjugate / det.
template <typename T> Mat3<T> adjugate(const Mat3<T> &m) {
  Mat3<T> a;
  a[0][0] = m[1][1] * m[2][2] - m[1][2] * m[2][1];
  a[0][1] = m[0][2] * m[2][1] - m[0][1] * m[2][2];
  a[0][2] = m[0][1] * m[1][2] - m[0][2] * m[1][1];
  a[1][0] = m[1][2] * m[2][0] - m[1][0] * m[2][2];
  a[1][1] = m[0][0] * m[2][2] - m[0][2] * m[2][0];
  a[1][2] = m[0][2] * m[1][0] - m[0][0] * m[1][2];
  a[2][0] = m[1][0] * m[2][1] - m[1][1] * m[2][0];
  a[2][1] = m[0][1] * m[2][0] - m[0][0] * m[2][1];
  a[2][2] = m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return a;
}

template <typename T> Mat3<T> inverse(const Mat3<T> &m) {
  const T d = det(m);
  Mat3<T> a = adjugate(m);
  for (auto &row : a)
    for (auto &v : row) v = v / d;
  return a;
}

template <typename T> Mat3<T> operator*(const Mat3<T> &a, const Mat3<T> &b) {
  Mat3<T> c = zero_mat<T>();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) c[i][j] = c[i][j] + a[i][k] * b[k][j];
  return c;
}

template <typename T> Vec3<T> operator*(const Mat3<T> &a, const Vec3<T> &v) {
  Vec3<T> r{};
  for (std::size_t i = 0; i < 3; ++i) {
    r[i] = T(0.0);
    for (std::size_t k = 0; k < 3; ++k) r[i] = r[i] + a[i][k] * v[k];
  }
  return r;
}

template <typename T> Mat3<T> transpose(const Mat3<T> &a) {
  Mat3<T> t;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) t[i][j] = a[j][i];
  return t;
}

template <typename T> T trace(const Mat3<T> &a) { return a[0][0] + a[1][1] + a[2][2]; }

inline double max_abs(const Mat3<double> &a) {
  double m = 0.0;
  for (const auto &row : a)
    for (double v : row) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs(const Vec3<double> &a) {
  return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])});
}

inline Mat3<double> operator-(const Mat3<double> &a, const Mat3<double> &b) {
  Mat3<double> c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) c[i][j] = a[i][j] - b[i][j];
  return c;
}

inline Mat3<double> operator+(const Mat3<double> &a, const Mat3<double> &b) {
  Mat3<double> c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) c[i][j] = a[i][j] + b[i][j];
  return c;
}

inline Mat3<double> operator*(double s, const Mat3<double> &a) {
  Mat3<double> c;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) c[i][j] = s * a[i][j];
  return c;
}

} // namespace ppc
