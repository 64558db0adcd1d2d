#pragma once

/**
 * @file frame.hpp
 * @brief Frame-level geometry on the pseudo-orthonormal basis (xi, e, phi e).
 *
 * Frame index 0 is xi, 1 is e, 2 is phi e; the metric in this frame is the
 * constant G = diag(1, 1, -1). Every tensor here is written in that order.
 *
 * Two kinds of routines live side by side:
 *  - closed forms in the structure functions a1..a5, b1, b2 (brackets,
 *    Levi-Civita table, Lie derivatives, Ricci data, residual systems), and
 *  - generic routines that take only a bracket or connection table
 *    (Koszul formula, curvature, Jacobi sums, Lie derivative of the
 *    connection). The generic ones serve as independent checks.
 *
 * Curvature uses R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y]; the Ricci
 * contraction is rho(Y,Z) = -sum_a R(E_a,Y)Z |_a, which is the usual Ricci
 * tensor and gives rho(xi,xi) = -2 on paracontact metric manifolds whose
 * Reeb field is an infinitesimal harmonic transformation.
 */

#include <array>
#include <cmath>
#include <cstddef>

#include "ppc/linalg.hpp"

namespace ppc {

inline constexpr std::array<double, 3> kFrameSignature{1.0, 1.0, -1.0};

/// Frame metric G = diag(1, 1, -1); phi e (index 2) is time-like.
struct FrameMetric {
  static constexpr double sign(std::size_t i) { return kFrameSignature[i]; }
  static Mat3<double> matrix() {
    Mat3<double> g = zero_mat<double>();
    for (std::size_t i = 0; i < 3; ++i) g[i][i] = kFrameSignature[i];
    return g;
  }
  static double inner(const Vec3<double> &u, const Vec3<double> &v) {
    return u[0] * v[0] + u[1] * v[1] - u[2] * v[2];
  }
};

/// Scalar together with its derivatives along the frame fields (xi, e, phi e).
struct FrameDual {
  double v = 0.0;
  std::array<double, 3> d{};

  constexpr FrameDual() = default;
  constexpr FrameDual(double value) : v(value) {} // NOLINT
  constexpr FrameDual(double value, const std::array<double, 3> &derivs) : v(value), d(derivs) {}

  double xi() const { return d[0]; }
  double e() const { return d[1]; }
  double phie() const { return d[2]; }

  friend FrameDual operator+(const FrameDual &a, const FrameDual &b) {
    return {a.v + b.v, {a.d[0] + b.d[0], a.d[1] + b.d[1], a.d[2] + b.d[2]}};
  }
  friend FrameDual operator-(const FrameDual &a, const FrameDual &b) {
    return {a.v - b.v, {a.d[0] - b.d[0], a.d[1] - b.d[1], a.d[2] - b.d[2]}};
  }
  friend FrameDual operator-(const FrameDual &a) { return {-a.v, {-a.d[0], -a.d[1], -a.d[2]}}; }
  friend FrameDual operator*(const FrameDual &a, const FrameDual &b) {
    return {a.v * b.v,
            {a.d[0] * b.v + a.v * b.d[0], a.d[1] * b.v + a.v * b.d[1], a.d[2] * b.v + a.v * b.d[2]}};
  }
  friend FrameDual operator/(const FrameDual &a, const FrameDual &b) {
    const double q = a.v / b.v;
    return {q, {(a.d[0] - q * b.d[0]) / b.v, (a.d[1] - q * b.d[1]) / b.v, (a.d[2] - q * b.d[2]) / b.v}};
  }
};

inline double value_of(double x) { return x; }
inline double value_of(const FrameDual &x) { return x.v; }

/// Structure functions of a natural frame description.
template <typename T> struct StructureFunctions {
  T a1{}, a2{}, a3{}, a4{}, a5{}, b1{}, b2{};

  StructureFunctions<double> values() const {
    return {value_of(a1), value_of(a2), value_of(a3), value_of(a4), value_of(a5), value_of(b1), value_of(b2)};
  }
};

template <typename T> Tensor3<T> zero_tensor() {
  Tensor3<T> t;
  for (auto &m : t) m = zero_mat<T>();
  return t;
}

/// Lie brackets [E_i, E_j] = sum_k c[i][j][k] E_k of the natural description.
template <typename T> Tensor3<T> bracket_table(const StructureFunctions<T> &s) {
  Tensor3<T> c = zero_tensor<T>();
  const T two(2.0);
  c[0][1] = {T(0.0), -s.b1, s.a3 - s.b2};
  c[0][2] = {T(0.0), s.a3 + two * s.a1 - s.b2, two * s.a2 - s.b1};
  c[1][2] = {two * (s.b2 - s.a1), s.a4, -s.a5};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < i; ++j)
      for (std::size_t k = 0; k < 3; ++k) c[i][j][k] = -c[j][i][k];
  return c;
}

/// Levi-Civita table nabla_{E_i} E_j = sum_k G[i][j][k] E_k in closed form.
template <typename T> Tensor3<T> connection_table(const StructureFunctions<T> &s) {
  Tensor3<T> g = zero_tensor<T>();
  const T two(2.0), zero(0.0);
  // nabla_xi
  g[0][0] = {zero, zero, zero};
  g[0][1] = {zero, zero, s.a3};
  g[0][2] = {zero, s.a3, zero};
  // nabla_e
  g[1][0] = {zero, s.b1, s.b2};
  g[1][1] = {-s.b1, zero, s.a4};
  g[1][2] = {s.b2, s.a4, zero};
  // nabla_{phi e}
  g[2][0] = {zero, s.b2 - two * s.a1, s.b1 - two * s.a2};
  g[2][1] = {two * s.a1 - s.b2, zero, s.a5};
  g[2][2] = {s.b1 - two * s.a2, s.a5, zero};
  return g;
}

/// Levi-Civita table from brackets alone (Koszul formula with constant G).
template <typename T> Tensor3<T> koszul_connection(const Tensor3<T> &c) {
  Tensor3<T> g = zero_tensor<T>();
  const T half(0.5);
  auto low = [&](std::size_t i, std::size_t j, std::size_t k) { return c[i][j][k] * T(kFrameSignature[k]); };
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        g[i][j][k] = half * (low(i, j, k) - low(j, k, i) + low(k, i, j)) * T(kFrameSignature[k]);
  return g;
}

/// R[i][j][k][n]: component n of R(E_i,E_j)E_k.
using Riemann = std::array<Tensor3<double>, 3>;

/// Curvature from a connection table carrying frame derivatives and the brackets.
inline Riemann curvature(const Tensor3<FrameDual> &conn, const Tensor3<double> &c) {
  Riemann r{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t n = 0; n < 3; ++n) {
          double v = 0.0;
          for (std::size_t m = 0; m < 3; ++m) v += c[i][j][m] * conn[m][k][n].v;
          // nabla_i nabla_j E_k - nabla_j nabla_i E_k
          double dij = conn[j][k][n].d[i] - conn[i][k][n].d[j];
          for (std::size_t m = 0; m < 3; ++m) dij += conn[j][k][m].v * conn[i][m][n].v - conn[i][k][m].v * conn[j][m][n].v;
          r[i][j][k][n] = v - dij;
        }
  return r;
}

/// rho(E_j, E_k) = -sum_a R(E_a,E_j)E_k |_a. Shared with the coordinate oracle.
inline Mat3<double> ricci_contraction(const Riemann &r) {
  Mat3<double> rho = zero_mat<double>();
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k) {
      double s = 0.0;
      for (std::size_t a = 0; a < 3; ++a) s += r[a][j][k][a];
      rho[j][k] = -s;
    }
  return rho;
}

/// Scalar curvature tr(G^{-1} rho) in the frame.
inline double frame_scalar_curvature(const Mat3<double> &rho) { return rho[0][0] + rho[1][1] - rho[2][2]; }

/// R(X,Y,Z,V) = G(R(X,Y)Z, V) for frame-component vectors.
inline double riemann_4(const Riemann &r, const Vec3<double> &x, const Vec3<double> &y, const Vec3<double> &z,
                        const Vec3<double> &w) {
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        const double coef = x[i] * y[j] * z[k];
        if (coef == 0.0) continue;
        for (std::size_t n = 0; n < 3; ++n) s += coef * r[i][j][k][n] * w[n] * kFrameSignature[n];
      }
  return s;
}

/// Sum over cyclic (i,j,k) of [E_i,[E_j,E_k]]; zero iff the brackets satisfy Jacobi.
inline Vec3<double> jacobi_vector(const Tensor3<FrameDual> &c) {
  Vec3<double> out{0.0, 0.0, 0.0};
  constexpr std::size_t cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (const auto &t : cyc) {
    const std::size_t i = t[0], j = t[1], k = t[2];
    for (std::size_t n = 0; n < 3; ++n) {
      double v = c[j][k][n].d[i];
      for (std::size_t m = 0; m < 3; ++m) v += c[j][k][m].v * c[i][m][n].v;
      out[n] += v;
    }
  }
  return out;
}

/// (L_xi nabla)(E_a, E_b) as frame components, from connection and brackets.
inline Vec3<double> lie_derivative_connection(const Tensor3<FrameDual> &conn, const Tensor3<FrameDual> &c,
                                              std::size_t a, std::size_t b) {
  Vec3<double> out{};
  for (std::size_t n = 0; n < 3; ++n) {
    // [xi, nabla_a E_b]
    double v = conn[a][b][n].d[0];
    for (std::size_t m = 0; m < 3; ++m) v += conn[a][b][m].v * c[0][m][n].v;
    // - nabla_{[xi, E_a]} E_b
    for (std::size_t m = 0; m < 3; ++m) v -= c[0][a][m].v * conn[m][b][n].v;
    // - nabla_a [xi, E_b]
    v -= c[0][b][n].d[a];
    for (std::size_t m = 0; m < 3; ++m) v -= c[0][b][m].v * conn[a][m][n].v;
    out[n] = v;
  }
  return out;
}

/// tr(L_xi nabla) = sum_a eps_a (L_xi nabla)(E_a, E_a), computed generically.
inline Vec3<double> lie_connection_trace(const Tensor3<FrameDual> &conn, const Tensor3<FrameDual> &c) {
  Vec3<double> out{0.0, 0.0, 0.0};
  for (std::size_t a = 0; a < 3; ++a) {
    const Vec3<double> l = lie_derivative_connection(conn, c, a, a);
    for (std::size_t n = 0; n < 3; ++n) out[n] += kFrameSignature[a] * l[n];
  }
  return out;
}

/// (L_xi g)(E_i,E_j) = G(nabla_i xi, E_j) + G(nabla_j xi, E_i) from a connection table.
template <typename T> Mat3<double> lie_metric_from_connection(const Tensor3<T> &conn) {
  Mat3<double> l = zero_mat<double>();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      l[i][j] = value_of(conn[i][0][j]) * kFrameSignature[j] + value_of(conn[j][0][i]) * kFrameSignature[i];
  return l;
}

/// Metric compatibility defect max |G(nabla_i E_j,E_k) + G(E_j, nabla_i E_k)|.
template <typename T> double metric_compatibility_defect(const Tensor3<T> &conn) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        m = std::max(m, std::abs(value_of(conn[i][j][k]) * kFrameSignature[k] +
                                 value_of(conn[i][k][j]) * kFrameSignature[j]));
  return m;
}

/// Torsion defect max |nabla_i E_j - nabla_j E_i - [E_i,E_j]|.
template <typename T> double torsion_defect(const Tensor3<T> &conn, const Tensor3<T> &c) {
  double m = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        m = std::max(m, std::abs(value_of(conn[i][j][k]) - value_of(conn[j][i][k]) - value_of(c[i][j][k])));
  return m;
}

template <typename T> Tensor3<double> values(const Tensor3<T> &t) {
  Tensor3<double> out{};
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) out[i][j][k] = value_of(t[i][j][k]);
  return out;
}

} // namespace ppc
