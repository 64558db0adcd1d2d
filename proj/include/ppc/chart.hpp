#pragma once

/**
 * @file chart.hpp
 * @brief Coordinate-chart curvature oracle.
 *
 * Works from a metric given in coordinates (x, y, z) and never touches
 * structure functions: Christoffel symbols from first metric derivatives,
 * Riemann from their derivatives (second metric derivatives, carried by
 * Jet2). The sign convention matches the frame engine,
 * R(X,Y) = nabla_[X,Y] - [nabla_X, nabla_Y], and so does the contraction.
 */

#include <array>
#include <cmath>
#include <functional>

#include "ppc/errors.hpp"
#include "ppc/expr.hpp"
#include "ppc/frame.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/jet.hpp"
#include "ppc/linalg.hpp"

namespace ppc {

/// Value plus coordinate partials (same first-order algebra as FrameDual).
using CoordDual = FrameDual;

/// Symmetric metric with expression entries.
struct ChartMetricField {
  Mat3<Expr> entries;
  Bindings env;

  Mat3<Jet2> at(const ChartPoint &p) const {
    Mat3<Jet2> g;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) g[i][j] = eval_jet(entries[i][j], p, env);
    return g;
  }
};

inline constexpr double kMetricDetTolerance = 1e-12;

/// conn[i][j][k] = Gamma^k_{ij} with its coordinate partials.
inline Tensor3<CoordDual> christoffel_duals(const Mat3<Jet2> &g) {
  Mat3<CoordDual> gd;
  Mat3<double> gv;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      gd[a][b] = CoordDual(g[a][b].value(), g[a][b].grad());
      gv[a][b] = g[a][b].value();
    }
  const double d = det(gv);
  if (!(std::abs(d) >= kMetricDetTolerance))
    throw SingularMetric("metric is singular at the evaluation point (|det| = " + std::to_string(std::abs(d)) + ")");
  const Mat3<CoordDual> ginv = inverse(gd);

  // partial_m of g_ab as a dual: value = d_m g_ab, partials = d_n d_m g_ab
  auto dg = [&g](std::size_t m, std::size_t a, std::size_t b) {
    const Jet2 &j = g[a][b];
    return CoordDual(j.grad(m), {j.hess(m, 0), j.hess(m, 1), j.hess(m, 2)});
  };
  Tensor3<CoordDual> first;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t l = 0; l < 3; ++l)
        first[i][j][l] = CoordDual(0.5) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));

  Tensor3<CoordDual> conn = zero_tensor<CoordDual>();
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        CoordDual s(0.0);
        for (std::size_t l = 0; l < 3; ++l) s = s + ginv[k][l] * first[i][j][l];
        conn[i][j][k] = s;
      }
  return conn;
}

/// Christoffel symbols Gamma^k_{ij} stored as [i][j][k].
inline Tensor3<double> chart_christoffel(const ChartMetricField &field, const ChartPoint &p) {
  return values(christoffel_duals(field.at(p)));
}

/// R[m][n][s][r]: component r of R(d_m, d_n) d_s, textbook index formula.
inline Riemann chart_riemann(const Mat3<Jet2> &g) {
  const Tensor3<CoordDual> G = christoffel_duals(g);
  Riemann out{};
  for (std::size_t m = 0; m < 3; ++m)
    for (std::size_t n = 0; n < 3; ++n)
      for (std::size_t s = 0; s < 3; ++s)
        for (std::size_t r = 0; r < 3; ++r) {
          // standard R^r_{s m n} = d_m G^r_{n s} - d_n G^r_{m s} + G^r_{m l} G^l_{n s} - G^r_{n l} G^l_{m s}
          double std_r = G[n][s][r].d[m] - G[m][s][r].d[n];
          for (std::size_t l = 0; l < 3; ++l) std_r += G[m][l][r].v * G[n][s][l].v - G[n][l][r].v * G[m][s][l].v;
          out[m][n][s][r] = -std_r;
        }
  return out;
}

struct ChartRicci {
  Mat3<double> rho;
  double r;
};

inline ChartRicci chart_ricci(const Mat3<Jet2> &g) {
  ChartRicci out{};
  out.rho = ricci_contraction(chart_riemann(g));
  Mat3<double> gv;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) gv[i][j] = g[i][j].value();
  const Mat3<double> ginv = inverse(gv);
  out.r = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out.r += ginv[i][j] * out.rho[j][i];
  return out;
}

inline ChartRicci chart_ricci(const ChartMetricField &field, const ChartPoint &p) { return chart_ricci(field.at(p)); }

/// Metric g = W^T G W of a realized frame, where W is the coframe (inverse frame matrix).
inline Mat3<Jet2> metric_from_frame(const FrameRealization &r, const ChartPoint &p, const Bindings &env) {
  const RealizedFrame f = realize(r, p, env);
  Mat3<Jet2> v;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t a = 0; a < 3; ++a) v[a][i] = f.fields[i][a];
  const double d = det(f.matrix());
  if (!(std::abs(d) >= kFrameDetTolerance)) throw FrameNotInvertible("realized frame is degenerate");
  const Mat3<Jet2> w = inverse(v);
  Mat3<Jet2> g;
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = 0; b < 3; ++b) {
      Jet2 s(0.0);
      for (std::size_t i = 0; i < 3; ++i) s += Jet2(kFrameSignature[i]) * w[i][a] * w[i][b];
      g[a][b] = s;
    }
  return g;
}

/// Frame bilinear form rewritten in coordinates: out = W^T q W.
inline Mat3<double> push_to_coordinates(const Mat3<double> &q_frame, const Mat3<double> &frame_matrix) {
  const Mat3<double> w = inverse(frame_matrix);
  return transpose(w) * q_frame * w;
}

} // namespace ppc
