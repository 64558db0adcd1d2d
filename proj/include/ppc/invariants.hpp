#pragma once

/**
 * @file invariants.hpp
 * @brief Ricci solitons, (kappa, mu) detection and Segre types for paracontact structures.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/linalg.hpp"

namespace ppc {

inline constexpr double kSolitonTolChart = 1e-9;
inline constexpr double kSolitonTolLieGroup = 1e-12;
inline constexpr double kSegreTolerance = 1e-10;

inline double default_soliton_tolerance(Mode m) { return m == Mode::chart ? kSolitonTolChart : kSolitonTolLieGroup; }

inline Mat3<double> frame_metric_matrix() {
  Mat3<double> g = zero_mat<double>();
  for (std::size_t i = 0; i < 3; ++i) g[i][i] = kFrameSignature[i];
  return g;
}

enum class SolitonVerdict { soliton, not_soliton, precondition_failed };

inline const char *to_string(SolitonVerdict v) {
  switch (v) {
  case SolitonVerdict::soliton: return "soliton";
  case SolitonVerdict::not_soliton: return "not_soliton";
  case SolitonVerdict::precondition_failed: return "precondition_failed";
  }
  return "?";
}

struct SolitonReport {
  double lambda = -2.0;        ///< forced value
  double best_lambda = 0.0;    ///< (1/3) tr(G^{-1}(L_xi g + rho)) at the worst point
  Mat3<double> residual_matrix{};
  double residual_norm = 0.0;  ///< max over points of max |L_xi g + rho + 2G|
  double scalar_curvature = 0.0;
  double A_value = 0.0;
  double A_defect = 0.0;       ///< max |A - 2 a1|
  double r_defect = 0.0;       ///< max |r + 6|
  double iht_residual = 0.0;   ///< worst harmonic-transformation residual
  ChartPoint worst_point{};
  int epsilon = 1;
  double tolerance = 0.0;
  SolitonVerdict verdict = SolitonVerdict::not_soliton;
  std::string reason;
};

/// Checks L_xi g + rho = lambda g with lambda = -2 at every point.
inline SolitonReport soliton_check(const ParacontactFrameSpec &spec, const std::vector<ChartPoint> &points,
                                   std::optional<double> tol = std::nullopt) {
  SolitonReport rep;
  rep.tolerance = tol.value_or(default_soliton_tolerance(spec.mode()));
  const Mat3<double> G = frame_metric_matrix();
  std::optional<int> eps_seen;
  bool first = true;
  for (const ChartPoint &p : points) {
    const auto s = sample(spec, p);
    const IhtCheck chk = iht_check(spec, s);
    rep.iht_residual = std::max(rep.iht_residual, chk.worst());
    if (chk.worst() > rep.tolerance) {
      rep.verdict = SolitonVerdict::precondition_failed;
      rep.worst_point = p;
      rep.reason = chk.epsilon_defect > rep.tolerance ? "a2 != eps*a1" : "harmonic-transformation system fails";
      return rep;
    }
    if (std::abs(s.a1.v) >= kParaSasakianLocus) {
      if (eps_seen && *eps_seen != chk.epsilon) {
        rep.verdict = SolitonVerdict::precondition_failed;
        rep.worst_point = p;
        rep.reason = "epsilon changes over the sample set";
        return rep;
      }
      eps_seen = chk.epsilon;
    }
    const IhtRicci ric = ricci_iht_unchecked(s, chk.epsilon);
    const Mat3<double> lg = lie_metric(s.values());
    const Mat3<double> res = lg + ric.rho + 2.0 * G;
    const double norm = max_abs(res);
    rep.A_defect = std::max(rep.A_defect, std::abs(ric.A - 2.0 * s.a1.v));
    rep.r_defect = std::max(rep.r_defect, std::abs(ric.r + 6.0));
    if (first || norm > rep.residual_norm) {
      first = false;
      rep.residual_norm = norm;
      rep.residual_matrix = res;
      rep.worst_point = p;
      rep.scalar_curvature = ric.r;
      rep.A_value = ric.A;
      rep.epsilon = chk.epsilon;
      const Mat3<double> m = lg + ric.rho;
      rep.best_lambda = (m[0][0] + m[1][1] - m[2][2]) / 3.0;
    }
  }
  if (eps_seen) rep.epsilon = *eps_seen;
  const bool ok = rep.residual_norm <= rep.tolerance && rep.A_defect <= rep.tolerance && rep.r_defect <= rep.tolerance;
  rep.verdict = ok ? SolitonVerdict::soliton : SolitonVerdict::not_soliton;
  if (!ok) rep.reason = "soliton system residual exceeds tolerance";
  return rep;
}

// ---------------------------------------------------------------------------
// (kappa, mu)
// ---------------------------------------------------------------------------

struct KappaMu {
  double kappa = -1.0;
  std::optional<double> mu;
  bool nilpotent_h = false;
  /// max deviation of R(X,Y)xi from the (kappa, mu) form; absent on the locus a1 = 0 when mu is undetermined.
  std::optional<double> curvature_residual;
};

inline KappaMu kappa_mu_detect(const ParacontactFrameSpec &spec, const ChartPoint &p, double tol = 1e-9) {
  const IhtRicci ric = ricci_iht(spec, p, tol);
  const auto s = sample(spec, p);
  const double a1 = s.a1.v, a2 = s.a2.v;
  KappaMu km;
  km.kappa = -1.0;
  const HTensor h = h_tensor(a1, a2);
  km.nilpotent_h = std::abs(h.trace_h2) <= tol * std::max(1.0, a1 * a1);
  if (std::abs(a1) < kParaSasakianLocus) return km;
  km.mu = -ric.epsilon * ric.A / a1;

  // R(E_i,E_j)xi = kappa (eta(E_i)E_j - eta(E_j)E_i) + mu (eta(E_i) hE_j - eta(E_j) hE_i)
  const Riemann R = frame_curvature(s);
  double worst = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t n = 0; n < 3; ++n) {
        const double di = i == 0 ? 1.0 : 0.0, dj = j == 0 ? 1.0 : 0.0;
        const double ej = j == n ? 1.0 : 0.0, ei = i == n ? 1.0 : 0.0;
        const double expect = km.kappa * (di * ej - dj * ei) + *km.mu * (di * h.matrix[n][j] - dj * h.matrix[n][i]);
        worst = std::max(worst, std::abs(R[i][j][0][n] - expect));
      }
  km.curvature_residual = worst;
  return km;
}

// ---------------------------------------------------------------------------
// Segre classification of the Ricci operator
// ---------------------------------------------------------------------------

enum class SegreLabel { diag_distinct, diag_repeated, complex_pair, segre_21, segre_degenerate_21, segre_3 };

inline const char *to_string(SegreLabel l) {
  switch (l) {
  case SegreLabel::diag_distinct: return "diag_distinct";
  case SegreLabel::diag_repeated: return "diag_repeated";
  case SegreLabel::complex_pair: return "complex_pair";
  case SegreLabel::segre_21: return "segre_21";
  case SegreLabel::segre_degenerate_21: return "segre_degenerate_21";
  case SegreLabel::segre_3: return "segre_3";
  }
  return "?";
}

/// Segre symbol in the usual bracket notation.
inline const char *segre_symbol(SegreLabel l) {
  switch (l) {
  case SegreLabel::diag_distinct: return "{111}";
  case SegreLabel::diag_repeated: return "{(11)1}";
  case SegreLabel::complex_pair: return "{z zbar 1}";
  case SegreLabel::segre_21: return "{21}";
  case SegreLabel::segre_degenerate_21: return "{(21)}";
  case SegreLabel::segre_3: return "{3}";
  }
  return "?";
}

struct SegreType {
  SegreLabel label = SegreLabel::diag_distinct;
  std::vector<double> eigenvalues; ///< real eigenvalues with multiplicity, ascending
  std::optional<std::array<double, 2>> complex_pair; ///< (re, im) of the conjugate pair
  int rank = 0;      ///< rank of Q - lambda I for the repeated eigenvalue, when there is one
  bool warning = false;
};

namespace detail {

inline int numeric_rank(const Mat3<double> &m, double scale) {
  const double norm = max_abs(m);
  if (norm <= kSegreTolerance * scale) return 0;
  double minor = 0.0;
  for (std::size_t r0 = 0; r0 < 3; ++r0)
    for (std::size_t r1 = r0 + 1; r1 < 3; ++r1)
      for (std::size_t c0 = 0; c0 < 3; ++c0)
        for (std::size_t c1 = c0 + 1; c1 < 3; ++c1)
          minor = std::max(minor, std::abs(m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]));
  if (minor <= 1e-8 * norm * norm) return 1;
  if (std::abs(det(m)) <= 1e-8 * norm * norm * norm) return 2;
  return 3;
}

inline Mat3<double> shifted(const Mat3<double> &q, double lambda) {
  Mat3<double> m = q;
  for (std::size_t i = 0; i < 3; ++i) m[i][i] -= lambda;
  return m;
}

} // namespace detail

/// Classifies Q = G^{-1} rho from its characteristic cubic.
inline SegreType segre_classify(const Mat3<double> &rho) {
  Mat3<double> q;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) q[i][j] = kFrameSignature[i] * rho[i][j];
  const double scale = std::max(1.0, max_abs(q));
  Mat3<double> qs;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) qs[i][j] = q[i][j] / scale;

  // t^3 - c2 t^2 + c1 t - c0, depressed with t = s + c2/3 to s^3 + P s + R
  const double c2 = trace(qs);
  const double c1 = qs[0][0] * qs[1][1] - qs[0][1] * qs[1][0] + qs[0][0] * qs[2][2] - qs[0][2] * qs[2][0] +
                    qs[1][1] * qs[2][2] - qs[1][2] * qs[2][1];
  const double c0 = det(qs);
  const double P = c1 - c2 * c2 / 3.0;
  const double R = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
  const double disc = -(4.0 * P * P * P + 27.0 * R * R);
  const double shift = c2 / 3.0;
  const double tol = kSegreTolerance;
  const double near = 1e3;

  SegreType out;
  if (std::abs(P) <= tol && std::abs(R) <= tol) {
    const double lambda = shift * scale;
    out.eigenvalues = {lambda, lambda, lambda};
    out.rank = detail::numeric_rank(detail::shifted(q, lambda), scale);
    out.label = out.rank == 0 ? SegreLabel::diag_repeated
                              : (out.rank == 1 ? SegreLabel::segre_degenerate_21 : SegreLabel::segre_3);
    out.warning = std::max(std::abs(P), std::abs(R)) > tol / near;
    return out;
  }
  if (std::abs(disc) <= tol) {
    const double sd = -1.5 * R / P, ss = 3.0 * R / P;
    const double ld = (sd + shift) * scale, ls = (ss + shift) * scale;
    out.eigenvalues = {ld, ld, ls};
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.rank = detail::numeric_rank(detail::shifted(q, ld), scale);
    out.label = out.rank <= 1 ? SegreLabel::diag_repeated : SegreLabel::segre_21;
    out.warning = std::abs(disc) > tol / near;
    return out;
  }
  out.warning = std::abs(disc) <= tol * near;
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-P / 3.0);
    const double arg = std::clamp(3.0 * R / (P * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      out.eigenvalues.push_back((m * std::cos(theta - 2.0 * M_PI * k / 3.0) + shift) * scale);
    std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
    out.label = SegreLabel::diag_distinct;
    return out;
  }
  // one real root and a conjugate pair (Cardano)
  const double sq = std::sqrt(R * R / 4.0 + P * P * P / 27.0);
  const double u = std::cbrt(-R / 2.0 + sq), v = std::cbrt(-R / 2.0 - sq);
  out.eigenvalues = {(u + v + shift) * scale};
  out.complex_pair = std::array<double, 2>{(-(u + v) / 2.0 + shift) * scale, std::abs(u - v) * std::sqrt(3.0) / 2.0 * scale};
  out.label = SegreLabel::complex_pair;
  return out;
}

// ---------------------------------------------------------------------------
// Homogeneous soliton family
// ---------------------------------------------------------------------------

/// Left-invariant structure with a2 = a1, a3 = 1, a4 = a5 = 0 (Lie algebra sl(2,R)).
inline ParacontactFrameSpec homogeneous_soliton(double a1) {
  if (a1 == 0.0) throw ZeroParameter("a1 must be nonzero (a1 = 0 is paraSasakian)");
  return constant_paracontact(a1, a1, 1.0, 0.0, 0.0, 1);
}

/// Dimension of the span of the brackets [E_i,E_j]; 3 means the derived algebra is everything.
inline int derived_algebra_rank(const Tensor3<double> &c) {
  const Mat3<double> m{{c[0][1], c[0][2], c[1][2]}};
  return detail::numeric_rank(m, std::max(1.0, max_abs(m)));
}

} // namespace ppc
