#pragma once

/**
 * @file normal.hpp
 * @brief Normal almost paracontact metric three-manifolds (a1 = a2 = 0).
 *
 * Structure equations, harmonic/affine-Killing conditions, Ricci data and
 * the Ricci-soliton system. A normal soliton with lambda != 0 has b1 = 0 and
 * constant curvature -b2^2; lambda = 0 leaves the steady system.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ppc/errors.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/invariants.hpp"
#include "ppc/linalg.hpp"

namespace ppc {

inline constexpr double kNormalTolerance = 1e-10;

/// Left-hand sides of the normal Jacobi system.
inline Vec3<double> normal_jacobi_residual(const StructureFunctions<FrameDual> &s) {
  const FrameDual a3b2 = s.a3 - s.b2;
  const double b1 = s.b1.v, b2 = s.b2.v, a4 = s.a4.v, a5 = s.a5.v;
  return {s.b2.xi() + 2.0 * b1 * b2,
          -s.a4.xi() + a3b2.e() + s.b1.phie() - b1 * a4 + a5 * a3b2.v,
          s.a5.xi() - s.b1.e() - a3b2.phie() + b1 * a5 - a4 * a3b2.v};
}

inline Vec3<double> normal_jacobi_residual(const NormalFrameSpec &spec, const ChartPoint &p) {
  return normal_jacobi_residual(sample(spec, p));
}

/// xi(b1) + 2 b1^2: vanishes iff xi is an infinitesimal harmonic transformation.
inline double normal_iht_residual(const StructureFunctions<FrameDual> &s) { return s.b1.xi() + 2.0 * s.b1.v * s.b1.v; }

inline double normal_iht_residual(const NormalFrameSpec &spec, const ChartPoint &p) {
  return normal_iht_residual(sample(spec, p));
}

enum class AffineKillingVerdict { killing, not_affine_killing };
enum class NormalClass { quasi_para_sasakian, para_cosymplectic, undecided };

inline const char *to_string(AffineKillingVerdict v) {
  return v == AffineKillingVerdict::killing ? "killing" : "not_affine_killing";
}
inline const char *to_string(NormalClass c) {
  switch (c) {
  case NormalClass::quasi_para_sasakian: return "quasi_para_sasakian";
  case NormalClass::para_cosymplectic: return "para_cosymplectic";
  case NormalClass::undecided: return "undecided";
  }
  return "?";
}

struct NormalAffineKilling {
  AffineKillingVerdict verdict = AffineKillingVerdict::not_affine_killing;
  std::optional<NormalClass> cls; ///< set when killing
  double residual = 0.0;          ///< max of |xi(b1)|, |xi(b2)|, |xi(b1) + 2 b1^2|
  ChartPoint worst_point{};
};

inline NormalAffineKilling normal_affine_killing(const NormalFrameSpec &spec, const std::vector<ChartPoint> &points,
                                                 double tol = kNormalTolerance) {
  NormalAffineKilling out;
  int positive = 0, negative = 0, zero = 0;
  for (const ChartPoint &p : points) {
    const auto s = sample(spec, p);
    const double r = std::max({std::abs(s.b1.xi()), std::abs(s.b2.xi()), std::abs(normal_iht_residual(s))});
    if (r > out.residual || &p == &points.front()) {
      out.residual = r;
      out.worst_point = p;
    }
    if (std::abs(s.b2.v) <= tol) ++zero;
    else if (s.b2.v > 0) ++positive;
    else ++negative;
  }
  if (out.residual > tol) return out;
  out.verdict = AffineKillingVerdict::killing;
  const int n = static_cast<int>(points.size());
  if (zero == n) out.cls = NormalClass::para_cosymplectic;
  else if (positive == n || negative == n) out.cls = NormalClass::quasi_para_sasakian;
  else out.cls = NormalClass::undecided;
  return out;
}

struct NormalRicciData {
  double A_tilde;
  double B_tilde;
  Mat3<double> rho;
  double r;
};

inline NormalRicciData normal_ricci(const StructureFunctions<FrameDual> &s) {
  const double b1 = s.b1.v, b2 = s.b2.v, a3 = s.a3.v, a4 = s.a4.v, a5 = s.a5.v;
  NormalRicciData d{};
  d.A_tilde = s.b1.xi() + b1 * b1 + b2 * b2;
  d.B_tilde = s.a4.phie() - s.a5.e() + a4 * a4 - a5 * a5 - b1 * b1 + b2 * b2 + 2.0 * b2 * a3;
  d.r = 2.0 * (d.B_tilde - 2.0 * d.A_tilde);
  d.rho = zero_mat<double>();
  d.rho[0][0] = -2.0 * d.A_tilde;
  d.rho[0][1] = d.rho[1][0] = s.b2.phie() - s.b1.e();
  d.rho[0][2] = d.rho[2][0] = s.b2.e() - s.b1.phie();
  d.rho[1][1] = d.B_tilde - d.A_tilde;
  d.rho[2][2] = d.A_tilde - d.B_tilde;
  return d;
}

inline NormalRicciData normal_ricci(const NormalFrameSpec &spec, const ChartPoint &p) {
  return normal_ricci(sample(spec, p));
}

/// Ricci tensor written through r instead of B~ (B~ = 2A~ + r/2).
inline Mat3<double> normal_ricci_reduced(const StructureFunctions<FrameDual> &s, double A, double r) {
  Mat3<double> rho = zero_mat<double>();
  rho[0][0] = -2.0 * A;
  rho[0][1] = rho[1][0] = s.b2.phie() - s.b1.e();
  rho[0][2] = rho[2][0] = s.b2.e() - s.b1.phie();
  rho[1][1] = A + 0.5 * r;
  rho[2][2] = -A - 0.5 * r;
  return rho;
}

/// (L_xi g) for a normal structure: diag(0, 2 b1, -2 b1).
inline Mat3<double> normal_lie_metric(double b1) {
  Mat3<double> l = zero_mat<double>();
  l[1][1] = 2.0 * b1;
  l[2][2] = -2.0 * b1;
  return l;
}

enum class NormalSolitonVerdict { trivial_unsteady, steady, not_soliton };

inline const char *to_string(NormalSolitonVerdict v) {
  switch (v) {
  case NormalSolitonVerdict::trivial_unsteady: return "trivial_unsteady";
  case NormalSolitonVerdict::steady: return "steady";
  case NormalSolitonVerdict::not_soliton: return "not_soliton";
  }
  return "?";
}

struct NormalSolitonReport {
  NormalSolitonVerdict verdict = NormalSolitonVerdict::not_soliton;
  double lambda = 0.0;
  std::string reason;
  double algebra_residual = 0.0;  ///< max |lambda - 2(b1^2 - b2^2)|, |lambda b1|
  double system_residual = 0.0;   ///< max over the four soliton equations
  double iht_residual = 0.0;
  double max_abs_b1 = 0.0;
  std::optional<double> k;        ///< sectional curvature, trivial_unsteady only
  std::optional<double> einstein_residual; ///< max |rho - 2kG|
  std::optional<int> epsilon;     ///< b2 = eps b1, steady only
  std::optional<double> steady_residual;
  ChartPoint worst_point{};
};

namespace detail {
inline void track(double v, double &slot, const ChartPoint &p, ChartPoint &where, double &global) {
  slot = std::max(slot, std::abs(v));
  if (std::abs(v) > global) {
    global = std::abs(v);
    where = p;
  }
}
} // namespace detail

/// Decides the normal Ricci-soliton system L_xi g + rho = lambda g.
inline NormalSolitonReport normal_soliton_check(const NormalFrameSpec &spec, double lambda,
                                                const std::vector<ChartPoint> &points,
                                                double tol = kNormalTolerance) {
  NormalSolitonReport rep;
  rep.lambda = lambda;
  double global = 0.0;
  std::vector<StructureFunctions<FrameDual>> samples;
  samples.reserve(points.size());
  for (const ChartPoint &p : points) samples.push_back(sample(spec, p));

  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto &s = samples[i];
    const double b1 = s.b1.v, b2 = s.b2.v;
    detail::track(lambda - 2.0 * (b1 * b1 - b2 * b2), rep.algebra_residual, points[i], rep.worst_point, global);
    detail::track(lambda * b1, rep.algebra_residual, points[i], rep.worst_point, global);
    rep.max_abs_b1 = std::max(rep.max_abs_b1, std::abs(b1));
  }
  if (rep.algebra_residual > tol) {
    rep.reason = "lambda = 2(b1^2 - b2^2) and lambda b1 = 0 fail";
    return rep;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double r = normal_iht_residual(samples[i]);
    rep.iht_residual = std::max(rep.iht_residual, std::abs(r));
    if (std::abs(r) > tol)
      throw PreconditionViolated("xi is not an infinitesimal harmonic transformation at " + describe(points[i]),
                                 std::abs(r));
  }
  global = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto &s = samples[i];
    const NormalRicciData d = normal_ricci(s);
    const ChartPoint &p = points[i];
    detail::track(lambda + 2.0 * d.A_tilde, rep.system_residual, p, rep.worst_point, global);
    detail::track(2.0 * s.b1.v + d.A_tilde + 0.5 * d.r - lambda, rep.system_residual, p, rep.worst_point, global);
    detail::track(s.b2.phie() - s.b1.e(), rep.system_residual, p, rep.worst_point, global);
    detail::track(s.b2.e() - s.b1.phie(), rep.system_residual, p, rep.worst_point, global);
  }
  if (rep.system_residual > tol) {
    rep.reason = "soliton system fails";
    return rep;
  }

  if (std::abs(lambda) > tol) {
    if (rep.max_abs_b1 > tol) {
      rep.reason = "lambda != 0 requires b1 = 0";
      return rep;
    }
    const Mat3<double> G = frame_metric_matrix();
    const double b2 = samples.front().b2.v;
    rep.k = -b2 * b2;
    double einstein = 0.0;
    for (const auto &s : samples) {
      const double k = -s.b2.v * s.b2.v;
      einstein = std::max(einstein, max_abs(normal_ricci(s).rho - (2.0 * k) * G));
      einstein = std::max(einstein, std::abs(k - *rep.k));
    }
    rep.einstein_residual = einstein;
    if (einstein > tol) {
      rep.reason = "Ricci tensor is not Einstein with k = -b2^2";
      return rep;
    }
    rep.verdict = NormalSolitonVerdict::trivial_unsteady;
    return rep;
  }

  // steady: b2 = eps b1, xi(b1) = -2 b1^2, r = -4 b1, (e - eps phi e)(b1) = 0
  std::optional<int> eps;
  for (const auto &s : samples)
    if (std::abs(s.b1.v) >= kParaSasakianLocus) {
      const int e = s.b2.v / s.b1.v >= 0.0 ? 1 : -1;
      if (eps && *eps != e) {
        rep.reason = "epsilon changes over the sample set";
        return rep;
      }
      eps = e;
    }
  const int e = eps.value_or(1);
  double steady = 0.0;
  for (const auto &s : samples) {
    const NormalRicciData d = normal_ricci(s);
    steady = std::max({steady, std::abs(s.b2.v - e * s.b1.v) / std::max(1.0, std::abs(s.b1.v)),
                       std::abs(s.b1.xi() + 2.0 * s.b1.v * s.b1.v), std::abs(d.r + 4.0 * s.b1.v),
                       std::abs(s.b1.e() - e * s.b1.phie())});
  }
  rep.epsilon = e;
  rep.steady_residual = steady;
  if (steady > tol) {
    rep.reason = "steady system fails";
    return rep;
  }
  rep.verdict = NormalSolitonVerdict::steady;
  return rep;
}

/// f in L_xi g = f g restricted to the (xi, xi) slot; always 0 for normal structures.
inline double conformal_factor(const StructureFunctions<FrameDual> &s) {
  const Mat3<double> l = lie_metric_from_connection(connection_table(s.values()));
  return l[0][0];
}

inline double conformal_factor(const NormalFrameSpec &spec, const ChartPoint &p) {
  return conformal_factor(sample(spec, p));
}

enum class FlatVerdict { flat, constant_curvature, not_applicable, not_flat };

inline const char *to_string(FlatVerdict v) {
  switch (v) {
  case FlatVerdict::flat: return "flat";
  case FlatVerdict::constant_curvature: return "constant_curvature";
  case FlatVerdict::not_applicable: return "not_applicable";
  case FlatVerdict::not_flat: return "not_flat";
  }
  return "?";
}

struct FlatCorollary {
  FlatVerdict verdict = FlatVerdict::not_applicable;
  std::optional<double> k;
  double xi_r = 0.0; ///< max |xi(r)|
  std::string reason;
};

/// Corollary for normal solitons: a steady one with xi(r) = 0 is flat; an unsteady one has k = -b2^2 <= 0.
inline FlatCorollary normal_flat_corollary(const NormalFrameSpec &spec, double lambda,
                                           const std::vector<ChartPoint> &points, double tol = kNormalTolerance) {
  const NormalSolitonReport rep = normal_soliton_check(spec, lambda, points, tol);
  FlatCorollary out;
  if (rep.verdict == NormalSolitonVerdict::not_soliton) {
    out.reason = "not a soliton: " + rep.reason;
    return out;
  }
  if (rep.verdict == NormalSolitonVerdict::trivial_unsteady) {
    out.k = rep.k;
    out.verdict = FlatVerdict::constant_curvature;
    return out;
  }
  // r = -4 b1 on the steady branch, so xi(r) = -4 xi(b1)
  double b = 0.0;
  for (const ChartPoint &p : points) {
    const auto s = sample(spec, p);
    out.xi_r = std::max(out.xi_r, std::abs(-4.0 * s.b1.xi()));
    b = std::max({b, std::abs(s.b1.v), std::abs(s.b2.v)});
  }
  if (out.xi_r > tol) {
    out.reason = "xi(r) != 0";
    return out;
  }
  out.verdict = b <= tol ? FlatVerdict::flat : FlatVerdict::not_flat;
  if (out.verdict == FlatVerdict::flat) out.k = 0.0;
  return out;
}

} // namespace ppc
