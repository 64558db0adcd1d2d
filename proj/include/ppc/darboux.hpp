#pragma once

/**
 * @file darboux.hpp
 * @brief Paracontact metric structures in Darboux coordinates.
 *
 * In a Darboux chart eta = (dz - y dx)/2 and xi = 2 d/dz; the structure is
 * fixed by three functions a, b, c with ac - b^2 - c y^2 = -1. Matrices act
 * on coordinate columns, (phi v)^i = phi[i][j] v^j.
 */

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ppc/chart.hpp"
#include "ppc/errors.hpp"
#include "ppc/expr.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/jet.hpp"
#include "ppc/linalg.hpp"

namespace ppc {

inline constexpr double kConstraintTolerance = 1e-10;
inline constexpr double kHomogeneityThreshold = 1e-7;

struct DarbouxStructure {
  Expr a, b, c;
  Bindings env;

  static constexpr Vec3<double> xi{0.0, 0.0, 2.0};

  static Vec3<double> eta(const ChartPoint &p) { return {-0.5 * p.y, 0.0, 0.5}; }

  /// ac - b^2 - c y^2 + 1, zero on a valid structure.
  double constraint(const ChartPoint &p) const {
    const double av = eval_jet(a, p, env).value(), bv = eval_jet(b, p, env).value(),
                 cv = eval_jet(c, p, env).value();
    return av * cv - bv * bv - cv * p.y * p.y + 1.0;
  }

  /// g = (1/4)[[a, b, -y], [b, c, 0], [-y, 0, 1]] as expressions.
  ChartMetricField metric_field() const {
    const Expr q = Expr::number(0.25);
    const Expr zero = Expr::number(0.0);
    const Expr my = Expr::number(-0.25) * Expr::ident("y");
    ChartMetricField f;
    f.entries = {{{q * a, q * b, my}, {q * b, q * c, zero}, {my, zero, q}}};
    f.env = env;
    return f;
  }

  Mat3<Jet2> metric(const ChartPoint &p) const { return metric_field().at(p); }

  Mat3<Jet2> phi(const ChartPoint &p) const {
    const Jet2 aj = eval_jet(a, p, env), bj = eval_jet(b, p, env), cj = eval_jet(c, p, env);
    const Jet2 y = jet_seed(p, Coord::y);
    const Jet2 zero(0.0);
    return {{{-bj, -cj, zero}, {aj - y * y, bj, zero}, {-(bj * y), -(cj * y), zero}}};
  }
};

inline Mat3<double> values(const Mat3<Jet2> &m) {
  Mat3<double> out;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) out[i][j] = m[i][j].value();
  return out;
}

/// Builds a structure after checking the defining constraint at the given points.
inline DarbouxStructure build_darboux(const Expr &a, const Expr &b, const Expr &c, Bindings env,
                                      const std::vector<ChartPoint> &points) {
  validate_bindings(env);
  DarbouxStructure d{a, b, c, std::move(env)};
  double worst = 0.0;
  std::optional<ChartPoint> at;
  for (const ChartPoint &p : points) {
    const double r = std::abs(d.constraint(p));
    if (!(r <= worst)) {
      worst = r;
      at = p;
    }
  }
  if (at && !(worst <= kConstraintTolerance))
    throw ConstraintViolated("ac - b^2 - c y^2 != -1 at " + describe(*at), worst);
  return d;
}

struct AxiomResiduals {
  double phi_squared = 0;   ///< phi^2 - Id + xi (x) eta
  double phi_xi = 0;        ///< phi xi
  double eta_phi = 0;       ///< eta o phi
  double eta_xi = 0;        ///< eta(xi) - 1
  double g_xi_xi = 0;       ///< g(xi, xi) - 1
  double eta_dual = 0;      ///< g(xi, .) - eta
  double compatibility = 0; ///< g(phi., phi.) + g - eta (x) eta
  double contact = 0;       ///< g(., phi .) - d eta

  double worst() const {
    return std::max({phi_squared, phi_xi, eta_phi, eta_xi, g_xi_xi, eta_dual, compatibility, contact});
  }

  std::map<std::string, double> as_map() const {
    return {{"compatibility", compatibility}, {"contact", contact},   {"eta_dual", eta_dual},
            {"eta_phi", eta_phi},             {"eta_xi", eta_xi},     {"g_xi_xi", g_xi_xi},
            {"phi_squared", phi_squared},     {"phi_xi", phi_xi}};
  }
};

/// Axioms of a paracontact metric structure from its pointwise matrices.
inline AxiomResiduals axioms_residuals(const Mat3<double> &g, const Mat3<double> &phi, const Vec3<double> &xi,
                                       const Vec3<double> &eta, const Mat3<double> &deta) {
  AxiomResiduals r;
  Mat3<double> proj = identity_mat<double>();
  Mat3<double> etaeta;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      proj[i][j] -= xi[i] * eta[j];
      etaeta[i][j] = eta[i] * eta[j];
    }
  r.phi_squared = max_abs(phi * phi - proj);
  r.phi_xi = max_abs(phi * xi);
  Vec3<double> ep{};
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t i = 0; i < 3; ++i) ep[j] += eta[i] * phi[i][j];
  r.eta_phi = max_abs(ep);
  double ex = 0.0, gxx = 0.0;
  for (std::size_t i = 0; i < 3; ++i) ex += eta[i] * xi[i];
  const Vec3<double> gxi = g * xi;
  for (std::size_t i = 0; i < 3; ++i) gxx += xi[i] * gxi[i];
  r.eta_xi = std::abs(ex - 1.0);
  r.g_xi_xi = std::abs(gxx - 1.0);
  r.eta_dual = std::max({std::abs(gxi[0] - eta[0]), std::abs(gxi[1] - eta[1]), std::abs(gxi[2] - eta[2])});
  r.compatibility = max_abs(transpose(phi) * g * phi + g - etaeta);
  r.contact = max_abs(g * phi - deta);
  return r;
}

/// d eta_ij = (d_i eta_j - d_j eta_i)/2 for the Darboux contact form.
inline Mat3<double> contact_differential(const ChartPoint &p) {
  const Jet2 y = jet_seed(p, Coord::y);
  const Vec3<Jet2> eta{Jet2(-0.5) * y, Jet2(0.0), Jet2(0.5)};
  Mat3<double> d;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) d[i][j] = 0.5 * (eta[j].grad(i) - eta[i].grad(j));
  return d;
}

inline AxiomResiduals axioms_check(const DarbouxStructure &d, const ChartPoint &p) {
  return axioms_residuals(values(d.metric(p)), values(d.phi(p)), DarbouxStructure::xi, DarbouxStructure::eta(p),
                          contact_differential(p));
}

struct HMatrices {
  Mat3<double> h;
  Mat3<double> h2;
  double generic_defect; ///< |closed form - (1/2) L_xi phi|
  double nilpotency;     ///< b_z^2 - a_z c_z
  bool para_sasakian;
  bool nilpotent;
};

inline HMatrices h_matrices(const DarbouxStructure &d, const ChartPoint &p, double tol = 1e-10) {
  const double az = eval_jet(d.a, p, d.env).grad(2), bz = eval_jet(d.b, p, d.env).grad(2),
               cz = eval_jet(d.c, p, d.env).grad(2);
  HMatrices out{};
  out.h = {{{-bz, -cz, 0.0}, {az, bz, 0.0}, {-bz * p.y, -cz * p.y, 0.0}}};
  out.h2 = out.h * out.h;
  // xi = 2 d/dz has constant components, so (1/2) L_xi phi = d phi / dz
  const Mat3<Jet2> phi = d.phi(p);
  double defect = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) defect = std::max(defect, std::abs(out.h[i][j] - phi[i][j].grad(2)));
  out.generic_defect = defect;
  out.nilpotency = bz * bz - az * cz;
  out.para_sasakian = std::max({std::abs(az), std::abs(bz), std::abs(cz)}) <= tol;
  out.nilpotent = std::abs(out.nilpotency) <= tol;
  return out;
}

/// L_xi g + rho + 2 g in coordinates, with rho from the chart oracle.
inline Mat3<double> darboux_soliton_residual(const DarbouxStructure &d, const ChartPoint &p) {
  const Mat3<Jet2> g = d.metric(p);
  const ChartRicci ric = chart_ricci(g);
  Mat3<double> r;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) r[i][j] = 2.0 * g[i][j].grad(2) + ric.rho[i][j] + 2.0 * g[i][j].value();
  return r;
}

// ---------------------------------------------------------------------------
// The inhomogeneous example family F = f(x) + alpha e^{2z} + beta y + gamma
// ---------------------------------------------------------------------------

struct ExampleStructure {
  DarbouxStructure darboux;
  ParacontactFrameSpec frame;
  Expr F;
};

inline Expr example_F(const Expr &f) { return f + parse("alpha*exp(2*z) + beta*y + gamma"); }

/// E and phi E of the global phi-basis, as coordinate components.
inline std::array<Vec3<Expr>, 2> example_basis(const Expr &F) {
  auto sub = [&F](const char *s) { return parse(s).substitute("F", F); };
  return {Vec3<Expr>{sub("4/sqrt(2)"), sub("(2*y^2 - 2*F + 1)/sqrt(2)"), sub("4*y/sqrt(2)")},
          Vec3<Expr>{sub("-4/sqrt(2)"), sub("(1 - 2*y^2 + 2*F)/sqrt(2)"), sub("-4*y/sqrt(2)")}};
}

inline ExampleStructure example_structure(double alpha, double beta, double gamma, const Expr &f) {
  if (alpha == 0.0) throw ZeroParameter("alpha must be nonzero (alpha = 0 is paraSasakian)");
  for (const std::string &id : f.identifiers())
    if (is_coordinate(id) && id != "x") throw SchemaError("f must depend on x only, found '" + id + "'");
  Bindings env{{"alpha", alpha}, {"beta", beta}, {"gamma", gamma}};
  for (const std::string &id : f.identifiers())
    if (!is_coordinate(id) && !env.count(id)) throw UnboundIdentifier("f uses unbound identifier '" + id + "'");
  const Expr F = example_F(f);
  DarbouxStructure d{F, Expr::number(1.0), Expr::number(0.0), env};

  const auto basis = example_basis(F);
  FrameRealization r{{Vec3<Expr>{Expr::number(0.0), Expr::number(0.0), Expr::number(2.0)}, basis[0], basis[1]}};
  const Expr a1 = parse("4*alpha*exp(2*z)");
  const Expr a4 = parse("sqrt(2)*(beta - 2*y)");
  ParacontactFrameSpec spec(a1, a1, Expr::number(-1.0), a4, -a4, Mode::chart, r, env, 1);
  return {d, spec, F};
}

// ---------------------------------------------------------------------------
// Homogeneity probe
// ---------------------------------------------------------------------------

struct ProbeRow {
  ChartPoint point;
  Tensor3<double> brackets; ///< frame coefficients of [xi,e], [xi,phi e], [e,phi e] in slots [0][1], [0][2], [1][2]
  double pq_defect;         ///< |p^2 - q^2 - 1|
};

struct ProbeResult {
  std::vector<ProbeRow> rows;
  double variation = 0.0;
  double max_pq_defect = 0.0;
  bool homogeneous = false;
};

/// Frame e = pE + q phi E, phi e = qE + p phi E with the gauge p, q fixed by C.
inline FrameRealization rotated_frame(const Expr &F, double C) {
  const Expr Cx = Expr::number(C);
  const Expr half = Expr::number(0.5);
  const Expr ez = parse("exp(z)"), emz = parse("exp(-z)");
  const Expr p = half * (ez / Cx + Cx * emz);
  const Expr q = half * (ez / Cx - Cx * emz);
  const auto basis = example_basis(F);
  Vec3<Expr> e, pe;
  for (std::size_t i = 0; i < 3; ++i) {
    e[i] = p * basis[0][i] + q * basis[1][i];
    pe[i] = q * basis[0][i] + p * basis[1][i];
  }
  return {{Vec3<Expr>{Expr::number(0.0), Expr::number(0.0), Expr::number(2.0)}, e, pe}};
}

/// Closed-form rotated brackets at height z: slots as in ProbeRow.
inline Tensor3<double> expected_rotated_brackets(double alpha, double beta, double C, double z) {
  Tensor3<double> t = zero_tensor<double>();
  const double k = 4.0 * alpha * C * C;
  const double s = std::sqrt(2.0) * beta * C * std::exp(-z);
  t[0][1] = {0.0, -k, 2.0 - k};
  t[0][2] = {0.0, 2.0 + k, k};
  t[1][2] = {-2.0, s, s};
  return t;
}

inline ProbeResult homogeneity_probe(double alpha, double beta, double C, const std::vector<ChartPoint> &points,
                                     const Expr &f = Expr::number(0.0), double gamma = 0.0) {
  if (C == 0.0) throw ZeroParameter("C must be nonzero");
  const ExampleStructure ex = example_structure(alpha, beta, gamma, f);
  const FrameRealization frame = rotated_frame(ex.F, C);
  ProbeResult out;
  std::array<std::array<double, 9>, 2> range{};
  for (auto &v : range[0]) v = INFINITY;
  for (auto &v : range[1]) v = -INFINITY;
  for (const ChartPoint &pt : points) {
    const Tensor3<double> c = realized_brackets(realize(frame, pt, ex.darboux.env));
    ProbeRow row{pt, zero_tensor<double>(), 0.0};
    row.brackets[0][1] = c[0][1];
    row.brackets[0][2] = c[0][2];
    row.brackets[1][2] = c[1][2];
    const double p = 0.5 * (std::exp(pt.z) / C + C * std::exp(-pt.z));
    const double q = 0.5 * (std::exp(pt.z) / C - C * std::exp(-pt.z));
    row.pq_defect = std::abs(p * p - q * q - 1.0);
    out.max_pq_defect = std::max(out.max_pq_defect, row.pq_defect);
    const std::array<Vec3<double>, 3> slots{c[0][1], c[0][2], c[1][2]};
    for (std::size_t s = 0; s < 3; ++s)
      for (std::size_t k = 0; k < 3; ++k) {
        range[0][3 * s + k] = std::min(range[0][3 * s + k], slots[s][k]);
        range[1][3 * s + k] = std::max(range[1][3 * s + k], slots[s][k]);
      }
    out.rows.push_back(row);
  }
  if (!out.rows.empty())
    for (std::size_t i = 0; i < 9; ++i) out.variation = std::max(out.variation, range[1][i] - range[0][i]);
  out.homogeneous = out.variation <= kHomogeneityThreshold;
  return out;
}

} // namespace ppc
