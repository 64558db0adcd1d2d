#pragma once

/**
 * @file report.hpp
 * @brief Command orchestration and the JSON / text reports.
 *
 * A report is a JSON object with sorted keys. The text form is rendered
 * from the same object, so both carry identical numbers.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppc/chart.hpp"
#include "ppc/darboux.hpp"
#include "ppc/invariants.hpp"
#include "ppc/normal.hpp"
#include "ppc/specfile.hpp"

namespace ppc {

inline constexpr const char *kToolVersion = "0.1.0";

using Json = nlohmann::json;

enum class Command { check, soliton, crossval, probe, report };

inline const char *to_string(Command c) {
  switch (c) {
  case Command::check: return "check";
  case Command::soliton: return "soliton";
  case Command::crossval: return "crossval";
  case Command::probe: return "probe-homogeneity";
  case Command::report: return "report";
  }
  return "?";
}

inline std::optional<Command> parse_command(const std::string &s) {
  for (Command c : {Command::check, Command::soliton, Command::crossval, Command::probe, Command::report})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

struct RunOptions {
  std::optional<double> tol;
  std::optional<std::size_t> points;
  std::optional<std::uint64_t> seed;
  bool skip_singular = false;
};

inline constexpr double kCrossvalTolerance = 1e-8;
inline constexpr double kAxiomTolerance = 1e-10;
inline constexpr double kPqTolerance = 1e-12;
inline constexpr double kClosedFormTolerance = 1e-9;

inline Json to_json(const ChartPoint &p) { return Json::array({p.x, p.y, p.z}); }

inline Json to_json(const Mat3<double> &m) {
  Json out = Json::array();
  for (const auto &row : m) out.push_back(Json::array({row[0], row[1], row[2]}));
  return out;
}

/// Worst residual of one named check over the sample set.
class CheckAccumulator {
public:
  CheckAccumulator(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

  void add(double residual, const ChartPoint &p) {
    const double r = std::isnan(residual) ? INFINITY : std::abs(residual);
    if (!location_ || r > worst_) {
      worst_ = r;
      location_ = p;
    }
  }

  double worst() const { return worst_; }
  bool pass() const { return location_.has_value() && worst_ <= tol_; }

  Json json() const {
    return {{"name", name_},
            {"pass", pass()},
            {"tolerance", tol_},
            {"worst_residual", worst_},
            {"location", location_ ? to_json(*location_) : Json(nullptr)}};
  }

private:
  std::string name_;
  double tol_;
  double worst_ = 0.0;
  std::optional<ChartPoint> location_;
};

/// A check whose outcome is a verdict rather than a per-point residual.
inline Json verdict_check(const std::string &name, bool pass, double residual, double tol,
                          const std::optional<ChartPoint> &where) {
  return {{"name", name},
          {"pass", pass},
          {"tolerance", tol},
          {"worst_residual", residual},
          {"location", where ? to_json(*where) : Json(nullptr)}};
}

struct Section {
  Json checks = Json::array();
  Json summary = Json::object();
};

namespace detail {

inline double frame_tolerance(const NaturalFrameSpec &spec) { return default_soliton_tolerance(spec.mode()); }

inline Vec3<double> variant_jacobi(const SpecFile &file, const NaturalFrameSpec &spec, const ChartPoint &p) {
  const auto s = sample(spec, p);
  switch (file.variant) {
  case SpecVariant::normal: return normal_jacobi_residual(s);
  case SpecVariant::natural: return jacobi_residual(s);
  default: return jacobi_residual_paracontact(s);
  }
}

/// Evaluates everything a command may touch at p; throws on singular points.
inline void preflight(const SpecFile &file, const ChartPoint &p) {
  if (auto spec = file.frame_spec()) {
    const auto s = sample(*spec, p);
    (void)frame_curvature(s);
    if (spec->mode() == Mode::chart) {
      const RealizedFrame f = realize(*spec->realization(), p, spec->bindings());
      if (!(std::abs(det(f.matrix())) >= kFrameDetTolerance))
        throw FrameNotInvertible("realized frame is degenerate at " + describe(p));
    }
  }
  if (file.variant == SpecVariant::darboux) {
    const DarbouxStructure d = file.darboux();
    const Mat3<double> g = values(d.metric(p));
    if (!(std::abs(det(g)) >= kMetricDetTolerance)) throw SingularMetric("metric is singular at " + describe(p));
    (void)d.phi(p);
  }
}

inline bool is_singularity(const Error &e) {
  return dynamic_cast<const DivisionAtSingularPoint *>(&e) || dynamic_cast<const DomainError *>(&e) ||
         dynamic_cast<const SingularMetric *>(&e) || dynamic_cast<const FrameNotInvertible *>(&e);
}

inline Json flags_json(const ClassificationFlags &f) {
  return {{"contact_form", f.contact_form},
          {"div_xi", f.div_xi},
          {"divergence_free", f.divergence_free},
          {"h_zero", f.h_zero},
          {"paracontact", f.paracontact},
          {"trace_phi_nabla_xi", f.trace_phi_nabla_xi},
          {"xi_killing", f.xi_killing}};
}

inline bool same_flags(const ClassificationFlags &a, const ClassificationFlags &b) {
  return a.contact_form == b.contact_form && a.paracontact == b.paracontact && a.h_zero == b.h_zero &&
         a.xi_killing == b.xi_killing && a.divergence_free == b.divergence_free;
}

inline Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

} // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Section run_check(const SpecFile &file, const std::vector<ChartPoint> &pts, const RunOptions &opt) {
  Section out;
  if (auto spec = file.frame_spec()) {
    const double tol = opt.tol.value_or(detail::frame_tolerance(*spec));
    CheckAccumulator jac("jacobi", tol);
    for (const ChartPoint &p : pts) jac.add(max_abs(detail::variant_jacobi(file, *spec, p)), p);
    out.checks.push_back(jac.json());
    if (spec->mode() == Mode::chart) {
      CheckAccumulator cons("realization_consistency", tol);
      for (const ChartPoint &p : pts) cons.add(realization_consistency(*spec, p), p);
      out.checks.push_back(cons.json());
    }
    const ClassificationFlags first = classification_flags(*spec, pts.front());
    bool uniform = true;
    for (const ChartPoint &p : pts) uniform = uniform && detail::same_flags(first, classification_flags(*spec, p));
    Json flags = detail::flags_json(first);
    flags["uniform_over_samples"] = uniform;
    out.summary["flags"] = flags;

    if (file.variant == SpecVariant::paracontact || file.variant == SpecVariant::darboux) {
      const ParacontactFrameSpec pc = file.paracontact();
      double harmonic = 0.0, affine = 0.0, trh2 = 0.0, hmax = 0.0;
      for (const ChartPoint &p : pts) {
        harmonic = std::max(harmonic, max_abs(harmonic_residual(pc, p)));
        affine = std::max(affine, max_abs(affine_killing_residual(pc, p)));
        const HTensor h = h_tensor(pc, p);
        trh2 = std::max(trh2, std::abs(h.trace_h2));
        hmax = std::max(hmax, max_abs(h.matrix));
      }
      out.summary["harmonic_residual"] = harmonic;
      out.summary["xi_harmonic"] = harmonic <= tol;
      out.summary["affine_killing_residual"] = affine;
      out.summary["xi_affine_killing"] = affine <= tol;
      out.summary["max_abs_trace_h2"] = trh2;
      out.summary["max_abs_h"] = hmax;
      out.summary["h_nilpotent"] = trh2 <= tol * std::max(1.0, hmax * hmax);
    }
    if (file.variant == SpecVariant::normal) {
      const NormalFrameSpec n = file.normal();
      const NormalAffineKilling ak = normal_affine_killing(n, pts, opt.tol.value_or(kNormalTolerance));
      double iht = 0.0;
      for (const ChartPoint &p : pts) iht = std::max(iht, std::abs(normal_iht_residual(n, p)));
      out.summary["iht_residual"] = iht;
      out.summary["xi_harmonic"] = iht <= opt.tol.value_or(kNormalTolerance);
      out.summary["affine_killing"] = to_string(ak.verdict);
      out.summary["affine_killing_residual"] = ak.residual;
      out.summary["normal_class"] = ak.cls ? Json(to_string(*ak.cls)) : Json(nullptr);
    }
  }
  if (file.variant == SpecVariant::darboux) {
    const DarbouxStructure d = file.darboux();
    const double tol = opt.tol.value_or(kAxiomTolerance);
    CheckAccumulator constraint("darboux_constraint", opt.tol.value_or(kConstraintTolerance));
    CheckAccumulator axioms("paracontact_axioms", tol);
    CheckAccumulator hdef("h_closed_form", opt.tol.value_or(kSolitonTolChart));
    bool para_sasakian = true, nilpotent = true;
    double nil = 0.0;
    for (const ChartPoint &p : pts) {
      constraint.add(d.constraint(p), p);
      axioms.add(axioms_check(d, p).worst(), p);
      const HMatrices h = h_matrices(d, p);
      hdef.add(h.generic_defect, p);
      para_sasakian = para_sasakian && h.para_sasakian;
      nilpotent = nilpotent && h.nilpotent;
      nil = std::max(nil, std::abs(h.nilpotency));
    }
    out.checks.push_back(constraint.json());
    out.checks.push_back(axioms.json());
    out.checks.push_back(hdef.json());
    out.summary["para_sasakian"] = para_sasakian;
    out.summary["h_nilpotent_coordinates"] = nilpotent;
    out.summary["max_abs_nilpotency_defect"] = nil;
  }
  return out;
}

inline Section run_soliton(const SpecFile &file, const std::vector<ChartPoint> &pts, const RunOptions &opt) {
  Section out;
  if (file.variant == SpecVariant::paracontact || (file.variant == SpecVariant::darboux && file.example)) {
    const ParacontactFrameSpec spec = file.paracontact();
    const SolitonReport rep = soliton_check(spec, pts, opt.tol);
    out.checks.push_back(verdict_check("soliton_system", rep.verdict == SolitonVerdict::soliton,
                                       std::max({rep.residual_norm, rep.A_defect, rep.r_defect}), rep.tolerance,
                                       rep.worst_point));
    Json s{{"verdict", to_string(rep.verdict)},
           {"lambda", rep.lambda},
           {"best_lambda", rep.best_lambda},
           {"residual_norm", rep.residual_norm},
           {"residual_matrix", to_json(rep.residual_matrix)},
           {"scalar_curvature", rep.scalar_curvature},
           {"A_value", rep.A_value},
           {"A_defect", rep.A_defect},
           {"r_defect", rep.r_defect},
           {"iht_residual", rep.iht_residual},
           {"epsilon", rep.epsilon},
           {"reason", rep.reason}};
    if (rep.verdict != SolitonVerdict::precondition_failed) {
      try {
        const KappaMu km = kappa_mu_detect(spec, rep.worst_point, std::max(rep.tolerance, kSolitonTolChart));
        s["kappa"] = km.kappa;
        s["mu"] = detail::optional_json(km.mu);
        s["kappa_mu_curvature_residual"] = detail::optional_json(km.curvature_residual);
        s["nilpotent_h"] = km.nilpotent_h;
      } catch (const PreconditionViolated &) {
        s["kappa"] = nullptr;
        s["mu"] = nullptr;
      }
      const SegreType seg = segre_classify(frame_ricci(spec, rep.worst_point));
      Json eig = Json::array();
      for (double e : seg.eigenvalues) eig.push_back(e);
      s["segre"] = {{"label", to_string(seg.label)},
                    {"symbol", segre_symbol(seg.label)},
                    {"eigenvalues", eig},
                    {"rank", seg.rank},
                    {"warning", seg.warning},
                    {"complex_pair", seg.complex_pair ? Json::array({(*seg.complex_pair)[0], (*seg.complex_pair)[1]})
                                                      : Json(nullptr)}};
    }
    out.summary = s;
    return out;
  }
  if (file.variant == SpecVariant::normal) {
    if (!file.lambda) throw SchemaError("soliton on a normal spec needs [soliton] lambda");
    const NormalFrameSpec spec = file.normal();
    const double tol = opt.tol.value_or(kNormalTolerance);
    try {
      const NormalSolitonReport rep = normal_soliton_check(spec, *file.lambda, pts, tol);
      const double worst = std::max({rep.algebra_residual, rep.system_residual, rep.einstein_residual.value_or(0.0),
                                     rep.steady_residual.value_or(0.0)});
      out.checks.push_back(verdict_check("normal_soliton_system", rep.verdict != NormalSolitonVerdict::not_soliton,
                                         worst, tol, rep.worst_point));
      const FlatCorollary flat = normal_flat_corollary(spec, *file.lambda, pts, tol);
      out.summary = {{"verdict", to_string(rep.verdict)},
                     {"lambda", rep.lambda},
                     {"reason", rep.reason},
                     {"algebra_residual", rep.algebra_residual},
                     {"system_residual", rep.system_residual},
                     {"iht_residual", rep.iht_residual},
                     {"max_abs_b1", rep.max_abs_b1},
                     {"k", detail::optional_json(rep.k)},
                     {"einstein_residual", detail::optional_json(rep.einstein_residual)},
                     {"epsilon", rep.epsilon ? Json(*rep.epsilon) : Json(nullptr)},
                     {"steady_residual", detail::optional_json(rep.steady_residual)},
                     {"flat_corollary", {{"verdict", to_string(flat.verdict)},
                                         {"k", detail::optional_json(flat.k)},
                                         {"xi_r", flat.xi_r},
                                         {"reason", flat.reason}}}};
    } catch (const PreconditionViolated &e) {
      out.checks.push_back(verdict_check("normal_soliton_system", false, e.residual(), tol, std::nullopt));
      out.summary = {{"verdict", "precondition_failed"}, {"lambda", *file.lambda}, {"reason", e.what()}};
    }
    return out;
  }
  if (file.variant == SpecVariant::darboux) {
    const DarbouxStructure d = file.darboux();
    CheckAccumulator acc("soliton_system_coordinates", opt.tol.value_or(kSolitonTolChart));
    double r_min = INFINITY, r_max = -INFINITY;
    for (const ChartPoint &p : pts) {
      acc.add(max_abs(darboux_soliton_residual(d, p)), p);
      const double r = chart_ricci(d.metric(p)).r;
      r_min = std::min(r_min, r);
      r_max = std::max(r_max, r);
    }
    out.checks.push_back(acc.json());
    out.summary = {{"verdict", acc.pass() ? "soliton" : "not_soliton"},
                   {"lambda", -2.0},
                   {"scalar_curvature_min", r_min},
                   {"scalar_curvature_max", r_max}};
    return out;
  }
  throw VariantMismatch("soliton needs a paracontact, normal or darboux spec");
}

inline Section run_crossval(const SpecFile &file, const std::vector<ChartPoint> &pts, const RunOptions &opt) {
  const auto spec = file.frame_spec();
  if (!spec || spec->mode() != Mode::chart)
    throw VariantMismatch("crossval needs a chart-mode spec with a frame realization");
  const double tol = opt.tol.value_or(kCrossvalTolerance);
  std::optional<DarbouxStructure> darboux;
  if (file.variant == SpecVariant::darboux) darboux = file.darboux();

  Section out;
  CheckAccumulator ricci("ricci_agreement", tol), scalar("scalar_curvature_agreement", tol);
  std::optional<CheckAccumulator> metric;
  if (darboux) metric.emplace("metric_agreement", tol);
  double r_min = INFINITY, r_max = -INFINITY;
  for (const ChartPoint &p : pts) {
    const RealizedFrame f = realize(*spec->realization(), p, spec->bindings());
    const Mat3<double> F = f.matrix();
    const Mat3<Jet2> g_frame = metric_from_frame(*spec->realization(), p, spec->bindings());
    Mat3<Jet2> g = g_frame;
    if (darboux) {
      g = darboux->metric(p);
      double m = 0.0;
      for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) m = std::max(m, std::abs(g[a][b].value() - g_frame[a][b].value()));
      metric->add(m, p);
    }
    const ChartRicci chart = chart_ricci(g);
    const Mat3<double> pulled = transpose(F) * chart.rho * F;
    const Mat3<double> frame = frame_ricci(*spec, p);
    ricci.add(max_abs(pulled - frame), p);
    scalar.add(chart.r - frame_scalar_curvature(frame), p);
    r_min = std::min(r_min, chart.r);
    r_max = std::max(r_max, chart.r);
  }
  if (metric) out.checks.push_back(metric->json());
  out.checks.push_back(ricci.json());
  out.checks.push_back(scalar.json());
  out.summary = {{"chart_scalar_curvature_min", r_min},
                 {"chart_scalar_curvature_max", r_max},
                 {"oracle", darboux ? "darboux_metric" : "frame_metric"}};
  return out;
}

inline Section run_probe(const SpecFile &file, const std::vector<ChartPoint> &pts, const RunOptions &opt) {
  if (file.variant != SpecVariant::darboux || !file.example)
    throw VariantMismatch("probe-homogeneity needs the darboux example shortcut (alpha, beta, gamma, f)");
  const ExampleParams &ex = *file.example;
  const double C = file.probe_C.value_or(1.0);
  const ProbeResult res = homogeneity_probe(ex.alpha, ex.beta, C, pts, ex.f, ex.gamma);
  Section out;
  CheckAccumulator pq("pq_identity", opt.tol.value_or(kPqTolerance));
  CheckAccumulator closed("closed_form_brackets", opt.tol.value_or(kClosedFormTolerance));
  for (const ProbeRow &row : res.rows) {
    pq.add(row.pq_defect, row.point);
    const Tensor3<double> e = expected_rotated_brackets(ex.alpha, ex.beta, C, row.point.z);
    double d = 0.0;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{0, 2}, std::pair{1, 2}})
      for (std::size_t k = 0; k < 3; ++k) d = std::max(d, std::abs(row.brackets[i][j][k] - e[i][j][k]));
    closed.add(d, row.point);
  }
  out.checks.push_back(pq.json());
  out.checks.push_back(closed.json());
  out.summary = {{"C", C},
                 {"variation", res.variation},
                 {"threshold", kHomogeneityThreshold},
                 {"verdict", res.homogeneous ? "homogeneous" : "inhomogeneous"}};
  return out;
}

// ---------------------------------------------------------------------------
// Orchestration
// ---------------------------------------------------------------------------

/// Applies CLI overrides, samples, and drops or rejects singular points.
inline std::pair<std::vector<ChartPoint>, std::size_t> prepare_points(const SpecFile &file, const RunOptions &opt) {
  SamplingPlan plan = file.sampling;
  if (opt.points) plan.points = *opt.points;
  if (opt.seed) plan.seed = *opt.seed;
  if (plan.points < 1) throw SchemaError("points must be at least 1");
  std::vector<ChartPoint> kept;
  std::size_t skipped = 0;
  for (const ChartPoint &p : sample_points(plan)) {
    try {
      detail::preflight(file, p);
      kept.push_back(p);
    } catch (const Error &e) {
      if (!opt.skip_singular || !detail::is_singularity(e)) throw;
      ++skipped;
    }
  }
  if (kept.empty()) throw SchemaError("every sample point is singular");
  return {kept, skipped};
}

inline Section run_command(Command c, const SpecFile &file, const std::vector<ChartPoint> &pts,
                           const RunOptions &opt) {
  switch (c) {
  case Command::check: return run_check(file, pts, opt);
  case Command::soliton: return run_soliton(file, pts, opt);
  case Command::crossval: return run_crossval(file, pts, opt);
  case Command::probe: return run_probe(file, pts, opt);
  case Command::report: break;
  }
  throw Error("report is not a single command");
}

/// Runs a command and returns the machine report.
inline Json run_checks(const SpecFile &file, Command command, const RunOptions &opt = {}) {
  const auto [pts, skipped] = prepare_points(file, opt);
  Json checks = Json::array();
  Json summary = Json::object();
  Json not_run = Json::object();
  auto absorb = [&](Command c, const Section &s, bool prefix) {
    for (Json ch : s.checks) {
      if (prefix) ch["name"] = std::string(to_string(c)) + "." + ch["name"].get<std::string>();
      checks.push_back(ch);
    }
    summary[to_string(c)] = s.summary;
  };
  if (command == Command::report) {
    for (Command c : {Command::check, Command::soliton, Command::crossval, Command::probe}) {
      try {
        absorb(c, run_command(c, file, pts, opt), true);
      } catch (const VariantMismatch &e) {
        not_run[to_string(c)] = e.what();
      } catch (const SchemaError &e) {
        not_run[to_string(c)] = e.what();
      }
    }
  } else {
    absorb(command, run_command(command, file, pts, opt), false);
  }
  bool pass = true;
  for (const Json &ch : checks) pass = pass && ch["pass"].get<bool>();

  Json report{{"tool", {{"name", "ppc"}, {"version", kToolVersion}}},
              {"command", to_string(command)},
              {"input", {{"digest", "fnv1a64:" + file.digest},
                         {"variant", to_string(file.variant)},
                         {"mode", file.variant == SpecVariant::darboux ? "chart" : to_string(file.mode)}}},
              {"sampling", {{"seed", opt.seed.value_or(file.sampling.seed)},
                            {"points_requested", opt.points.value_or(file.sampling.points)},
                            {"fixed_points", file.sampling.fixed_points.size()},
                            {"points_evaluated", pts.size()},
                            {"points_skipped", skipped}}},
              {"checks", checks},
              {"summary", summary},
              {"pass", pass}};
  if (command == Command::report) report["not_run"] = not_run;
  return report;
}

inline std::string render_json(const Json &report) { return report.dump(2) + "\n"; }

namespace detail {

inline std::string scalar_text(const Json &v) {
  if (!v.is_string()) return v.dump();
  const auto &s = v.get_ref<const std::string &>();
  return s.empty() ? "\"\"" : s;
}

inline void flatten(const Json &v, const std::string &prefix, std::string &out) {
  if (v.is_object()) {
    for (auto it = v.begin(); it != v.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else {
    out += "  " + prefix + " = " + scalar_text(v) + "\n";
  }
}

} // namespace detail

/// Human-readable report; every number is printed exactly as in the JSON form.
inline std::string render_text(const Json &report) {
  std::string out;
  out += "ppc " + report["tool"]["version"].get<std::string>() + "  command: " + report["command"].get<std::string>() +
         "\n";
  const Json &in = report["input"];
  out += "input: variant " + in["variant"].get<std::string>() + ", mode " + in["mode"].get<std::string>() +
         ", digest " + in["digest"].get<std::string>() + "\n";
  const Json &s = report["sampling"];
  out += "sampling: seed " + s["seed"].dump() + ", " + s["points_evaluated"].dump() + " points evaluated (" +
         s["fixed_points"].dump() + " fixed), " + s["points_skipped"].dump() + " skipped\n";
  out += "checks:\n";
  for (const Json &c : report["checks"]) {
    out += std::string(c["pass"].get<bool>() ? "  PASS " : "  FAIL ") + c["name"].get<std::string>() + "  worst " +
           c["worst_residual"].dump() + "  tol " + c["tolerance"].dump();
    if (!c["location"].is_null()) {
      const Json &l = c["location"];
      out += "  at (" + l[0].dump() + ", " + l[1].dump() + ", " + l[2].dump() + ")";
    }
    out += "\n";
  }
  out += "summary:\n";
  detail::flatten(report["summary"], "", out);
  if (report.contains("not_run") && !report["not_run"].empty()) {
    out += "not run:\n";
    detail::flatten(report["not_run"], "", out);
  }
  out += std::string("result: ") + (report["pass"].get<bool>() ? "PASS" : "FAIL") + "\n";
  return out;
}

} // namespace ppc
