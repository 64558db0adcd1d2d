#pragma once

/**
 * @file specfile.hpp
 * @brief Spec files: TOML documents describing one structure plus a sampling plan.
 *
 * Sections: [structure] (variant, mode, epsilon), [constants], [functions]
 * (expression strings), optional [frame] (xi, e, phi_e as string triples),
 * [sampling] (box, points, seed, fixed_points, exclude), and the optional
 * command parameters [soliton] lambda and [probe] C. Unknown keys are errors.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "ppc/darboux.hpp"
#include "ppc/errors.hpp"
#include "ppc/expr.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/normal.hpp"
#include "ppc/rng.hpp"

namespace ppc {

enum class SpecVariant { natural, paracontact, normal, darboux };

inline const char *to_string(SpecVariant v) {
  switch (v) {
  case SpecVariant::natural: return "natural";
  case SpecVariant::paracontact: return "paracontact";
  case SpecVariant::normal: return "normal";
  case SpecVariant::darboux: return "darboux";
  }
  return "?";
}

/// Samples closer than kGuardBand to `coord = at` are excluded.
inline constexpr double kGuardBand = 0.1;

struct ExcludedPlane {
  Coord coord;
  double at;
};

struct SamplingPlan {
  std::array<std::array<double, 2>, 3> box{{{-1.0, 1.0}, {-1.0, 1.0}, {-1.0, 1.0}}};
  std::size_t points = 64;
  std::uint64_t seed = 7;
  std::vector<ChartPoint> fixed_points;
  std::vector<ExcludedPlane> exclude;
};

/// The darboux shortcut F = f(x) + alpha e^{2z} + beta y + gamma.
struct ExampleParams {
  double alpha;
  double beta;
  double gamma;
  Expr f;
};

/// 64-bit FNV-1a of the raw input bytes, as 16 hex digits.
inline std::string fnv1a_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char *hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xf];
  return out;
}

struct SpecFile {
  SpecVariant variant = SpecVariant::paracontact;
  Mode mode = Mode::lie_group;
  std::optional<int> epsilon;
  Bindings constants;
  std::map<std::string, Expr> functions;
  std::optional<FrameRealization> frame;
  std::optional<ExampleParams> example;
  std::optional<double> lambda;
  std::optional<double> probe_C;
  SamplingPlan sampling;
  std::string digest;

  const Expr &fn(const std::string &name) const { return functions.at(name); }

  NaturalFrameSpec natural() const {
    if (variant != SpecVariant::natural) throw VariantMismatch("spec variant is " + std::string(to_string(variant)));
    return {{fn("a1"), fn("a2"), fn("a3"), fn("a4"), fn("a5"), fn("b1"), fn("b2")}, mode, frame, constants};
  }

  /// Paracontact description; darboux example files map to their global phi-basis.
  ParacontactFrameSpec paracontact() const {
    if (variant == SpecVariant::darboux && example) return example_structure().frame;
    if (variant != SpecVariant::paracontact)
      throw VariantMismatch("command needs a paracontact spec, got " + std::string(to_string(variant)));
    return {fn("a1"), fn("a2"), fn("a3"), fn("a4"), fn("a5"), mode, frame, constants, epsilon};
  }

  NormalFrameSpec normal() const {
    if (variant != SpecVariant::normal)
      throw VariantMismatch("command needs a normal spec, got " + std::string(to_string(variant)));
    return {fn("b1"), fn("b2"), fn("a3"), fn("a4"), fn("a5"), mode, frame, constants};
  }

  DarbouxStructure darboux() const {
    if (variant != SpecVariant::darboux)
      throw VariantMismatch("command needs a darboux spec, got " + std::string(to_string(variant)));
    if (example) return example_structure().darboux;
    return {fn("a"), fn("b"), fn("c"), constants};
  }

  ExampleStructure example_structure() const {
    if (!example) throw VariantMismatch("command needs the darboux example shortcut (alpha, beta, gamma, f)");
    return ppc::example_structure(example->alpha, example->beta, example->gamma, example->f);
  }

  /// The spec as a general frame description, when it has one.
  std::optional<NaturalFrameSpec> frame_spec() const {
    switch (variant) {
    case SpecVariant::natural: return natural();
    case SpecVariant::paracontact: return paracontact();
    case SpecVariant::normal: return normal();
    case SpecVariant::darboux:
      if (example) return example_structure().frame;
      return std::nullopt;
    }
    return std::nullopt;
  }
};

namespace detail {

inline std::string where(const toml::node &n) {
  const auto &src = n.source();
  return " (line " + std::to_string(src.begin.line) + ")";
}

inline double number(const toml::node &n, const std::string &key) {
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_integer()) return static_cast<double>(v->get());
  throw SchemaError("'" + key + "' must be a number" + where(n));
}

inline std::string text(const toml::node &n, const std::string &key) {
  if (auto v = n.as_string()) return v->get();
  throw SchemaError("'" + key + "' must be a string" + where(n));
}

inline const toml::array &array(const toml::node &n, const std::string &key, std::size_t size = 0) {
  const toml::array *a = n.as_array();
  if (!a) throw SchemaError("'" + key + "' must be an array" + where(n));
  if (size && a->size() != size)
    throw SchemaError("'" + key + "' must have " + std::to_string(size) + " entries" + where(n));
  return *a;
}

inline Expr expression(const toml::node &n, const std::string &key) {
  const std::string s = text(n, key);
  try {
    return parse(s);
  } catch (const SyntaxError &e) {
    throw SyntaxError(e.offset(), e.expected(), "in '" + key + "'" + where(n) + ": " + e.what());
  }
}

inline ChartPoint point(const toml::node &n, const std::string &key) {
  const toml::array &a = array(n, key, 3);
  return {number(*a.get(0), key), number(*a.get(1), key), number(*a.get(2), key)};
}

inline void only_keys(const toml::table &t, const std::string &section, std::initializer_list<const char *> keys) {
  for (const auto &[k, v] : t) {
    bool known = false;
    for (const char *key : keys) known = known || k.str() == key;
    if (!known) throw SchemaError("unknown key '" + std::string(k.str()) + "' in [" + section + "]" + where(v));
  }
}

inline const toml::table *section(const toml::table &root, const char *name, bool required) {
  const toml::node *n = root.get(name);
  if (!n) {
    if (required) throw SchemaError("missing section [" + std::string(name) + "]");
    return nullptr;
  }
  const toml::table *t = n->as_table();
  if (!t) throw SchemaError("'" + std::string(name) + "' must be a section" + where(*n));
  return t;
}

inline std::vector<std::string> required_functions(SpecVariant v) {
  switch (v) {
  case SpecVariant::natural: return {"a1", "a2", "a3", "a4", "a5", "b1", "b2"};
  case SpecVariant::paracontact: return {"a1", "a2", "a3", "a4", "a5"};
  case SpecVariant::normal: return {"b1", "b2", "a3", "a4", "a5"};
  case SpecVariant::darboux: return {"a", "b", "c"};
  }
  return {};
}

inline double constant_value(const Expr &e, const std::string &key, const Bindings &env) {
  for (const std::string &id : e.identifiers())
    if (is_coordinate(id)) throw SchemaError("'" + key + "' must be constant, it uses '" + id + "'");
  return eval_jet(e, ChartPoint{}, env).value();
}

} // namespace detail

/// Parses and validates spec-file text.
inline SpecFile parse_spec(std::string_view source_text, const std::string &source_name = "<input>") {
  toml::table root;
  try {
    root = toml::parse(source_text, source_name);
  } catch (const toml::parse_error &e) {
    throw SchemaError("malformed spec file at line " + std::to_string(e.source().begin.line) + ": " +
                      std::string(e.description()));
  }
  detail::only_keys(root, "", {"structure", "constants", "functions", "frame", "sampling", "soliton", "probe"});

  SpecFile spec;
  spec.digest = fnv1a_digest(source_text);

  const toml::table &st = *detail::section(root, "structure", true);
  detail::only_keys(st, "structure", {"variant", "mode", "epsilon"});
  const toml::node *vn = st.get("variant");
  if (!vn) throw SchemaError("missing 'variant' in [structure]");
  const std::string variant = detail::text(*vn, "variant");
  if (variant == "natural") spec.variant = SpecVariant::natural;
  else if (variant == "paracontact") spec.variant = SpecVariant::paracontact;
  else if (variant == "normal") spec.variant = SpecVariant::normal;
  else if (variant == "darboux") spec.variant = SpecVariant::darboux;
  else throw SchemaError("unknown variant '" + variant + "'" + detail::where(*vn));

  if (const toml::node *en = st.get("epsilon")) {
    const double e = detail::number(*en, "epsilon");
    if (e != 1.0 && e != -1.0) throw SchemaError("epsilon must be +1 or -1" + detail::where(*en));
    spec.epsilon = static_cast<int>(e);
  }

  if (const toml::table *ct = detail::section(root, "constants", false))
    for (const auto &[k, v] : *ct) spec.constants[std::string(k.str())] = detail::number(v, std::string(k.str()));
  validate_bindings(spec.constants);

  if (const toml::table *fr = detail::section(root, "frame", false)) {
    detail::only_keys(*fr, "frame", {"xi", "e", "phi_e"});
    FrameRealization r;
    const char *names[3] = {"xi", "e", "phi_e"};
    for (std::size_t i = 0; i < 3; ++i) {
      const toml::node *n = fr->get(names[i]);
      if (!n) throw SchemaError("missing '" + std::string(names[i]) + "' in [frame]");
      const toml::array &a = detail::array(*n, names[i], 3);
      for (std::size_t c = 0; c < 3; ++c) r.fields[i][c] = detail::expression(*a.get(c), names[i]);
    }
    spec.frame = r;
  }

  if (const toml::node *mn = st.get("mode")) {
    const std::string mode = detail::text(*mn, "mode");
    if (mode == "lie_group") spec.mode = Mode::lie_group;
    else if (mode == "chart") spec.mode = Mode::chart;
    else throw SchemaError("unknown mode '" + mode + "'" + detail::where(*mn));
  } else {
    spec.mode = spec.frame ? Mode::chart : Mode::lie_group;
  }

  const toml::table *ft = detail::section(root, "functions", true);
  for (const auto &[k, v] : *ft) spec.functions.emplace(std::string(k.str()), detail::expression(v, std::string(k.str())));

  const bool shortcut = spec.variant == SpecVariant::darboux && spec.functions.count("alpha");
  if (shortcut) {
    for (const char *name : {"alpha", "beta", "gamma", "f"})
      if (!spec.functions.count(name)) throw SchemaError("missing function '" + std::string(name) + "'");
    for (const auto &[k, v] : spec.functions)
      if (k != "alpha" && k != "beta" && k != "gamma" && k != "f")
        throw SchemaError("unexpected function '" + k + "' next to the example shortcut");
    spec.example = ExampleParams{detail::constant_value(spec.fn("alpha"), "alpha", spec.constants),
                                 detail::constant_value(spec.fn("beta"), "beta", spec.constants),
                                 detail::constant_value(spec.fn("gamma"), "gamma", spec.constants), spec.fn("f")};
    spec.example_structure(); // validates alpha != 0 and f = f(x)
  } else {
    const auto required = detail::required_functions(spec.variant);
    for (const std::string &name : required)
      if (!spec.functions.count(name)) throw SchemaError("missing function '" + name + "'");
    for (const auto &[k, v] : spec.functions) {
      bool known = false;
      for (const std::string &name : required) known = known || k == name;
      if (!known) throw SchemaError("unexpected function '" + k + "' for variant " + variant);
    }
  }

  if (const toml::table *sp = detail::section(root, "sampling", false)) {
    detail::only_keys(*sp, "sampling", {"box", "points", "seed", "fixed_points", "exclude"});
    SamplingPlan &plan = spec.sampling;
    if (const toml::node *b = sp->get("box")) {
      const toml::array &rows = detail::array(*b, "box", 3);
      for (std::size_t i = 0; i < 3; ++i) {
        const toml::array &row = detail::array(*rows.get(i), "box", 2);
        plan.box[i] = {detail::number(*row.get(0), "box"), detail::number(*row.get(1), "box")};
        if (!(plan.box[i][0] < plan.box[i][1])) throw SchemaError("sampling box must be nonempty" + detail::where(*b));
      }
    }
    if (const toml::node *n = sp->get("points")) {
      const auto v = n->value<std::int64_t>();
      if (!v || *v < 1) throw SchemaError("'points' must be a positive integer" + detail::where(*n));
      plan.points = static_cast<std::size_t>(*v);
    }
    if (const toml::node *n = sp->get("seed")) {
      const auto v = n->value<std::int64_t>();
      if (!v || *v < 0) throw SchemaError("'seed' must be a nonnegative integer" + detail::where(*n));
      plan.seed = static_cast<std::uint64_t>(*v);
    }
    if (const toml::node *n = sp->get("fixed_points"))
      for (const toml::node &p : detail::array(*n, "fixed_points")) plan.fixed_points.push_back(detail::point(p, "fixed_points"));
    if (const toml::node *n = sp->get("exclude")) {
      for (const toml::node &e : detail::array(*n, "exclude")) {
        const toml::table *t = e.as_table();
        if (!t) throw SchemaError("'exclude' entries must be tables {coord, at}" + detail::where(e));
        detail::only_keys(*t, "sampling.exclude", {"coord", "at"});
        const toml::node *c = t->get("coord"), *a = t->get("at");
        if (!c || !a) throw SchemaError("'exclude' entries need coord and at" + detail::where(e));
        const std::string coord = detail::text(*c, "coord");
        if (!is_coordinate(coord)) throw SchemaError("exclude coord must be x, y or z" + detail::where(*c));
        plan.exclude.push_back({static_cast<Coord>(coord[0] - 'x'), detail::number(*a, "at")});
      }
    }
  }

  if (const toml::table *so = detail::section(root, "soliton", false)) {
    detail::only_keys(*so, "soliton", {"lambda"});
    if (const toml::node *n = so->get("lambda")) spec.lambda = detail::number(*n, "lambda");
  }
  if (const toml::table *pr = detail::section(root, "probe", false)) {
    detail::only_keys(*pr, "probe", {"C"});
    if (const toml::node *n = pr->get("C")) spec.probe_C = detail::number(*n, "C");
  }

  // construct once so mode/realization/binding errors surface at load time
  if (spec.variant == SpecVariant::darboux) {
    if (!spec.example) spec.darboux();
  } else {
    spec.frame_spec();
  }
  return spec;
}

inline SpecFile load_spec(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read spec file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path + "'");
  return parse_spec(ss.str(), path);
}

/// True when p lies inside the guard band of an excluded plane.
inline bool excluded(const SamplingPlan &plan, const ChartPoint &p) {
  for (const ExcludedPlane &e : plan.exclude)
    if (std::abs(p[static_cast<std::size_t>(e.coord)] - e.at) < kGuardBand) return true;
  return false;
}

/// Fixed points first, then `points` seeded draws from the box outside the guard bands.
inline std::vector<ChartPoint> sample_points(const SamplingPlan &plan) {
  std::vector<ChartPoint> out;
  for (const ChartPoint &p : plan.fixed_points) {
    if (excluded(plan, p)) throw SchemaError("fixed point " + describe(p) + " lies in an excluded guard band");
    out.push_back(p);
  }
  Xorshift64Star rng(plan.seed);
  const std::size_t max_draws = 1000 * plan.points + 1000;
  std::size_t draws = 0, kept = 0;
  while (kept < plan.points) {
    if (++draws > max_draws) throw SchemaError("sampling box is covered by excluded guard bands");
    ChartPoint p;
    for (std::size_t i = 0; i < 3; ++i) p[i] = rng.uniform(plan.box[i][0], plan.box[i][1]);
    if (excluded(plan, p)) continue;
    out.push_back(p);
    ++kept;
  }
  return out;
}

} // namespace ppc
