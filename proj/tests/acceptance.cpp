// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ppc/darboux.hpp"
#include "ppc/frame_spec.hpp"
#include "ppc/invariants.hpp"
#include "ppc/normal.hpp"
#include "ppc/report.hpp"
#include "ppc/specfile.hpp"
#include "support.hpp"

using namespace ppc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Ledger {
public:
  void require(bool ok, const std::string &what) {
    if (!ok && out_.pass) out_.detail = what;
    out_.pass = out_.pass && ok;
  }
  void note(const std::string &s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

private:
  Outcome out_;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string samples(const std::string &name) { return std::string(PPC_SAMPLES_DIR) + "/" + name; }

const Json &check_named(const Json &report, const std::string &name) {
  for (const Json &c : report.at("checks"))
    if (c.at("name") == name) return c;
  throw std::runtime_error("report has no check '" + name + "'");
}

double worst(const Json &report, const std::string &name) {
  return check_named(report, name).at("worst_residual").get<double>();
}

const Json &summary(const Json &report) { return report.at("summary").begin().value(); }

std::vector<ChartPoint> random_points(std::mt19937 &rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<ChartPoint> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  return pts;
}

// --------------------------------------------------------------------------

Outcome homogeneous_solitons() {
  Ledger l;
  double slowest = 0.0;
  for (double a1 : {1.0, -3.0, 0.25}) {
    const std::string text = "[structure]\nvariant = \"paracontact\"\nmode = \"lie_group\"\nepsilon = 1\n"
                             "[constants]\nk = " + Json(a1).dump() +
                             "\n[functions]\na1 = \"k\"\na2 = \"k\"\na3 = \"1\"\na4 = \"0\"\na5 = \"0\"\n";
    const auto t0 = std::chrono::steady_clock::now();
    const Json rep = run_checks(parse_spec(text), Command::soliton);
    const double dt = seconds_since(t0);
    slowest = std::max(slowest, dt);
    const Json &s = summary(rep);
    const std::string tag = "a1=" + fmt(a1) + ": ";
    l.require(rep.at("pass").get<bool>(), tag + "report failed");
    l.require(std::abs(s.at("best_lambda").get<double>() + 2.0) <= 1e-12, tag + "lambda != -2");
    l.require(std::abs(s.at("scalar_curvature").get<double>() + 6.0) <= 1e-12, tag + "r != -6");
    l.require(s.at("residual_norm").get<double>() <= 1e-12, tag + "residual above 1e-12");
    l.require(std::abs(s.at("kappa").get<double>() + 1.0) <= 1e-12, tag + "kappa != -1");
    l.require(!s.at("mu").is_null() && std::abs(s.at("mu").get<double>() + 2.0) <= 1e-12, tag + "mu != -2");
    l.require(s.at("segre").at("label") == "segre_degenerate_21", tag + "Segre type is not {(21)}");
    l.require(dt < 1.0, tag + "runtime " + fmt(dt) + " s");
  }
  l.note("3 values of a1, slowest run " + fmt(slowest) + " s");
  return l.result();
}

Outcome inhomogeneous_example() {
  Ledger l;
  const SpecFile file = load_spec(samples("example_beta2.toml"));
  l.require(file.sampling.points == 100 && file.sampling.seed == 7, "sample file is not 100 seeded points");
  const auto t0 = std::chrono::steady_clock::now();
  const Json check = run_checks(file, Command::check);
  const Json sol = run_checks(file, Command::soliton);
  const double dt = seconds_since(t0);
  l.require(check.at("sampling").at("points_evaluated") == 100, "not all 100 points evaluated");
  const double jac = worst(check, "jacobi"), real = worst(check, "realization_consistency");
  const double res = worst(sol, "soliton_system");
  l.require(jac <= 1e-9, "Jacobi residual " + fmt(jac));
  l.require(real <= 1e-9, "realization consistency " + fmt(real));
  l.require(res <= 1e-9, "soliton residual " + fmt(res));
  l.require(summary(check).at("max_abs_trace_h2").get<double>() <= 1e-12, "frame tr h^2 nonzero");

  // h in Darboux coordinates: h^2 vanishes everywhere, h itself does not on z = 0
  const ExampleStructure ex = file.example_structure();
  double h2 = 0.0, h_at_zero = INFINITY;
  for (ChartPoint p : sample_points(file.sampling)) {
    const HMatrices hm = h_matrices(ex.darboux, p);
    for (const auto &row : hm.h2)
      for (double v : row) h2 = std::max(h2, std::abs(v));
    p.z = 0.0;
    double m = 0.0;
    for (const auto &row : h_matrices(ex.darboux, p).h)
      for (double v : row) m = std::max(m, std::abs(v));
    for (const auto &row : h_tensor(ex.frame, p).matrix)
      for (double v : row) m = std::max(m, std::abs(v));
    h_at_zero = std::min(h_at_zero, m);
  }
  l.require(h2 <= 1e-12, "coordinate h^2 = " + fmt(h2));
  l.require(h_at_zero >= 0.1, "max|h| at z = 0 only " + fmt(h_at_zero));
  l.require(dt < 5.0, "runtime " + fmt(dt) + " s");
  l.note("jacobi " + fmt(jac) + ", soliton " + fmt(res) + ", min max|h| at z=0 " + fmt(h_at_zero) + ", " +
         fmt(dt) + " s");
  return l.result();
}

Outcome oracle_equivalence() {
  Ledger l;
  const Json rep = run_checks(load_spec(samples("example_beta2.toml")), Command::crossval);
  const double ric = worst(rep, "ricci_agreement"), met = worst(rep, "metric_agreement");
  const Json &s = summary(rep);
  const double rmin = s.at("chart_scalar_curvature_min").get<double>();
  const double rmax = s.at("chart_scalar_curvature_max").get<double>();
  l.require(s.at("oracle") == "darboux_metric", "oracle is not the independent Darboux metric");
  l.require(met <= 1e-8, "metric disagreement " + fmt(met));
  l.require(ric <= 1e-8, "Ricci disagreement " + fmt(ric));
  l.require(std::abs(rmin + 6.0) <= 1e-8 && std::abs(rmax + 6.0) <= 1e-8, "chart r outside -6 +- 1e-8");
  l.note("Ricci disagreement " + fmt(ric) + " over 100 points");
  return l.result();
}

Outcome homogeneity_probe_criterion() {
  Ledger l;
  auto variation = [](double beta) {
    const std::string text = "[structure]\nvariant = \"darboux\"\n[functions]\nalpha = \"1\"\nbeta = \"" +
                             Json(beta).dump() + "\"\ngamma = \"0\"\nf = \"sin(x)\"\n"
                             "[sampling]\nbox = [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]\npoints = 64\nseed = 7\n"
                             "[probe]\nC = 1.0\n";
    return summary(run_checks(parse_spec(text), Command::probe)).at("variation").get<double>();
  };
  const double v0 = variation(0.0), v2 = variation(2.0);
  l.require(v0 <= 1e-10, "beta = 0 variation " + fmt(v0));
  l.require(v2 >= 1e-3, "beta = 2 variation " + fmt(v2));
  l.note("variation " + fmt(v0) + " at beta = 0, " + fmt(v2) + " at beta = 2");
  return l.result();
}

Outcome darboux_properties() {
  Ledger l;
  support::ExprGenerator gen(314);
  std::mt19937 rng(2718);
  const Bindings env{{"k", 0.6}};
  const Expr frozen_z = Expr::number(0.3);
  const Expr y2 = parse("y^2");
  int ps_true = 0, ps_false = 0, nil_true = 0, nil_false = 0, undecided = 0;
  double axioms = 0.0, value_gap = 0.0;

  for (int n = 0; n < 50; ++n) {
    const int family = n % 3;
    Expr a, b, c;
    if (family == 2) {
      a = parse(gen.make(2));
      b = Expr::number(n % 2 ? 1.0 : -1.0);
      c = Expr::number(0.0);
    } else {
      b = parse(gen.make(2));
      c = parse("2 + 0.5*sin(" + gen.make(2) + ")");
      if (family == 1) {
        b = b.substitute("z", frozen_z);
        c = c.substitute("z", frozen_z);
      }
      a = (b * b + c * y2 - Expr::number(1.0)) / c;
    }
    const auto pts = random_points(rng, 10);
    const DarbouxStructure d = build_darboux(a, b, c, env, pts);
    const bool z_free = !a.identifiers().count("z") && !b.identifiers().count("z") && !c.identifiers().count("z");

    for (const ChartPoint &p : pts) {
      axioms = std::max(axioms, axioms_check(d, p).worst());
      const HMatrices hm = h_matrices(d, p);
      const double h = 1e-5;
      auto dz = [&](const Expr &e) {
        ChartPoint up = p, down = p;
        up.z += h;
        down.z -= h;
        return (support::eval_value(e, up, env) - support::eval_value(e, down, env)) / (2 * h);
      };
      const double az = dz(a), bz = dz(b), cz = dz(c);
      const double fd_z = std::max({std::abs(az), std::abs(bz), std::abs(cz)});
      const double fd_nil = bz * bz - az * cz;
      value_gap = std::max(value_gap, std::abs(hm.nilpotency - fd_nil));

      if (z_free) {
        l.require(hm.para_sasakian, "z-independent structure not flagged paraSasakian");
      } else if (fd_z > 1e-5) {
        l.require(!hm.para_sasakian, "z-dependent structure flagged paraSasakian");
      } else {
        ++undecided;
      }
      const bool nil_identity = z_free || family == 2;
      if (nil_identity) {
        l.require(hm.nilpotent, "b_z^2 - a_z c_z = 0 but not flagged nilpotent");
      } else if (std::abs(fd_nil) > 1e-5) {
        l.require(!hm.nilpotent, "b_z^2 - a_z c_z != 0 but flagged nilpotent");
      } else {
        ++undecided;
      }
      (hm.para_sasakian ? ps_true : ps_false)++;
      (hm.nilpotent ? nil_true : nil_false)++;
    }
  }
  l.require(axioms <= 1e-10, "axiom residual " + fmt(axioms));
  l.require(value_gap <= 1e-5, "nilpotency differs from finite differences by " + fmt(value_gap));
  l.require(ps_true > 0 && ps_false > 0 && nil_true > 0 && nil_false > 0, "a flag never took both values");
  l.note("50 structures, axioms " + fmt(axioms) + ", paraSasakian " + std::to_string(ps_true) + "/" +
         std::to_string(ps_true + ps_false) + ", nilpotent " + std::to_string(nil_true) + "/" +
         std::to_string(nil_true + nil_false) + ", undecided " + std::to_string(undecided));
  return l.result();
}

Outcome affine_killing_rigidity() {
  Ledger l;
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_real_distribution<double> expo(-8.0, -3.0);
  int zero = 0;
  for (int n = 0; n < 200; ++n) {
    double a1, a2, a3 = u(rng), a4 = 0.0, a5 = 0.0;
    switch (n % 4) {
    case 0: // a4, a5 on the null line of the Jacobi system when it exists
      a1 = u(rng);
      if (std::abs(a1) > std::abs(a3 + 1.0)) {
        a2 = std::sqrt(a1 * a1 - (a3 + 1.0) * (a3 + 1.0));
        const double t = u(rng);
        a4 = t * (a3 + a1 + 1.0);
        a5 = -t * a2;
      } else {
        a2 = u(rng);
      }
      break;
    case 1: a1 = a2 = 0.0; break;
    case 2: // near the zero locus
      a1 = std::pow(10.0, expo(rng)) * (u(rng) > 0 ? 1 : -1);
      a2 = std::pow(10.0, expo(rng)) * (u(rng) > 0 ? 1 : -1);
      break;
    default:
      a1 = 0.0;
      a2 = std::pow(10.0, expo(rng));
    }
    const ParacontactFrameSpec spec = constant_paracontact(a1, a2, a3, a4, a5);
    const Vec3<double> jac = jacobi_residual(spec, {});
    l.require(std::max({std::abs(jac[0]), std::abs(jac[1]), std::abs(jac[2])}) <= 1e-12,
              "generated spec violates Jacobi");
    const Vec3<double> r = affine_killing_residual(spec, {});
    if (std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])}) == 0.0) {
      ++zero;
      l.require(std::abs(a1) <= 1e-12 && std::abs(a2) <= 1e-12,
                "residual 0 with a1 = " + fmt(a1) + ", a2 = " + fmt(a2));
    }
  }
  l.require(zero > 0, "no spec had zero residual");
  l.note("200 specs, " + std::to_string(zero) + " with zero residual, all with a1 = a2 = 0");
  return l.result();
}

Outcome normal_rigidity() {
  Ledger l;
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  int accepted = 0;
  for (int n = 0; n < 200; ++n) {
    const double s = u(rng), t = u(rng), v = u(rng), w = u(rng);
    double b1 = 0, b2 = 0, a3 = 0, a4 = 0, a5 = 0;
    switch (n % 5) {
    case 0: b2 = s, a3 = t; break;
    case 1: b2 = s, a3 = -s; break;
    case 2: b2 = s, a3 = s, a4 = v, a5 = w; break;
    case 3: b1 = s, a3 = t; break;
    default: b1 = s, a3 = s, a4 = v, a5 = v;
    }
    const double lambda = (n / 5) % 2 ? 2.0 * (b1 * b1 - b2 * b2) : u(rng);
    if (lambda == 0.0) continue;
    const NormalFrameSpec spec = constant_normal(b1, b2, a3, a4, a5);
    NormalSolitonReport rep;
    try {
      rep = normal_soliton_check(spec, lambda, {ChartPoint{}});
    } catch (const PreconditionViolated &) {
      continue;
    }
    if (rep.verdict == NormalSolitonVerdict::not_soliton) continue;
    ++accepted;
    l.require(rep.max_abs_b1 <= 1e-10, "accepted lambda != 0 with b1 = " + fmt(rep.max_abs_b1));
    l.require(rep.k && std::abs(*rep.k + b2 * b2) <= 1e-10, "Einstein constant is not -b2^2");
    l.require(rep.einstein_residual && *rep.einstein_residual <= 1e-10, "not Einstein");
  }
  l.require(accepted > 0, "no lambda != 0 spec was accepted");

  const SpecFile steady = load_spec(samples("steady_normal.toml"));
  const NormalFrameSpec spec = steady.normal();
  const auto pts = sample_points(steady.sampling);
  const NormalSolitonReport rep = normal_soliton_check(spec, 0.0, pts);
  l.require(rep.verdict == NormalSolitonVerdict::steady, "1/(z+3) fields not accepted as steady");
  l.require(rep.iht_residual <= 1e-10, "IHT residual " + fmt(rep.iht_residual));
  const Mat3<double> G = frame_metric_matrix();
  double r_gap = 0.0;
  for (const ChartPoint &p : pts) {
    const Mat3<double> rho = frame_ricci(spec, p);
    const double r = G[0][0] * rho[0][0] + G[1][1] * rho[1][1] + G[2][2] * rho[2][2];
    r_gap = std::max(r_gap, std::abs(r + 4.0 * sample(spec, p).b1.v));
  }
  l.require(r_gap <= 1e-9, "r + 4 b1 = " + fmt(r_gap));

  const NormalSolitonReport bad = normal_soliton_check(constant_normal(1.0, 0.0, 0.5, 0.0, 0.0), 2.0, {ChartPoint{}});
  l.require(bad.verdict == NormalSolitonVerdict::not_soliton, "b1 = 1, b2 = 0, lambda = 2 accepted");
  l.note(std::to_string(accepted) + " Einstein acceptances, steady r + 4 b1 within " + fmt(r_gap) +
         ", lambda b1 != 0 rejected");
  return l.result();
}

Outcome conformal_factor_zero() {
  Ledger l;
  support::ExprGenerator gen(8080);
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const FrameRealization coords{{Vec3<Expr>{parse("0"), parse("0"), parse("1")},
                                 Vec3<Expr>{parse("1"), parse("0"), parse("0")},
                                 Vec3<Expr>{parse("0"), parse("1"), parse("0")}}};
  int nonzero = 0;
  for (int n = 0; n < 1000; ++n) {
    const ChartPoint p{u(rng), u(rng), u(rng)};
    double f;
    if (n % 2 == 0) {
      f = conformal_factor(constant_normal(u(rng), u(rng), u(rng), u(rng), u(rng)), p);
    } else {
      auto e = [&] { return parse(gen.make(2)); };
      const NormalFrameSpec spec(e(), e(), e(), e(), e(), Mode::chart, coords, {{"k", 0.6}});
      f = conformal_factor(spec, p);
    }
    if (f != 0.0) ++nonzero;
  }
  l.require(nonzero == 0, std::to_string(nonzero) + " specs with nonzero factor");
  l.note("1000 specs, factor exactly 0");
  return l.result();
}

Outcome jet_vs_finite_differences() {
  Ledger l;
  support::ExprGenerator gen(606);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Bindings env{{"k", 0.6}};
  double worst_err = 0.0;
  for (int n = 0; n < 100; ++n) {
    const Expr e = parse(gen.make(3));
    const ChartPoint p{u(rng), u(rng), u(rng)};
    const Jet2 j = eval_jet(e, p, env);
    const auto fd = support::central_difference(e, p, env, 1e-4);
    for (std::size_t i = 0; i < 3; ++i) {
      worst_err = std::max(worst_err, support::rel_err(j.grad(i), fd.grad[i]));
      for (std::size_t k = 0; k < 3; ++k) worst_err = std::max(worst_err, support::rel_err(j.hess(i, k), fd.hess[i][k]));
    }
  }
  l.require(worst_err <= 1e-6, "relative error " + fmt(worst_err));
  l.note("100 expressions, worst relative error " + fmt(worst_err));
  return l.result();
}

std::string capture(const std::string &cmd) {
  std::string out;
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) throw std::runtime_error("cannot run " + cmd);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return out + "\nstatus " + std::to_string(status);
}

Outcome determinism() {
  Ledger l;
  const char *files[] = {"sl2.toml",          "example_beta2.toml",  "example_beta0.toml", "example_frame.toml",
                         "darboux_generic.toml", "steady_normal.toml", "einstein_normal.toml"};
  const char *commands[] = {"check", "soliton", "crossval", "probe-homogeneity", "report"};
  int runs = 0;
  for (const char *name : files) {
    const SpecFile file = load_spec(samples(name));
    for (const char *cmd : commands) {
      auto once = [&] {
        try {
          return render_json(run_checks(file, *parse_command(cmd)));
        } catch (const Error &e) {
          return std::string("error: ") + e.what();
        }
      };
      l.require(once() == once(), std::string(cmd) + " on " + name + " differs between runs");
      const std::string cli = std::string(PPC_CLI) + " " + cmd + " " + samples(name) + " --format json 2>&1";
      l.require(capture(cli) == capture(cli), std::string("CLI ") + cmd + " on " + name + " differs between runs");
      ++runs;
    }
  }
  l.note(std::to_string(runs) + " command/file pairs, library and CLI output byte-identical");
  return l.result();
}

} // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"homogeneous soliton family", homogeneous_solitons},
      {"inhomogeneous example", inhomogeneous_example},
      {"frame and chart Ricci agree", oracle_equivalence},
      {"homogeneity probe", homogeneity_probe_criterion},
      {"Darboux structures", darboux_properties},
      {"affine Killing rigidity", affine_killing_rigidity},
      {"normal soliton rigidity", normal_rigidity},
      {"normal conformal factor", conformal_factor_zero},
      {"jet derivatives", jet_vs_finite_differences},
      {"deterministic reports", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
              << o.detail << ")\n";
  }
  return failed == 0 ? 0 : 1;
}
