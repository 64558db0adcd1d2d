// ppc: verify paracontact structure specs from the command line.
//
// Exit codes: 0 every check passed, 1 a residual exceeded its tolerance,
// 2 bad input (usage, unreadable file, schema or evaluation error).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ppc/report.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Paracontact structure checker", "ppc"};
  app.set_version_flag("--version", std::string("ppc ") + ppc::kToolVersion);

  std::string command, path, format = "text";
  std::optional<double> tol;
  std::size_t points = 64;
  std::uint64_t seed = 7;
  bool skip_singular = false;

  app.add_option("command", command, "check | soliton | crossval | probe-homogeneity | report")
      ->required()
      ->check(CLI::IsMember({"check", "soliton", "crossval", "probe-homogeneity", "report"}));
  app.add_option("file", path, "spec file")->required();
  app.add_option("--tol", tol, "override the per-check tolerance")->check(CLI::PositiveNumber);
  auto *points_opt = app.add_option("--points", points, "random sample points (default 64)")->check(CLI::Range(1, 10000000));
  auto *seed_opt = app.add_option("--seed", seed, "sampling seed (default 7)");
  app.add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--skip-singular", skip_singular, "drop sample points where evaluation hits a singularity");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitInput;
  }

  ppc::RunOptions opt;
  opt.tol = tol;
  if (points_opt->count()) opt.points = points;
  if (seed_opt->count()) opt.seed = seed;
  opt.skip_singular = skip_singular;

  try {
    const ppc::SpecFile spec = ppc::load_spec(path);
    const ppc::Json report = ppc::run_checks(spec, *ppc::parse_command(command), opt);
    std::cout << (format == "json" ? ppc::render_json(report) : ppc::render_text(report));
    return report["pass"].get<bool>() ? kExitPass : kExitFail;
  } catch (const ppc::Error &e) {
    std::cerr << "ppc: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception &e) {
    std::cerr << "ppc: internal error: " << e.what() << "\n";
    return kExitInput;
  }
}
