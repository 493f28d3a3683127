#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "branchkit/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Branch point analysis of conformal surface germs"};
  app.require_subcommand(1);
  app.fallthrough();

  branchkit::RunConfig rc;
  std::string config, input, fixture, out, suite, grid;
  std::uint64_t seed = 0;
  double radius = 0.0;
  int jet_order = 0;

  app.add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed for verify");
  auto* grid_opt = app.add_option("--grid", grid, "polar grid as n_r,n_theta");
  auto* radius_opt = app.add_option("--radius", radius, "disk radius");
  auto* order_opt = app.add_option("--jet-order", jet_order, "truncation order, 0 for the default");
  app.add_option("--fixture", fixture, "weierstrass:s,k[,scale] | pure:s[,n] | sphere:s,rho[,round]");

  const std::pair<const char*, const char*> with_map[] = {
      {"build", "build a map and write its jets and samples"},
      {"analyze", "branch order, index, degree and the estimate"},
      {"normalize", "normalizing diffeomorphism and normalized components"},
      {"curvature", "curvature fields and the branch-point classification"},
  };
  for (const auto& [name, help] : with_map) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("input", input, "SurfaceMap JSON");
  }
  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--suite", suite, "suite name or all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  rc.command = app.get_subcommands().front()->get_name();
  if (!config.empty()) rc.config = config;
  if (!input.empty()) rc.input = input;
  if (!fixture.empty()) rc.fixture = fixture;
  if (!out.empty()) rc.out = out;
  if (!suite.empty()) rc.suite = suite;
  if (*seed_opt) rc.seed = seed;
  if (*radius_opt) rc.radius = radius;
  if (*order_opt) rc.jet_order = jet_order;
  if (*grid_opt) {
    const auto comma = grid.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument(grid);
      std::size_t a = 0, b = 0;
      const int nr = std::stoi(grid.substr(0, comma), &a);
      const int nt = std::stoi(grid.substr(comma + 1), &b);
      if (a != comma || b != grid.size() - comma - 1) throw std::invalid_argument(grid);
      rc.grid = std::make_pair(nr, nt);
    } catch (const std::exception&) {
      std::cerr << "--grid expects n_r,n_theta\n";
      return 2;
    }
  }

  const branchkit::RunOutcome outcome = branchkit::run(rc);
  std::cout << outcome.summary.dump(2) << "\n";
  return outcome.exit_code;
}
