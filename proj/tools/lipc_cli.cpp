// lipc: solve, optimise and check semilinear control problems with nonsmooth nonlinearities.

#include "lipc/pipeline.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of semilinear elliptic PDEs with nonsmooth (ReLU network) nonlinearities"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool verbose = false;

  for (const char* name : {"solve", "optimize", "check", "approx-study", "mollifier-study"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "TOML problem file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "seed (overrides the config)");
    sub->add_flag("--verbose", verbose, "print solver traces to stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lipc::exit_solver_failure;
  }

  lipc::RunOptions options;
  options.command = app.get_subcommands().front()->get_name();
  options.out_dir = out;
  options.verbose = verbose;
  return lipc::run_from_file(config, options, seed, std::cerr);
}
