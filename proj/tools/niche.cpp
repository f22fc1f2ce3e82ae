#include "niche/cli.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"Steady states and principal eigenvalues of mixed local/nonlocal logistic models"};
  niche::cli::RunOptions opts;
  std::string command;
  int threads = 0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  app.add_option("command", command, "eigen, logistic, optimize, sweep, table1, oscillate or walk (default: from config)");
  app.add_option("--config", opts.config_path, "experiment config (JSON)")->required();
  app.add_option("--out", opts.out_dir, "output directory")->capture_default_str();
  auto* t = app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* s = app.add_option("--seed", seed, "random seed");
  auto* k = app.add_option("--tol", tol, "primary tolerance of the command")->check(CLI::PositiveNumber);
  app.add_flag("--oracle", opts.oracle, "walk: also run the exact master-equation reference");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : niche::cli::kExitValidation;
  }
  opts.command = command;
  if (*t) opts.threads = threads;
  if (*s) opts.seed = seed;
  if (*k) opts.tol = tol;
  return niche::cli::run(opts, std::cerr);
}
