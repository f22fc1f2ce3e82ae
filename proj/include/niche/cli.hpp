#pragma once

#include "niche/io.hpp"

#include <iosfwd>
#include <optional>

namespace niche::cli {

enum class ResourceKind { Values, BangBang, Oscillatory, Competitor };

struct ResourceSpec {
  ResourceKind kind = ResourceKind::BangBang;
  std::vector<double> values;
  Descriptors descriptors;
  // Favourable cells for bang-bang resources; empty means the discrete ball
  // around the cell nearest the origin.
  std::vector<Index> cells;
  double amplitude = 8.0;
  double omega = 1.0;
  Regime regime = Regime::Log1D;
  double rho = 0.125;
  double gamma = 0.0;
};

// Axes: m_bar, m_under, m0 (lambda-under search), rho (competitor quotient),
// omega (oscillatory lambda1).
struct SweepSpec {
  std::string axis = "m_bar";
  std::vector<double> values;
};

struct Table1Row {
  std::string name;
  DomainSpec domain;
  ModelParams params;
  Descriptors descriptors;
  SweepSpec sweep;
  // Tie m_under to m_bar along the sweep.
  bool symmetric = false;
};

struct Tolerances {
  double eigen = 1e-12;
  double residual = 1e-9;
  double step = 1e-12;
  double membership = 1e-12;
};

struct ExperimentConfig {
  std::string command;
  DomainSpec domain;
  ModelParams params;
  ResourceSpec resource;
  SweepSpec sweep;
  std::vector<Table1Row> table1;
  WalkConfig walk;
  bool oracle = false;
  // Optional grid for the walk's reflection; off means free space.
  bool reflect = false;
  std::string format = "csv";
  Tolerances tol;
  std::uint64_t seed = 1;
  int threads = 1;
  QuadratureRule quadrature;
  std::string weight_cache;  // directory; empty disables the cache
};

ExperimentConfig parse_config(const Json& j);
// Full config with every default filled in.
Json echo(const ExperimentConfig& c);
// Checks everything that can be checked before a solve.
void validate(const ExperimentConfig& c);

struct RunOptions {
  std::string command;  // overrides the config when non-empty
  std::string config_path;
  std::string out_dir = "out";
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool oracle = false;
};

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitIo = 4;

int exit_code(ErrorKind kind);

// Loads, validates and runs; errors go to `err` as one JSON object.
int run(const RunOptions& opts, std::ostream& err);
int run_config(const ExperimentConfig& config, const std::string& out_dir, std::ostream& err);

}  // namespace niche::cli
