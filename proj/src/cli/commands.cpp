#include "niche/cli.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <ostream>
#include <thread>

#ifndef NICHE_VERSION
#define NICHE_VERSION "0.0.0"
#endif

namespace niche::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;  // name, contents
  Json results = Json::object();
  bool partial = false;
  std::string note;

  void add(std::string name, std::string contents) { files.emplace_back(std::move(name), std::move(contents)); }
};

SpectralOptions spectral_options(const ExperimentConfig& c) {
  SpectralOptions o;
  o.tol = c.tol.eigen;
  return o;
}

OperatorBundle build_bundle(const Grid& grid, const ModelParams& params, const ExperimentConfig& c) {
  std::shared_ptr<const SingularWeights> weights;
  if (params.beta > 0) {
    if (!c.weight_cache.empty()) {
      std::filesystem::create_directories(c.weight_cache);
      const auto path = weight_cache_path(c.weight_cache, grid.hash(), params.s, c.quadrature);
      auto cached = load_weights(path, grid.hash(), params.s, c.quadrature);
      if (!cached) {
        cached = std::make_shared<SingularWeights>(singular_weights(grid, params.s, c.quadrature));
        save_weights(path, *cached);
      }
      weights = cached;
    } else {
      weights = std::make_shared<SingularWeights>(singular_weights(grid, params.s, c.quadrature));
    }
  }
  return assemble(grid, params, weights);
}

Index nearest_to_origin(const Grid& grid) {
  Index best = 0;
  grid.interior_centroids().colwise().squaredNorm().minCoeff(&best);
  return best;
}

// Resource values for the single-resource commands, with a description.
Vector build_resource(const ExperimentConfig& c, const Grid& grid, const OperatorBundle& ops, Json& info) {
  const auto& r = c.resource;
  switch (r.kind) {
    case ResourceKind::Values:
      info = {{"kind", "values"}};
      return Eigen::Map<const Vector>(r.values.data(), static_cast<Index>(r.values.size()));
    case ResourceKind::BangBang: {
      std::vector<Index> cells = r.cells;
      if (cells.empty()) cells = ball_around(nearest_to_origin(grid), favourable_cell_count(r.descriptors, grid), grid);
      const BangBangResource b = make_bang_bang(cells, r.descriptors, grid);
      info = to_json(b);
      return b.values;
    }
    case ResourceKind::Oscillatory: {
      const OscillatoryResource o = oscillatory_resource(r.amplitude, r.omega, r.descriptors.m0, grid);
      info = {{"kind", "oscillatory"}, {"amplitude", o.amplitude}, {"omega", o.omega}, {"m_omega", o.m_omega}};
      return o.resource.values;
    }
    case ResourceKind::Competitor: {
      const CompetitorFamily f = make_competitor(r.regime, r.descriptors, r.rho, r.gamma);
      const CompetitorQuotient q = competitor_rayleigh(f, r.descriptors, ops, grid);
      info = {{"family", to_json(f)},
              {"quotient", q.quotient},
              {"numerator", q.numerator},
              {"denominator", q.denominator},
              {"resource", to_json(q.resource)}};
      return q.resource.values;
    }
  }
  return {};
}

// Runs f(i) for every point on a small pool; the first failure (by index) is rethrown.
template <typename F>
void parallel_points(std::size_t n, int threads, F&& f) {
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < std::min<int>(threads, static_cast<int>(n)); ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : failures)
    if (e) std::rethrow_exception(e);
}

Artifacts cmd_eigen(const ExperimentConfig& c) {
  const Grid grid = build_grid(c.domain);
  const OperatorBundle ops = build_bundle(grid, c.params, c);
  Json info;
  const Vector m = build_resource(c, grid, ops, info);
  const EigenPair pair = first_positive_eigen(ops, m, spectral_options(c));
  Artifacts a;
  Json out = to_json(pair);
  out["resource"] = info;
  a.add("eigen.json", out.dump(2) + "\n");
  a.add("eigenfunction.csv", cell_csv(grid, {{"m", &m}, {"e", &pair.e}}).str());
  a.results = {{"lambda1", pair.lambda1}, {"residual", pair.residual}};
  return a;
}

Artifacts cmd_logistic(const ExperimentConfig& c) {
  const Grid grid = build_grid(c.domain);
  const OperatorBundle ops = build_bundle(grid, c.params, c);
  Json info;
  const Vector m = build_resource(c, grid, ops, info);
  MinimizeOptions opts;
  opts.tol = c.tol.residual;
  opts.step_tol = c.tol.step;
  SurvivalCriteria criteria;
  const SolveReport report = solve_logistic(ops, m, c.params, opts, &criteria);
  Artifacts a;
  Json out = {{"criteria", to_json(criteria)}, {"report", to_json(report)}, {"resource", info}};
  a.add("logistic.json", out.dump(2) + "\n");
  a.add("solution.csv", cell_csv(grid, {{"m", &m}, {"u", &report.u}}).str());
  a.add("trace.csv", trace_csv(report.trace).str());
  a.results = {{"clause", to_string(report.clause)},
               {"survival", report.survival},
               {"converged", report.converged},
               {"residual", report.residual}};
  if (!report.converged) {
    a.partial = true;
    a.note = "energy minimization stopped before reaching the residual tolerance";
  }
  return a;
}

Json search_json(const LambdaSearchResult& r) {
  return {{"lambda_under", r.lambda_under},
          {"residual", r.pair.residual},
          {"best", to_json(r.best)},
          {"history", r.history},
          {"cycling", r.cycling},
          {"starts", r.starts},
          {"solves", r.solves}};
}

Artifacts cmd_optimize(const ExperimentConfig& c) {
  const Grid grid = build_grid(c.domain);
  const OperatorBundle ops = build_bundle(grid, c.params, c);
  LambdaSearchOptions opts;
  opts.spectral = spectral_options(c);
  const LambdaSearchResult r = minimize_lambda1(c.resource.descriptors, ops, grid, opts);
  Artifacts a;
  a.add("optimize.json", search_json(r).dump(2) + "\n");
  a.add("optimizer.csv", cell_csv(grid, {{"m", &r.best.values}, {"e", &r.pair.e}}).str());
  a.results = {{"lambda_under", r.lambda_under}, {"cycling", r.cycling}, {"solves", r.solves}};
  return a;
}

Descriptors along(Descriptors d, const std::string& axis, double v, bool symmetric) {
  if (axis == "m_bar") d.m_bar = v;
  if (axis == "m_under") d.m_under = v;
  if (axis == "m0") d.m0 = v;
  if (symmetric) d.m_bar = d.m_under = v;
  return d;
}

struct SweepRow {
  std::vector<double> csv;
  Json json;
};

std::vector<SweepRow> run_sweep(const ExperimentConfig& c, const Grid& grid, const OperatorBundle& ops,
                                const SweepSpec& sweep, const Descriptors& base, bool symmetric) {
  std::vector<SweepRow> rows(sweep.values.size());
  const auto& r = c.resource;
  parallel_points(sweep.values.size(), c.threads, [&](std::size_t i) {
    const double v = sweep.values[i];
    if (sweep.axis == "omega") {
      const OscillatoryResource o = oscillatory_resource(r.amplitude, v, r.descriptors.m0, grid);
      const EigenPair p = first_positive_eigen(ops, o.resource.values, spectral_options(c));
      rows[i].csv = {v, o.m_omega, p.lambda1, p.relative_residual, cells_per_period(v, grid)};
      rows[i].json = {{"omega", v}, {"m_omega", o.m_omega}, {"lambda1", p.lambda1}, {"residual", p.relative_residual}};
    } else if (sweep.axis == "rho") {
      // The measure constraint ties rho to the descriptors.
      const Descriptors d = descriptors_for_radius(r.regime, r.descriptors, grid.dimension(), v, grid.measure());
      const CompetitorFamily f = make_competitor(r.regime, d, v, r.gamma);
      const CompetitorQuotient q = competitor_rayleigh(f, d, ops, grid);
      const EigenPair p = first_positive_eigen(ops, q.resource.values, spectral_options(c));
      rows[i].csv = {v, d.m_bar, d.m_under, q.quotient, q.numerator, q.denominator, p.lambda1,
                     q.resource.realized_measure};
      rows[i].json = {{"family", to_json(f)},
                      {"descriptors", to_json(d)},
                      {"quotient", q.quotient},
                      {"numerator", q.numerator},
                      {"denominator", q.denominator},
                      {"lambda1", p.lambda1},
                      {"resource", to_json(q.resource)}};
    } else {
      const Descriptors d = along(base, sweep.axis, v, symmetric);
      LambdaSearchOptions opts;
      opts.spectral = spectral_options(c);
      const LambdaSearchResult s = minimize_lambda1(d, ops, grid, opts);
      rows[i].csv = {v,
                     d.m_bar,
                     d.m_under,
                     d.m0,
                     s.best.realized.m0,
                     s.lambda_under,
                     static_cast<double>(s.best.cells.size()),
                     s.best.realized_measure,
                     s.pair.relative_residual};
      rows[i].json = search_json(s);
      rows[i].json["descriptors"] = to_json(d);
    }
  });
  return rows;
}

std::vector<std::string> sweep_header(const std::string& axis) {
  if (axis == "omega") return {"omega", "m_omega", "lambda1", "residual", "cells_per_period"};
  if (axis == "rho") return {"rho", "m_bar", "m_under", "quotient", "numerator", "denominator", "lambda1", "measure_D"};
  return {axis, "m_bar", "m_under", "m0", "realized_m0", "lambda_under", "cells_D", "measure_D", "residual"};
}

void emit_sweep(Artifacts& a, const std::string& stem, const ExperimentConfig& c, const std::string& axis,
                const std::vector<SweepRow>& rows) {
  if (c.format == "csv") {
    CsvTable t(sweep_header(axis));
    for (const auto& r : rows) t.add_row(r.csv);
    a.add(stem + ".csv", t.str());
  } else {
    Json arr = Json::array();
    for (const auto& r : rows) arr.push_back(r.json);
    a.add(stem + ".json", arr.dump(2) + "\n");
  }
  if (axis == "rho") {
    Json families = Json::array();
    for (const auto& r : rows) families.push_back(r.json["family"]);
    a.add("competitors.json", families.dump(2) + "\n");
  }
}

Artifacts cmd_sweep(const ExperimentConfig& c, const std::string& stem) {
  const Grid grid = build_grid(c.domain);
  const OperatorBundle ops = build_bundle(grid, c.params, c);
  const auto rows = run_sweep(c, grid, ops, c.sweep, c.resource.descriptors, false);
  Artifacts a;
  emit_sweep(a, stem, c, c.sweep.axis, rows);
  Json col = Json::array();
  const std::size_t value_column = c.sweep.axis == "omega" ? 2 : c.sweep.axis == "rho" ? 3 : 5;
  for (const auto& r : rows) col.push_back(r.csv[value_column]);
  a.results = {{"axis", c.sweep.axis}, {"values", c.sweep.values}, {sweep_header(c.sweep.axis)[value_column], col}};
  return a;
}

Artifacts cmd_table1(const ExperimentConfig& c) {
  Artifacts a;
  for (const auto& row : c.table1) {
    const Grid grid = build_grid(row.domain);
    const OperatorBundle ops = build_bundle(grid, row.params, c);
    const auto rows = run_sweep(c, grid, ops, row.sweep, row.descriptors, row.symmetric);
    CsvTable t({"m_sweep_value", "lambda_under_estimate"});
    Json col = Json::array();
    for (const auto& r : rows) {
      t.add_row({r.csv[0], r.csv[5]});
      col.push_back(r.csv[5]);
    }
    a.add("table1_" + row.name + ".csv", t.str());
    a.results[row.name] = {{"axis", row.sweep.axis}, {"values", row.sweep.values}, {"lambda_under", col}};
  }
  return a;
}

Artifacts cmd_walk(const ExperimentConfig& c) {
  const JumpTable table = build_jump_table(c.walk);
  std::optional<Grid> grid;
  std::optional<ReflectingDomain> domain;
  if (c.reflect) {
    grid = build_grid(c.domain);
    domain.emplace(*grid, table);
  }
  const ReflectingDomain* dom = domain ? &*domain : nullptr;
  const Histogram mc = simulate(c.walk, table, dom, c.threads);
  Artifacts a;
  a.results = {{"walk", to_json(c.walk)},
               {"normalization", table.normalization},
               {"total_mass", table.total_mass},
               {"tail_estimate", table.tail_estimate},
               {"sites", mc.sites.size()}};
  if (!c.oracle) {
    a.add("walk_mc.csv", histogram_csv(mc).str());
    return a;
  }
  std::vector<double> trace;
  const Histogram euler = euler_reference(c.walk, table, c.walk.steps, dom, &trace);
  // Align both histograms on the union of their sites.
  Histogram am = mc, ae = euler;
  am.sites.clear();
  am.mass.clear();
  ae.sites.clear();
  ae.mass.clear();
  std::size_t i = 0, j = 0;
  while (i < mc.sites.size() || j < euler.sites.size()) {
    const bool take_mc = j == euler.sites.size() || (i < mc.sites.size() && mc.sites[i] <= euler.sites[j]);
    const bool take_eu = i == mc.sites.size() || (j < euler.sites.size() && euler.sites[j] <= mc.sites[i]);
    const auto site = take_mc ? mc.sites[i] : euler.sites[j];
    am.sites.push_back(site);
    ae.sites.push_back(site);
    am.mass.push_back(take_mc ? mc.mass[i++] : 0.0);
    ae.mass.push_back(take_eu ? euler.mass[j++] : 0.0);
  }
  a.add("walk_mc.csv", histogram_csv(am).str());
  a.add("walk_euler.csv", histogram_csv(ae).str());
  a.results["tv_distance"] = total_variation(mc, euler);
  a.results["euler_final_mass"] = trace.empty() ? 1.0 : trace.back();
  return a;
}

Artifacts dispatch(const ExperimentConfig& c) {
  if (c.command == "eigen") return cmd_eigen(c);
  if (c.command == "logistic") return cmd_logistic(c);
  if (c.command == "optimize") return cmd_optimize(c);
  if (c.command == "sweep") return cmd_sweep(c, "sweep");
  if (c.command == "oscillate") return cmd_sweep(c, "oscillate");
  if (c.command == "table1") return cmd_table1(c);
  if (c.command == "walk") return cmd_walk(c);
  throw Error(ErrorKind::InvalidSpec, "unknown command '" + c.command + "'");
}

void report(std::ostream& err, ErrorKind kind, const std::string& message) {
  Json j = {{"error", to_string(kind)}, {"message", message}, {"exit", exit_code(kind)}};
  err << j.dump() << "\n";
}

Json manifest(const ExperimentConfig& c, const Artifacts& a, const std::string& status, double validate_s,
              double compute_s) {
  Json files = Json::array();
  for (const auto& f : a.files) files.push_back(f.first);
  return {{"status", status},
          {"partial", a.partial},
          {"note", a.note},
          {"version", NICHE_VERSION},
          {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                std::to_string(EIGEN_MINOR_VERSION)},
          {"config", echo(c)},
          {"artifacts", files},
          {"results", a.results},
          {"timings", {{"validate_s", validate_s}, {"compute_s", compute_s}}}};
}

}  // namespace

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Nonconvergence:
    case ErrorKind::Unresolved: return kExitNonconvergence;
    case ErrorKind::Io: return kExitIo;
    default: return kExitValidation;
  }
}

int run_config(const ExperimentConfig& config, const std::string& out_dir, std::ostream& err) {
  const auto t0 = Clock::now();
  try {
    validate(config);
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return exit_code(e.kind());
  }
  const double validate_s = seconds_since(t0);
  const auto t1 = Clock::now();
  Artifacts a;
  std::string status = "ok";
  int code = kExitOk;
  try {
    a = dispatch(config);
    if (a.partial) {
      status = "nonconvergence";
      code = kExitNonconvergence;
      report(err, ErrorKind::Nonconvergence, a.note);
    }
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    if (exit_code(e.kind()) != kExitNonconvergence) return exit_code(e.kind());
    a = Artifacts{};
    a.partial = true;
    a.note = e.what();
    status = "nonconvergence";
    code = kExitNonconvergence;
  } catch (const std::filesystem::filesystem_error& e) {
    report(err, ErrorKind::Io, e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    report(err, ErrorKind::InvalidSpec, e.what());
    return kExitValidation;
  }
  const double compute_s = seconds_since(t1);
  try {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    require(!ec, ErrorKind::Io, "cannot create output directory " + out_dir + ": " + ec.message());
    for (const auto& [name, contents] : a.files) write_atomic(std::filesystem::path(out_dir) / name, contents);
    write_atomic(std::filesystem::path(out_dir) / "manifest.json",
                 manifest(config, a, status, validate_s, compute_s).dump(2) + "\n");
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return exit_code(e.kind());
  } catch (const std::filesystem::filesystem_error& e) {
    report(err, ErrorKind::Io, e.what());
    return kExitIo;
  }
  return code;
}

int run(const RunOptions& opts, std::ostream& err) {
  ExperimentConfig c;
  try {
    const std::string text = read_file(opts.config_path);
    Json j;
    try {
      j = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::InvalidSpec, "config is not valid JSON: " + std::string(e.what()));
    }
    c = parse_config(j);
    if (!opts.command.empty()) {
      require(c.command.empty() || c.command == opts.command, ErrorKind::InvalidSpec,
              "command '" + opts.command + "' does not match the config's '" + c.command + "'");
      c.command = opts.command;
    }
    if (opts.threads) c.threads = *opts.threads;
    if (opts.seed) c.seed = c.walk.seed = *opts.seed;
    if (opts.tol) (c.command == "logistic" ? c.tol.residual : c.tol.eigen) = *opts.tol;
    if (opts.oracle) c.oracle = true;
  } catch (const Error& e) {
    report(err, e.kind(), e.what());
    return exit_code(e.kind());
  }
  return run_config(c, opts.out_dir, err);
}

}  // namespace niche::cli
