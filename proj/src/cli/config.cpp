#include "niche/cli.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace niche::cli {

namespace {

void allow(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  require(j.is_object(), ErrorKind::InvalidSpec, where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    require(ok.count(it.key()) > 0, ErrorKind::InvalidSpec, "unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidSpec, where + "." + key + ": " + e.what());
  }
}

DomainSpec parse_domain(const Json& j) {
  allow(j, "domain", {"dimension", "boxes", "cells_per_axis", "exterior_radius", "interval", "square"});
  DomainSpec d;
  double ext = 0.0;
  int cells = 0;
  read(j, "exterior_radius", ext, "domain");
  read(j, "cells_per_axis", cells, "domain");
  if (j.contains("interval") || j.contains("square")) {
    require(!j.contains("boxes"), ErrorKind::InvalidSpec, "domain: give boxes or a shorthand, not both");
    std::vector<double> ab;
    const bool is_interval = j.contains("interval");
    read(j, is_interval ? "interval" : "square", ab, "domain");
    require(ab.size() == 2, ErrorKind::InvalidSpec, "domain shorthand takes [a, b]");
    return is_interval ? DomainSpec::interval(ab[0], ab[1], cells, ext) : DomainSpec::square(ab[0], ab[1], cells, ext);
  }
  read(j, "dimension", d.dimension, "domain");
  d.cells_per_axis = cells;
  d.exterior_radius = ext;
  if (j.contains("boxes")) {
    require(j["boxes"].is_array(), ErrorKind::InvalidSpec, "domain.boxes must be an array");
    for (const auto& b : j["boxes"]) {
      allow(b, "domain.boxes[]", {"lower", "upper"});
      Box box;
      read(b, "lower", box.lower, "box");
      read(b, "upper", box.upper, "box");
      d.boxes.push_back(box);
    }
  }
  return d;
}

KernelSpec parse_kernel(const Json& j) {
  allow(j, "params.kernel", {"kind", "radius", "sigma"});
  KernelSpec k;
  std::string kind = "uniform_ball";
  read(j, "kind", kind, "params.kernel");
  if (kind == "uniform_ball")
    k.kind = KernelSpec::Kind::UniformBall;
  else if (kind == "truncated_gaussian")
    k.kind = KernelSpec::Kind::TruncatedGaussian;
  else
    throw Error(ErrorKind::InvalidSpec, "params.kernel.kind must be uniform_ball or truncated_gaussian");
  read(j, "radius", k.radius, "params.kernel");
  read(j, "sigma", k.sigma, "params.kernel");
  return k;
}

ModelParams parse_params(const Json& j) {
  allow(j, "params", {"alpha", "beta", "s", "tau", "mu", "kernel"});
  ModelParams p;
  read(j, "alpha", p.alpha, "params");
  read(j, "beta", p.beta, "params");
  read(j, "s", p.s, "params");
  read(j, "tau", p.tau, "params");
  if (j.contains("mu")) {
    if (j["mu"].is_number()) {
      p.mu_value = j["mu"].get<double>();
    } else {
      std::vector<double> mu;
      read(j, "mu", mu, "params");
      p.mu = Eigen::Map<const Vector>(mu.data(), static_cast<Index>(mu.size()));
    }
  }
  if (j.contains("kernel") && !j["kernel"].is_null()) p.kernel = parse_kernel(j["kernel"]);
  return p;
}

Descriptors parse_descriptors(const Json& j, Descriptors d, const std::string& where) {
  read(j, "m_bar", d.m_bar, where);
  read(j, "m_under", d.m_under, where);
  read(j, "m0", d.m0, where);
  return d;
}

Regime parse_regime(const std::string& name) {
  for (Regime r : {Regime::Power, Regime::PowerReflected, Regime::Log2D, Regime::Log2DReflected, Regime::Log1D,
                   Regime::Log1DReflected})
    if (name == to_string(r)) return r;
  throw Error(ErrorKind::InvalidSpec, "unknown competitor regime '" + name + "'");
}

ResourceSpec parse_resource(const Json& j) {
  allow(j, "resource",
        {"kind", "values", "m_bar", "m_under", "m0", "cells", "amplitude", "omega", "regime", "rho", "gamma"});
  ResourceSpec r;
  std::string kind = "bang_bang";
  read(j, "kind", kind, "resource");
  if (kind == "values")
    r.kind = ResourceKind::Values;
  else if (kind == "bang_bang")
    r.kind = ResourceKind::BangBang;
  else if (kind == "oscillatory")
    r.kind = ResourceKind::Oscillatory;
  else if (kind == "competitor")
    r.kind = ResourceKind::Competitor;
  else
    throw Error(ErrorKind::InvalidSpec, "resource.kind must be values, bang_bang, oscillatory or competitor");
  read(j, "values", r.values, "resource");
  r.descriptors = parse_descriptors(j, r.descriptors, "resource");
  read(j, "cells", r.cells, "resource");
  read(j, "amplitude", r.amplitude, "resource");
  read(j, "omega", r.omega, "resource");
  std::string regime = to_string(r.regime);
  read(j, "regime", regime, "resource");
  r.regime = parse_regime(regime);
  read(j, "rho", r.rho, "resource");
  read(j, "gamma", r.gamma, "resource");
  return r;
}

SweepSpec parse_sweep(const Json& j, const std::string& where) {
  allow(j, where, {"axis", "values"});
  SweepSpec s;
  read(j, "axis", s.axis, where);
  read(j, "values", s.values, where);
  return s;
}

WalkConfig parse_walk(const Json& j) {
  allow(j, "walk",
        {"dimension", "regime", "p", "alpha", "s", "h", "n", "lattice_radius", "particles", "steps", "start"});
  int dim = 1;
  std::string regime = "B";
  double s = 0.5, h = 0.05, alpha = 1.0;
  long n = 2;
  read(j, "dimension", dim, "walk");
  read(j, "regime", regime, "walk");
  read(j, "s", s, "walk");
  WalkConfig w;
  if (regime == "A") {
    double p = 0.5;
    read(j, "p", p, "walk");
    read(j, "n", n, "walk");
    w = WalkConfig::regime_a(dim, n, s, p);
  } else if (regime == "B") {
    require(!j.contains("p"), ErrorKind::InvalidSpec, "walk: regime B derives p from alpha and h");
    read(j, "alpha", alpha, "walk");
    read(j, "h", h, "walk");
    w = WalkConfig::regime_b(dim, alpha, s, h);
  } else {
    throw Error(ErrorKind::InvalidSpec, "walk.regime must be A or B");
  }
  read(j, "lattice_radius", w.lattice_radius, "walk");
  read(j, "particles", w.particles, "walk");
  read(j, "steps", w.steps, "walk");
  read(j, "start", w.start, "walk");
  return w;
}

const std::set<std::string> kCommands = {"eigen", "logistic", "optimize", "sweep", "table1", "oscillate", "walk"};
const std::set<std::string> kAxes = {"m_bar", "m_under", "m0", "rho", "omega"};

const char* kind_name(ResourceKind k) {
  switch (k) {
    case ResourceKind::Values: return "values";
    case ResourceKind::BangBang: return "bang_bang";
    case ResourceKind::Oscillatory: return "oscillatory";
    case ResourceKind::Competitor: return "competitor";
  }
  return "values";
}

void check_positive(double v, const std::string& name) {
  require(v > 0 && std::isfinite(v), ErrorKind::InvalidSpec, name + " must be positive");
}

void check_sweep(const SweepSpec& s, const std::string& where) {
  require(kAxes.count(s.axis) > 0, ErrorKind::InvalidSpec, where + ": unknown sweep axis '" + s.axis + "'");
  require(!s.values.empty(), ErrorKind::InvalidSpec, where + ": sweep has no values");
  const bool up = s.values.size() < 2 || s.values[1] > s.values[0];
  for (std::size_t i = 1; i < s.values.size(); ++i)
    require(up ? s.values[i] > s.values[i - 1] : s.values[i] < s.values[i - 1], ErrorKind::InvalidSpec,
            where + ": sweep values must be strictly monotone");
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
  allow(j, "config",
        {"command", "domain", "params", "resource", "sweep", "table1", "walk", "oracle", "reflect", "format",
         "tolerances", "seed", "threads", "quadrature", "weight_cache"});
  ExperimentConfig c;
  read(j, "command", c.command, "config");
  if (j.contains("domain")) c.domain = parse_domain(j["domain"]);
  if (j.contains("params")) c.params = parse_params(j["params"]);
  if (j.contains("resource")) c.resource = parse_resource(j["resource"]);
  if (j.contains("sweep")) c.sweep = parse_sweep(j["sweep"], "sweep");
  if (j.contains("table1")) {
    require(j["table1"].is_array(), ErrorKind::InvalidSpec, "table1 must be an array of rows");
    for (const auto& row : j["table1"]) {
      allow(row, "table1[]", {"name", "domain", "params", "descriptors", "sweep", "symmetric"});
      Table1Row r;
      read(row, "name", r.name, "table1[]");
      if (row.contains("domain")) r.domain = parse_domain(row["domain"]);
      if (row.contains("params")) r.params = parse_params(row["params"]);
      if (row.contains("descriptors")) {
        allow(row["descriptors"], "table1[].descriptors", {"m_bar", "m_under", "m0"});
        r.descriptors = parse_descriptors(row["descriptors"], r.descriptors, "table1[].descriptors");
      }
      if (row.contains("sweep")) r.sweep = parse_sweep(row["sweep"], "table1[].sweep");
      read(row, "symmetric", r.symmetric, "table1[]");
      c.table1.push_back(r);
    }
  }
  if (j.contains("walk")) c.walk = parse_walk(j["walk"]);
  read(j, "oracle", c.oracle, "config");
  read(j, "reflect", c.reflect, "config");
  read(j, "format", c.format, "config");
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    allow(t, "tolerances", {"eigen", "residual", "step", "membership"});
    read(t, "eigen", c.tol.eigen, "tolerances");
    read(t, "residual", c.tol.residual, "tolerances");
    read(t, "step", c.tol.step, "tolerances");
    read(t, "membership", c.tol.membership, "tolerances");
  }
  read(j, "seed", c.seed, "config");
  read(j, "threads", c.threads, "config");
  if (j.contains("quadrature")) {
    allow(j["quadrature"], "quadrature", {"subdivisions", "near_range"});
    read(j["quadrature"], "subdivisions", c.quadrature.subdivisions, "quadrature");
    read(j["quadrature"], "near_range", c.quadrature.near_range, "quadrature");
  }
  read(j, "weight_cache", c.weight_cache, "config");
  c.walk.seed = c.seed;
  return c;
}

Json echo(const ExperimentConfig& c) {
  Json j;
  j["command"] = c.command;
  j["domain"] = to_json(c.domain);
  j["params"] = to_json(c.params);
  const auto& r = c.resource;
  j["resource"] = {{"kind", kind_name(r.kind)},
                   {"values", r.values},
                   {"m_bar", r.descriptors.m_bar},
                   {"m_under", r.descriptors.m_under},
                   {"m0", r.descriptors.m0},
                   {"cells", r.cells},
                   {"amplitude", r.amplitude},
                   {"omega", r.omega},
                   {"regime", to_string(r.regime)},
                   {"rho", r.rho},
                   {"gamma", r.gamma}};
  j["sweep"] = {{"axis", c.sweep.axis}, {"values", c.sweep.values}};
  Json rows = Json::array();
  for (const auto& row : c.table1)
    rows.push_back({{"name", row.name},
                    {"domain", to_json(row.domain)},
                    {"params", to_json(row.params)},
                    {"descriptors", to_json(row.descriptors)},
                    {"sweep", {{"axis", row.sweep.axis}, {"values", row.sweep.values}}},
                    {"symmetric", row.symmetric}});
  j["table1"] = rows;
  // Input form, so a manifest's config can be fed back.
  const WalkConfig& w = c.walk;
  Json walk = {{"dimension", w.dimension}, {"regime", w.regime == WalkRegime::A ? "A" : "B"}, {"s", w.s}};
  if (w.regime == WalkRegime::A) {
    walk["p"] = w.p;
    walk["n"] = w.neighbor_scale;
  } else {
    walk["alpha"] = w.alpha;
    walk["h"] = w.h;
  }
  walk["lattice_radius"] = w.radius();
  walk["particles"] = w.particles;
  walk["steps"] = w.steps;
  walk["start"] = w.start;
  j["walk"] = walk;
  j["oracle"] = c.oracle;
  j["reflect"] = c.reflect;
  j["format"] = c.format;
  j["tolerances"] = {{"eigen", c.tol.eigen},
                     {"residual", c.tol.residual},
                     {"step", c.tol.step},
                     {"membership", c.tol.membership}};
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["quadrature"] = {{"subdivisions", c.quadrature.subdivisions}, {"near_range", c.quadrature.near_range}};
  j["weight_cache"] = c.weight_cache;
  return j;
}

void validate(const ExperimentConfig& c) {
  require(kCommands.count(c.command) > 0, ErrorKind::InvalidSpec, "unknown command '" + c.command + "'");
  require(c.format == "csv" || c.format == "json", ErrorKind::InvalidSpec, "format must be csv or json");
  check_positive(c.tol.eigen, "tolerances.eigen");
  check_positive(c.tol.residual, "tolerances.residual");
  check_positive(c.tol.step, "tolerances.step");
  check_positive(c.tol.membership, "tolerances.membership");
  require(c.threads >= 1, ErrorKind::InvalidSpec, "threads must be at least 1");
  require(c.quadrature.subdivisions >= 1 && c.quadrature.near_range >= 0, ErrorKind::InvalidSpec,
          "quadrature needs subdivisions >= 1 and near_range >= 0");

  if (c.command == "walk") {
    c.walk.validate();
    if (c.reflect) {
      const Grid g = build_grid(c.domain);
      require(g.dimension() == c.walk.dimension, ErrorKind::DimensionMismatch, "walk and domain dimensions differ");
      for (int k = 0; k < g.dimension(); ++k)
        require(std::abs(g.spacing()[k] - c.walk.h) <= 1e-9 * c.walk.h, ErrorKind::InvalidSpec,
                "reflecting domain spacing must equal the walk spacing h");
    }
    return;
  }
  if (c.command == "table1") {
    require(!c.table1.empty(), ErrorKind::InvalidSpec, "table1 needs at least one row");
    std::set<std::string> names;
    for (const auto& row : c.table1) {
      require(!row.name.empty() && names.insert(row.name).second, ErrorKind::InvalidSpec,
              "table1 rows need distinct names");
      require(row.name.find_first_of("/\\") == std::string::npos, ErrorKind::InvalidSpec,
              "table1 row names must not contain path separators");
      check_sweep(row.sweep, "table1 row " + row.name);
      require(row.sweep.axis == "m_bar" || row.sweep.axis == "m_under", ErrorKind::InvalidSpec,
              "table1 rows sweep m_bar or m_under");
      const Grid g = build_grid(row.domain);
      row.params.validate(g);
      for (double v : row.sweep.values) {
        Descriptors d = row.descriptors;
        (row.sweep.axis == "m_bar" ? d.m_bar : d.m_under) = v;
        if (row.symmetric) d.m_under = d.m_bar = v;
        d.validate();
      }
    }
    return;
  }

  const Grid grid = build_grid(c.domain);
  c.params.validate(grid);
  const auto& r = c.resource;
  if (c.command == "sweep" || c.command == "oscillate") {
    check_sweep(c.sweep, "sweep");
    if (c.command == "oscillate")
      require(c.sweep.axis == "omega", ErrorKind::InvalidSpec, "oscillate sweeps the omega axis");
    for (double v : c.sweep.values) {
      if (c.sweep.axis == "omega") {
        require(cells_per_period(v, grid) >= 10.0, ErrorKind::InvalidSpec,
                "omega " + std::to_string(v) + " is resolved by fewer than 10 cells per period");
        oscillatory_resource(r.amplitude, v, r.descriptors.m0, grid);
      } else if (c.sweep.axis == "rho") {
        require(r.kind == ResourceKind::Competitor, ErrorKind::InvalidSpec, "rho sweeps need a competitor resource");
        require(v > 0 && v <= 0.25, ErrorKind::OutOfRange, "rho values must lie in (0, 1/4]");
        descriptors_for_radius(r.regime, r.descriptors, grid.dimension(), v, grid.measure());
      } else {
        Descriptors d = r.descriptors;
        (c.sweep.axis == "m_bar" ? d.m_bar : c.sweep.axis == "m_under" ? d.m_under : d.m0) = v;
        d.validate();
        favourable_cell_count(d, grid);
      }
    }
    if (c.sweep.axis == "rho") {
      r.descriptors.validate();
      require(grid.contains_ball(Vector::Zero(grid.dimension()), 2.0), ErrorKind::NotContained,
              "competitor sweeps need the ball of radius 2 inside the domain");
    }
    return;
  }
  if (c.command == "optimize") {
    r.descriptors.validate();
    favourable_cell_count(r.descriptors, grid);
    return;
  }
  // eigen and logistic take a single resource.
  switch (r.kind) {
    case ResourceKind::Values:
      require(static_cast<Index>(r.values.size()) == grid.interior_size(), ErrorKind::DimensionMismatch,
              "resource.values must have one entry per interior cell");
      for (double v : r.values) require(std::isfinite(v), ErrorKind::InvalidSpec, "resource values must be finite");
      break;
    case ResourceKind::BangBang:
      r.descriptors.validate();
      if (!r.cells.empty()) {
        for (Index i : r.cells)
          require(i >= 0 && i < grid.interior_size(), ErrorKind::OutOfRange, "resource.cells index out of range");
        std::vector<Index> sorted = r.cells;
        std::sort(sorted.begin(), sorted.end());
        require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end() &&
                    sorted.size() < static_cast<std::size_t>(grid.interior_size()),
                ErrorKind::InvalidSpec, "resource.cells must be distinct and leave some cells unfavourable");
      } else {
        favourable_cell_count(r.descriptors, grid);
      }
      break;
    case ResourceKind::Oscillatory:
      require(cells_per_period(r.omega, grid) >= 10.0, ErrorKind::InvalidSpec,
              "omega is resolved by fewer than 10 cells per period");
      oscillatory_resource(r.amplitude, r.omega, r.descriptors.m0, grid);
      break;
    case ResourceKind::Competitor:
      competitor_profile(make_competitor(r.regime, r.descriptors, r.rho, r.gamma), grid);
      break;
  }
}

}  // namespace niche::cli
