#include "niche/cli.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace niche;
using namespace niche::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("niche_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

Json eigen_config() {
  return Json::parse(R"({
    "command": "eigen",
    "domain": {"interval": [-1, 1], "cells_per_axis": 24, "exterior_radius": 0.5},
    "params": {"alpha": 1.0, "beta": 0.5, "s": 0.4},
    "resource": {"kind": "bang_bang", "m_bar": 2.0, "m_under": 1.0, "m0": -0.4}
  })");
}

std::string write_config(const fs::path& dir, const Json& j) {
  const auto p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p.string();
}

Json read_json(const fs::path& p) { return Json::parse(read_file(p)); }

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    std::string body = read_file(e.path());
    if (e.path().filename() == "manifest.json") {
      Json j = Json::parse(body);
      j.erase("timings");
      body = j.dump();
    }
    out[e.path().filename().string()] = body;
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing is strict") {
  Json j = eigen_config();
  j["params"]["gamma"] = 1;
  try {
    parse_config(j);
    FAIL("expected an unknown-key error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidSpec);
    CHECK(std::string(e.what()).find("gamma") != std::string::npos);
  }
  j = eigen_config();
  j["domain"]["boxes"] = Json::array();
  CHECK_THROWS_AS(parse_config(j), Error);
  j = eigen_config();
  j["params"]["alpha"] = "one";
  CHECK_THROWS_AS(parse_config(j), Error);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"walk": {"regime": "B", "p": 0.1}})")), Error);
  CHECK_THROWS_AS(parse_config(Json::parse(R"({"walk": {"regime": "C"}})")), Error);
}

TEST_CASE("echo fills defaults and reads back") {
  Json j = eigen_config();
  j["walk"] = {{"regime", "B"}, {"alpha", 2.0}, {"h", 0.1}, {"steps", 3}};
  j["table1"] = Json::parse(R"([{"name": "a", "domain": {"interval": [0, 1], "cells_per_axis": 8},
                                  "sweep": {"axis": "m_bar", "values": [1, 2]}}])");
  const ExperimentConfig c = parse_config(j);
  const Json e = echo(c);
  CHECK(e["tolerances"]["eigen"] == 1e-12);
  CHECK(e["quadrature"]["near_range"] == 4);
  CHECK(e["walk"]["alpha"] == 2.0);
  CHECK(echo(parse_config(e)).dump() == e.dump());
}

TEST_CASE("validation catches inconsistent configs") {
  auto bad = [](Json j) {
    try {
      validate(parse_config(j));
    } catch (const Error&) {
      return true;
    }
    return false;
  };
  Json j = eigen_config();
  CHECK_FALSE(bad(j));
  j["command"] = "plot";
  CHECK(bad(j));
  j = eigen_config();
  j["tolerances"] = {{"eigen", 0.0}};
  CHECK(bad(j));
  j = eigen_config();
  j["resource"]["m0"] = -1.5;
  CHECK(bad(j));
  j = eigen_config();
  j["resource"] = {{"kind", "values"}, {"values", {1.0, -1.0}}};
  CHECK(bad(j));
  j = eigen_config();
  j["command"] = "sweep";
  j["sweep"] = {{"axis", "m_bar"}, {"values", {1.0, 3.0, 2.0}}};
  CHECK(bad(j));
  j["sweep"] = {{"axis", "m_bar"}, {"values", {1.0, 2.0, 3.0}}};
  CHECK_FALSE(bad(j));
  j["sweep"] = {{"axis", "omega"}, {"values", {1.0, 100.0}}};
  CHECK(bad(j));
  j = eigen_config();
  j["command"] = "table1";
  j["table1"] = Json::parse(R"([{"name": "a/b", "domain": {"interval": [0, 1], "cells_per_axis": 8},
                                  "sweep": {"axis": "m_bar", "values": [1, 2]}}])");
  CHECK(bad(j));
}

TEST_CASE("eigen run writes the eigenpair, the eigenfunction and a manifest") {
  TempDir dir;
  RunOptions opts;
  opts.config_path = write_config(dir.path, eigen_config());
  opts.out_dir = (dir.path / "out").string();
  std::ostringstream err;
  REQUIRE(run(opts, err) == kExitOk);
  CHECK(err.str().empty());
  const Json eig = read_json(dir.path / "out" / "eigen.json");
  CHECK(eig["lambda1"].get<double>() > 0);
  CHECK(eig["residual"].get<double>() < 1e-8);
  const std::string csv = read_file(dir.path / "out" / "eigenfunction.csv");
  CHECK(csv.rfind("x0,m,e\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);
  const Json man = read_json(dir.path / "out" / "manifest.json");
  CHECK(man["status"] == "ok");
  CHECK(man["partial"] == false);
  CHECK(man["config"]["params"]["s"] == 0.4);
  CHECK(man["results"]["lambda1"] == eig["lambda1"]);
  CHECK(man.contains("timings"));
}

TEST_CASE("identical configs give byte-identical artifacts") {
  TempDir dir;
  Json j = eigen_config();
  j["command"] = "sweep";
  j["sweep"] = {{"axis", "m_bar"}, {"values", {1.0, 2.0, 4.0}}};
  j["threads"] = 3;
  RunOptions opts;
  opts.config_path = write_config(dir.path, j);
  std::ostringstream err;
  opts.out_dir = (dir.path / "a").string();
  REQUIRE(run(opts, err) == kExitOk);
  opts.out_dir = (dir.path / "b").string();
  opts.threads = 1;
  REQUIRE(run(opts, err) == kExitOk);
  auto a = snapshot(dir.path / "a"), b = snapshot(dir.path / "b");
  // the thread count is echoed, nothing else may differ
  CHECK(a.at("sweep.csv") == b.at("sweep.csv"));
  Json ma = Json::parse(a.at("manifest.json")), mb = Json::parse(b.at("manifest.json"));
  ma["config"].erase("threads");
  mb["config"].erase("threads");
  CHECK(ma == mb);
  opts.out_dir = (dir.path / "c").string();
  REQUIRE(run(opts, err) == kExitOk);
  CHECK(snapshot(dir.path / "c") == b);
}

TEST_CASE("errors map to exit codes and leave no artifacts") {
  TempDir dir;
  std::ostringstream err;
  RunOptions opts;
  opts.out_dir = (dir.path / "out").string();

  SUBCASE("validation") {
    Json j = eigen_config();
    j["resource"]["m_bar"] = -1;
    opts.config_path = write_config(dir.path, j);
    CHECK(run(opts, err) == kExitValidation);
    CHECK_FALSE(fs::exists(dir.path / "out"));
    const Json report = Json::parse(err.str());
    CHECK(report["exit"] == 2);
    CHECK(report["error"] == "invalid-spec");
  }
  SUBCASE("malformed JSON") {
    opts.config_path = (dir.path / "broken.json").string();
    std::ofstream(opts.config_path) << "{\"command\": ";
    CHECK(run(opts, err) == kExitValidation);
    CHECK_FALSE(fs::exists(dir.path / "out"));
  }
  SUBCASE("command mismatch") {
    opts.config_path = write_config(dir.path, eigen_config());
    opts.command = "walk";
    CHECK(run(opts, err) == kExitValidation);
  }
  SUBCASE("missing config") {
    opts.config_path = (dir.path / "absent.json").string();
    CHECK(run(opts, err) == kExitIo);
  }
  SUBCASE("unwritable output") {
    opts.config_path = write_config(dir.path, eigen_config());
    std::ofstream(dir.path / "file") << "x";
    opts.out_dir = (dir.path / "file" / "out").string();
    CHECK(run(opts, err) == kExitIo);
    CHECK(Json::parse(err.str())["exit"] == 4);
  }
}

TEST_CASE("nonconvergence keeps flagged partial artifacts") {
  TempDir dir;
  Json j = eigen_config();
  j["command"] = "logistic";
  j["resource"]["m_bar"] = 20.0;
  j["tolerances"] = {{"residual", 1e-300}, {"step", 1e-300}};
  RunOptions opts;
  opts.config_path = write_config(dir.path, j);
  opts.out_dir = (dir.path / "out").string();
  std::ostringstream err;
  CHECK(run(opts, err) == kExitNonconvergence);
  const Json man = read_json(dir.path / "out" / "manifest.json");
  CHECK(man["partial"] == true);
  CHECK(man["status"] == "nonconvergence");
  CHECK(fs::exists(dir.path / "out" / "solution.csv"));
  CHECK(Json::parse(err.str())["exit"] == 3);
}

TEST_CASE("tolerance flag targets the residual for logistic runs") {
  TempDir dir;
  Json j = eigen_config();
  j["command"] = "logistic";
  RunOptions opts;
  opts.config_path = write_config(dir.path, j);
  opts.out_dir = (dir.path / "out").string();
  opts.tol = 1e-7;
  std::ostringstream err;
  REQUIRE(run(opts, err) == kExitOk);
  const Json man = read_json(dir.path / "out" / "manifest.json");
  CHECK(man["config"]["tolerances"]["residual"] == 1e-7);
  CHECK(man["config"]["tolerances"]["eigen"] == 1e-12);
  const Json out = read_json(dir.path / "out" / "logistic.json");
  CHECK(out["report"]["residual"].get<double>() <= 1e-7);
  CHECK(fs::exists(dir.path / "out" / "trace.csv"));
}

TEST_CASE("table1 writes one csv per row") {
  TempDir dir;
  const Json j = Json::parse(R"({
    "command": "table1",
    "table1": [
      {"name": "grow_m_bar", "domain": {"interval": [-1, 1], "cells_per_axis": 16, "exterior_radius": 0.5},
       "params": {"alpha": 1.0, "beta": 0.0}, "descriptors": {"m_bar": 1, "m_under": 1, "m0": -0.5},
       "sweep": {"axis": "m_bar", "values": [1, 2, 4]}},
      {"name": "grow_m_under", "domain": {"interval": [-1, 1], "cells_per_axis": 16, "exterior_radius": 0.5},
       "params": {"alpha": 0.0, "beta": 1.0, "s": 0.75}, "descriptors": {"m_bar": 1, "m_under": 1, "m0": -0.5},
       "sweep": {"axis": "m_under", "values": [1, 2]}}
    ]
  })");
  RunOptions opts;
  opts.config_path = write_config(dir.path, j);
  opts.out_dir = (dir.path / "out").string();
  std::ostringstream err;
  REQUIRE(run(opts, err) == kExitOk);
  const std::string a = read_file(dir.path / "out" / "table1_grow_m_bar.csv");
  CHECK(a.rfind("m_sweep_value,lambda_under_estimate\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 4);
  const std::string b = read_file(dir.path / "out" / "table1_grow_m_under.csv");
  CHECK(std::count(b.begin(), b.end(), '\n') == 3);
  const Json man = read_json(dir.path / "out" / "manifest.json");
  CHECK(man["results"]["grow_m_bar"]["lambda_under"].size() == 3);
}

TEST_CASE("walk with the oracle writes aligned densities") {
  TempDir dir;
  const Json j = Json::parse(R"({
    "command": "walk",
    "walk": {"dimension": 1, "regime": "B", "alpha": 1.0, "s": 0.5, "h": 0.1, "lattice_radius": 30,
             "particles": 20000, "steps": 5},
    "seed": 4
  })");
  RunOptions opts;
  opts.config_path = write_config(dir.path, j);
  opts.out_dir = (dir.path / "out").string();
  opts.oracle = true;
  std::ostringstream err;
  REQUIRE(run(opts, err) == kExitOk);
  std::ifstream mc(dir.path / "out" / "walk_mc.csv"), eu(dir.path / "out" / "walk_euler.csv");
  std::string lm, le;
  std::size_t lines = 0;
  while (std::getline(mc, lm)) {
    REQUIRE(std::getline(eu, le));
    CHECK(lm.substr(0, lm.find(',')) == le.substr(0, le.find(',')));
    ++lines;
  }
  CHECK_FALSE(std::getline(eu, le));
  CHECK(lines == 302);  // header plus sites -150..150
  const Json man = read_json(dir.path / "out" / "manifest.json");
  const double tv = man["results"]["tv_distance"];
  CHECK(tv > 0);
  CHECK(tv < 0.05);

  // reflected walk needs a matching domain
  Json k = j;
  k["reflect"] = true;
  k["domain"] = {{"interval", {0.0, 1.0}}, {"cells_per_axis", 20}};
  opts.config_path = write_config(dir.path, k);
  CHECK(run(opts, err) == kExitValidation);
  k["domain"]["cells_per_axis"] = 10;
  opts.config_path = write_config(dir.path, k);
  opts.out_dir = (dir.path / "reflected").string();
  CHECK(run(opts, err) == kExitOk);
}

TEST_CASE("remaining commands run end to end") {
  TempDir dir;
  std::ostringstream err;
  auto go = [&](Json j, const std::string& sub) {
    RunOptions opts;
    opts.config_path = write_config(dir.path, j);
    opts.out_dir = (dir.path / sub).string();
    return run(opts, err);
  };
  Json j = eigen_config();
  j["command"] = "optimize";
  CHECK(go(j, "opt") == kExitOk);
  CHECK(fs::exists(dir.path / "opt" / "optimize.json"));
  CHECK(fs::exists(dir.path / "opt" / "optimizer.csv"));

  j = Json::parse(R"({
    "command": "oscillate",
    "domain": {"interval": [-5, 5], "cells_per_axis": 200, "exterior_radius": 0.5},
    "params": {"alpha": 1.0, "beta": 0.0},
    "resource": {"kind": "oscillatory", "amplitude": 8, "m0": -1},
    "sweep": {"axis": "omega", "values": [3, 6]}
  })");
  CHECK(go(j, "osc") == kExitOk);
  CHECK(fs::exists(dir.path / "osc" / "oscillate.csv"));

  j = Json::parse(R"({
    "command": "sweep",
    "domain": {"square": [-2, 2], "cells_per_axis": 32, "exterior_radius": 0.5},
    "params": {"alpha": 1.0, "beta": 0.0},
    "resource": {"kind": "competitor", "regime": "log2d", "m_bar": 1, "m_under": 1, "m0": -0.5},
    "sweep": {"axis": "rho", "values": [0.25, 0.125]},
    "format": "json"
  })");
  CHECK(go(j, "rho") == kExitOk);
  CHECK(fs::exists(dir.path / "rho" / "sweep.json"));
  CHECK(fs::exists(dir.path / "rho" / "competitors.json"));
  CHECK(err.str().empty());
}
