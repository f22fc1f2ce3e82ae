#include "niche/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace niche {

namespace {

Json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Json columns_json(const Matrix& m) {
  Json out = Json::array();
  for (Index j = 0; j < m.cols(); ++j) out.push_back(vector_json(m.col(j)));
  return out;
}

const char* kernel_kind(KernelSpec::Kind k) {
  return k == KernelSpec::Kind::UniformBall ? "uniform_ball" : "truncated_gaussian";
}

}  // namespace

Json to_json(const DomainSpec& spec) {
  Json boxes = Json::array();
  for (const auto& b : spec.boxes) boxes.push_back({{"lower", b.lower}, {"upper", b.upper}});
  return {{"dimension", spec.dimension},
          {"boxes", boxes},
          {"cells_per_axis", spec.cells_per_axis},
          {"exterior_radius", spec.exterior_radius}};
}

Json to_json(const Grid& grid) {
  return {{"spec", to_json(grid.spec())},
          {"spacing", vector_json(grid.spacing())},
          {"exterior_radius", grid.exterior_radius()},
          {"interior_centroids", columns_json(grid.interior_centroids())},
          {"interior_volumes", vector_json(grid.interior_volumes())},
          {"exterior_centroids", columns_json(grid.exterior_centroids())},
          {"exterior_volumes", vector_json(grid.exterior_volumes())}};
}

Json to_json(const KernelSpec& k) {
  return {{"kind", kernel_kind(k.kind)}, {"radius", k.radius}, {"sigma", k.sigma}};
}

Json to_json(const ModelParams& p) {
  Json j = {{"alpha", p.alpha}, {"beta", p.beta}, {"s", p.s}, {"tau", p.tau}};
  if (p.mu.size())
    j["mu"] = vector_json(p.mu);
  else
    j["mu"] = p.mu_value;
  j["kernel"] = p.kernel ? to_json(*p.kernel) : Json(nullptr);
  return j;
}

Json to_json(const Descriptors& d) { return {{"m_bar", d.m_bar}, {"m_under", d.m_under}, {"m0", d.m0}}; }

Json to_json(const EigenPair& pair) {
  return {{"lambda1", pair.lambda1},
          {"residual", pair.residual},
          {"relative_residual", pair.relative_residual},
          {"iterations", pair.iterations},
          {"e", vector_json(pair.e)}};
}

Json to_json(const SolveReport& r) {
  return {{"clause", to_string(r.clause)},
          {"survival", r.survival},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"energy", r.energy},
          {"residual", r.residual},
          {"sup_norm", r.u.size() ? r.u.cwiseAbs().maxCoeff() : 0.0},
          {"u", vector_json(r.u)}};
}

Json to_json(const SurvivalCriteria& c) {
  Json j = {{"clause", to_string(c.clause)},
            {"mass", c.mass},
            {"hostile", c.hostile},
            {"vanishing", c.vanishing},
            {"qbar", c.qbar},
            {"coercivity", c.coercivity},
            {"integrability_ok", c.integrability_ok}};
  j["lambda1"] = c.lambda1 ? Json(*c.lambda1) : Json(nullptr);
  j["threshold_gap"] = c.threshold_gap ? Json(*c.threshold_gap) : Json(nullptr);
  const auto p = c.predicts_survival();
  j["predicts_survival"] = p ? Json(*p) : Json(nullptr);
  return j;
}

Json to_json(const BangBangResource& b) {
  return {{"nominal", to_json(b.nominal)},
          {"realized", to_json(b.realized)},
          {"target_measure", b.target_measure},
          {"realized_measure", b.realized_measure},
          {"cells", b.cells}};
}

Json to_json(const CompetitorFamily& f) {
  return {{"regime", to_string(f.regime)}, {"rho", f.rho}, {"gamma", f.gamma}, {"plateau", f.plateau}};
}

Json to_json(const WalkConfig& c) {
  return {{"dimension", c.dimension},
          {"regime", c.regime == WalkRegime::A ? "A" : "B"},
          {"p", c.p},
          {"alpha", c.alpha},
          {"s", c.s},
          {"h", c.h},
          {"lattice_radius", c.radius()},
          {"neighbor_scale", c.neighbor_scale},
          {"dt", c.dt},
          {"particles", c.particles},
          {"steps", c.steps},
          {"seed", c.seed},
          {"start", c.start}};
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

void CsvTable::add_row(const std::vector<double>& row) {
  require(row.size() == header_.size(), ErrorKind::DimensionMismatch, "csv row has wrong width");
  rows_.push_back(row);
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) out += (k ? "," : "") + header_[k];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += format_double(row[k]);
    }
    out += '\n';
  }
  return out;
}

CsvTable trace_csv(const std::vector<TraceRow>& trace) {
  CsvTable t({"iteration", "energy", "residual", "step"});
  for (const auto& r : trace) t.add_row({static_cast<double>(r.iteration), r.energy, r.residual, r.step});
  return t;
}

CsvTable cell_csv(const Grid& grid, const std::vector<std::pair<std::string, const Vector*>>& columns) {
  std::vector<std::string> header;
  for (int k = 0; k < grid.dimension(); ++k) header.push_back("x" + std::to_string(k));
  for (const auto& [name, v] : columns) {
    require(v->size() == grid.interior_size(), ErrorKind::DimensionMismatch, "column " + name + " has wrong length");
    header.push_back(name);
  }
  CsvTable t(std::move(header));
  for (Index i = 0; i < grid.interior_size(); ++i) {
    std::vector<double> row;
    for (int k = 0; k < grid.dimension(); ++k) row.push_back(grid.interior_centroids()(k, i));
    for (const auto& col : columns) row.push_back((*col.second)[i]);
    t.add_row(row);
  }
  return t;
}

CsvTable histogram_csv(const Histogram& h) {
  std::vector<std::string> header;
  for (int k = 0; k < h.dimension; ++k) header.push_back("x" + std::to_string(k));
  header.push_back("mass");
  CsvTable t(std::move(header));
  for (std::size_t i = 0; i < h.sites.size(); ++i) {
    std::vector<double> row;
    for (int k = 0; k < h.dimension; ++k) row.push_back(static_cast<double>(h.sites[i][k]) * h.h);
    row.push_back(h.mass[i]);
    t.add_row(row);
  }
  return t;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    os.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    os.flush();
    require(static_cast<bool>(os), ErrorKind::Io, "short write to " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(ErrorKind::Io, "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(static_cast<bool>(is), ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

namespace {

constexpr std::uint64_t kWeightMagic = 0x31746877656863ULL;  // "chewht1"

struct WeightHeader {
  std::uint64_t magic;
  std::uint64_t grid_hash;
  double s;
  std::int64_t subdivisions, near_range, rows, exterior;
};

}  // namespace

std::filesystem::path weight_cache_path(const std::filesystem::path& dir, std::uint64_t grid_hash, double s,
                                        const QuadratureRule& rule) {
  char name[96];
  std::snprintf(name, sizeof name, "weights-%016llx-s%.6f-q%d-%d.bin", static_cast<unsigned long long>(grid_hash), s,
                rule.subdivisions, rule.near_range);
  return dir / name;
}

void save_weights(const std::filesystem::path& path, const SingularWeights& w) {
  WeightHeader h{kWeightMagic, w.grid_hash, w.s, w.rule.subdivisions, w.rule.near_range, w.interior.rows(),
                 w.cross.cols()};
  std::string buf(reinterpret_cast<const char*>(&h), sizeof h);
  buf.append(reinterpret_cast<const char*>(w.interior.data()), sizeof(double) * static_cast<std::size_t>(w.interior.size()));
  buf.append(reinterpret_cast<const char*>(w.cross.data()), sizeof(double) * static_cast<std::size_t>(w.cross.size()));
  write_atomic(path, buf);
}

std::shared_ptr<SingularWeights> load_weights(const std::filesystem::path& path, std::uint64_t grid_hash, double s,
                                              const QuadratureRule& rule) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return nullptr;
  WeightHeader h{};
  if (!is.read(reinterpret_cast<char*>(&h), sizeof h)) return nullptr;
  if (h.magic != kWeightMagic || h.grid_hash != grid_hash || h.s != s || h.subdivisions != rule.subdivisions ||
      h.near_range != rule.near_range)
    return nullptr;
  auto w = std::make_shared<SingularWeights>();
  w->s = s;
  w->rule = rule;
  w->grid_hash = grid_hash;
  w->interior.resize(h.rows, h.rows);
  w->cross.resize(h.rows, h.exterior);
  is.read(reinterpret_cast<char*>(w->interior.data()), sizeof(double) * static_cast<std::size_t>(w->interior.size()));
  is.read(reinterpret_cast<char*>(w->cross.data()), sizeof(double) * static_cast<std::size_t>(w->cross.size()));
  if (!is) return nullptr;
  return w;
}

}  // namespace niche
