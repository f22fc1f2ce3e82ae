#pragma once

#include "niche/competitors.hpp"
#include "niche/logistic.hpp"
#include "niche/walker.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace niche {

using Json = nlohmann::ordered_json;

Json to_json(const DomainSpec& spec);
Json to_json(const Grid& grid);  // spec plus centroid and volume arrays
Json to_json(const KernelSpec& kernel);
Json to_json(const ModelParams& params);
Json to_json(const Descriptors& d);
Json to_json(const EigenPair& pair);
Json to_json(const SolveReport& report);
Json to_json(const SurvivalCriteria& c);
Json to_json(const BangBangResource& b);
Json to_json(const CompetitorFamily& f);
Json to_json(const WalkConfig& c);

// Shortest decimal that reads back to the same double.
std::string format_double(double x);

// Columns of numbers under a header row; all rows must have header.size() entries.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(const std::vector<double>& row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<double>> rows_;
};

CsvTable trace_csv(const std::vector<TraceRow>& trace);
// One row per interior cell: centroid coordinates, then the values.
CsvTable cell_csv(const Grid& grid, const std::vector<std::pair<std::string, const Vector*>>& columns);
// Bin centres in physical units and mass.
CsvTable histogram_csv(const Histogram& h);

// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

// Binary cache of singular weights, keyed by grid hash, s and quadrature rule.
std::filesystem::path weight_cache_path(const std::filesystem::path& dir, std::uint64_t grid_hash, double s,
                                        const QuadratureRule& rule);
void save_weights(const std::filesystem::path& path, const SingularWeights& w);
// Null when the file is absent or was built for another grid.
std::shared_ptr<SingularWeights> load_weights(const std::filesystem::path& path, std::uint64_t grid_hash, double s,
                                              const QuadratureRule& rule);

}  // namespace niche
