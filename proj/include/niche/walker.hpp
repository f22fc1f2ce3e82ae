#pragma once

#include "niche/mesh.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

namespace niche {

enum class WalkRegime { A, B };

struct WalkConfig {
  int dimension = 1;
  double p = 0.5;              // probability of a power-law jump
  double alpha = 0.0;          // regime B only: p = alpha h^{2-2s}
  double s = 0.5;
  double h = 0.05;
  long lattice_radius = 0;     // jumps with |j| > K are dropped; 0 means ceil(64/h)
  long neighbor_scale = 1;     // the classical walk moves by +-scale e_k
  double dt = 0.0025;
  WalkRegime regime = WalkRegime::B;
  long particles = 1000;
  int steps = 1;
  std::uint64_t seed = 1;
  std::vector<long> start;     // lattice site; empty means the origin (or the domain centre)

  // h = n^{1/(s-1)}, neighbor scale n, dt = h^{2s}.
  static WalkConfig regime_a(int dimension, long n, double s, double p);
  // p = alpha h^{2-2s}, neighbor scale 1, dt = h^2.
  static WalkConfig regime_b(int dimension, double alpha, double s, double h);

  long radius() const;
  void validate() const;
};

class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);
  std::size_t sample(std::uint64_t bits) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

struct JumpTable {
  int dimension = 1;
  long radius = 0;
  long neighbor_scale = 1;
  double p = 0.0;
  double s = 0.5;
  IndexMatrix offsets;       // dim x K, every offset with positive mass
  std::vector<double> mass;  // P(j)
  double normalization = 0;  // sum over 0 < |j| <= K of |j|^{-n-2s}
  double tail_estimate = 0;  // omitted part of the untruncated series, relative to normalization
  double total_mass = 0;

  // Samplers for the two components.
  IndexMatrix power_offsets;
  AliasTable power;
};

JumpTable build_jump_table(const WalkConfig& config);

// Sorted lattice sites with their probability mass.
struct Histogram {
  int dimension = 1;
  double h = 1.0;
  std::vector<std::array<long, 3>> sites;
  std::vector<double> mass;

  double total() const;
};

// Positions are reflected into a single-box grid whose spacing equals h:
// classical moves specularly, power-law jumps that land outside are resampled
// into the domain with weight |y - z|^{-n-2s}.
class ReflectingDomain {
 public:
  ReflectingDomain(const Grid& grid, const JumpTable& table);

  Index size() const { return static_cast<Index>(sites_.size()); }
  const std::vector<std::array<long, 3>>& sites() const { return sites_; }
  bool inside(const std::array<long, 3>& y) const;
  std::array<long, 3> reflect_local(std::array<long, 3> y) const;
  // Resampled landing site for an outside point reached by a power-law jump.
  std::array<long, 3> resample(const std::array<long, 3>& y, std::uint64_t bits) const;
  // Distribution of the landing site (as indices into sites()).
  const std::vector<double>& landing(const std::array<long, 3>& y) const;
  Index index_of(const std::array<long, 3>& y) const;
  std::array<long, 3> centre() const;

 private:
  int dim_ = 1;
  std::array<long, 3> lo_{}, hi_{};  // inclusive lattice bounds
  long reach_ = 0;
  std::vector<std::array<long, 3>> sites_;
  std::vector<std::vector<double>> landing_;
  std::vector<AliasTable> landing_alias_;
  Index flat_outside(const std::array<long, 3>& y) const;
};

Histogram simulate(const WalkConfig& config, const JumpTable& table, const ReflectingDomain* domain = nullptr,
                   int threads = 1);

// Exact law of the walk after `steps` steps of the master equation. The mass
// after every step is appended to `mass_trace` when given.
Histogram euler_reference(const WalkConfig& config, const JumpTable& table, int steps,
                          const ReflectingDomain* domain = nullptr, std::vector<double>* mass_trace = nullptr);

double total_variation(const Histogram& a, const Histogram& b);

// Counter-based stream: splitmix64 keyed by (seed, particle).
class ParticleStream {
 public:
  ParticleStream(std::uint64_t seed, std::uint64_t particle);
  std::uint64_t next();
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace niche
