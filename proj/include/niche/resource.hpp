#pragma once

#include "niche/spectral.hpp"

#include <string>
#include <vector>

namespace niche {

// Class M: -m_under <= m <= m_bar, mean m0, positive somewhere.
struct Descriptors {
  double m_bar = 1.0;
  double m_under = 1.0;
  double m0 = -0.5;

  void validate() const;
  // |D| / |Omega| for the bang-bang members
  double favourable_fraction() const { return (m_under + m0) / (m_under + m_bar); }
  double c_star() const { return -(m_under + m0) / m0; }
  double c_sharp() const { return (m0 - m_bar) / m0; }
};

struct Resource {
  Vector values;
  Descriptors descriptors;
};

// Empty string when the values belong to the class, else the violated condition.
std::string membership_violation(const Resource& r, const Grid& grid, double tol = 1e-12);

struct BangBangResource {
  std::vector<Index> cells;  // D, ascending
  Vector values;
  Descriptors nominal;
  Descriptors realized;      // m0 recomputed from the whole-cell D
  double target_measure = 0.0;
  double realized_measure = 0.0;

  Resource resource() const { return {values, realized}; }
};

Index favourable_cell_count(const Descriptors& d, const Grid& grid);
BangBangResource make_bang_bang(std::vector<Index> cells, const Descriptors& d, const Grid& grid);

// Greedy superlevel set of f; ties break toward lower cell index.
BangBangResource bathtub_maximize(const Vector& f, const Descriptors& d, const Grid& grid);

struct LambdaSearchOptions {
  int max_rounds = 200;
  // Initial sets; empty means seeds chosen from the grid geometry.
  std::vector<std::vector<Index>> starts;
  // Grids at most this size use every cell as a seed.
  Index seed_all_below = 64;
  SpectralOptions spectral;
};

struct LambdaSearchResult {
  double lambda_under = 0.0;
  BangBangResource best;
  EigenPair pair;
  std::vector<double> history;  // lambda1 along the winning run
  bool cycling = false;
  int starts = 0;
  int solves = 0;
};

// The k cells nearest to a seed cell (discrete ball, clipped by the boundary).
std::vector<Index> ball_around(Index seed, Index k, const Grid& grid);

LambdaSearchResult minimize_lambda1(const Descriptors& d, const OperatorBundle& ops, const Grid& grid,
                                    const LambdaSearchOptions& opts = {});

// Cutoff used for the oscillatory resource: 1 on B_1, 0 outside B_{3/2},
// quintic smoothstep in between.
double bump(double r);
double bump_slope(double r);

struct OscillatoryResource {
  double amplitude = 0.0;
  double omega = 0.0;
  double m_omega = 0.0;
  Resource resource;
};

OscillatoryResource oscillatory_resource(double amplitude, double omega, double m0, const Grid& grid);

double cells_per_period(double omega, const Grid& grid);

}  // namespace niche
