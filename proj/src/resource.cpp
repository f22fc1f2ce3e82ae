#include "niche/resource.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace niche {

void Descriptors::validate() const {
  require(std::isfinite(m_bar) && std::isfinite(m_under) && std::isfinite(m0), ErrorKind::InvalidSpec,
          "descriptors must be finite");
  require(m_bar > 0 && m_under > 0, ErrorKind::InvalidSpec, "need m_bar > 0 and m_under > 0");
  require(m0 < 0 && m0 > -m_under, ErrorKind::InvalidSpec, "need -m_under < m0 < 0");
}

std::string membership_violation(const Resource& r, const Grid& grid, double tol) {
  const Vector& m = r.values;
  const Descriptors& d = r.descriptors;
  std::ostringstream os;
  if (m.size() != grid.interior_size()) return "values have wrong length";
  if (m.minCoeff() < -d.m_under - tol * d.m_under) os << "inf m = " << m.minCoeff() << " < -m_under; ";
  if (m.maxCoeff() > d.m_bar + tol * d.m_bar) os << "sup m = " << m.maxCoeff() << " > m_bar; ";
  const double mean = m.sum() / static_cast<double>(m.size());
  if (std::abs(mean - d.m0) > tol * std::max(1.0, std::abs(d.m0))) os << "mean " << mean << " != m0; ";
  if (!(m.maxCoeff() > 0)) os << "m+ vanishes; ";
  return os.str();
}

Index favourable_cell_count(const Descriptors& d, const Grid& grid) {
  d.validate();
  const Index n = grid.interior_size();
  auto mean = [&](Index k) {
    return (d.m_bar * static_cast<double>(k) - d.m_under * static_cast<double>(n - k)) / static_cast<double>(n);
  };
  Index k = static_cast<Index>(std::llround(d.favourable_fraction() * static_cast<double>(n)));
  k = std::clamp<Index>(k, 1, n - 1);
  if (mean(k) >= 0) --k;
  require(k >= 1 && mean(k) < 0, ErrorKind::Infeasible,
          "favourable set cannot be represented by whole cells on this grid");
  return k;
}

BangBangResource make_bang_bang(std::vector<Index> cells, const Descriptors& d, const Grid& grid) {
  d.validate();
  const Index n = grid.interior_size();
  std::sort(cells.begin(), cells.end());
  require(std::adjacent_find(cells.begin(), cells.end()) == cells.end(), ErrorKind::InvalidSpec,
          "favourable set has repeated cells");
  require(!cells.empty() && static_cast<Index>(cells.size()) < n && cells.front() >= 0 && cells.back() < n,
          ErrorKind::InvalidSpec, "favourable set must be a proper nonempty subset of the cells");
  BangBangResource b;
  b.values = Vector::Constant(n, -d.m_under);
  for (Index i : cells) b.values[i] = d.m_bar;
  b.cells = std::move(cells);
  b.nominal = d;
  b.realized = d;
  b.realized.m0 = b.values.mean();
  b.target_measure = d.favourable_fraction() * grid.measure();
  b.realized_measure = static_cast<double>(b.cells.size()) * grid.cell_volume();
  return b;
}

BangBangResource bathtub_maximize(const Vector& f, const Descriptors& d, const Grid& grid) {
  require(f.size() == grid.interior_size(), ErrorKind::DimensionMismatch, "f has wrong length");
  const Index k = favourable_cell_count(d, grid);
  std::vector<Index> order(static_cast<std::size_t>(f.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return f[a] > f[b]; });
  order.resize(static_cast<std::size_t>(k));
  return make_bang_bang(std::move(order), d, grid);
}

std::vector<Index> ball_around(Index seed, Index k, const Grid& grid) {
  const Matrix& c = grid.interior_centroids();
  std::vector<Index> order(static_cast<std::size_t>(grid.interior_size()));
  std::iota(order.begin(), order.end(), Index{0});
  Vector dist = (c.colwise() - c.col(seed)).colwise().squaredNorm().transpose();
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return dist[a] < dist[b]; });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return order;
}

namespace {

std::vector<Index> geometric_seeds(const Grid& grid) {
  const Matrix& c = grid.interior_centroids();
  const int d = grid.dimension();
  const Vector lo = c.rowwise().minCoeff(), hi = c.rowwise().maxCoeff();
  std::set<Index> seeds;
  int total = 1;
  for (int k = 0; k < d; ++k) total *= 3;
  for (int flat = 0; flat < total; ++flat) {
    Vector p(d);
    int rest = flat;
    for (int k = 0; k < d; ++k) {
      p[k] = lo[k] + 0.5 * (rest % 3) * (hi[k] - lo[k]);
      rest /= 3;
    }
    Index best = 0;
    (c.colwise() - p).colwise().squaredNorm().minCoeff(&best);
    seeds.insert(best);
  }
  return {seeds.begin(), seeds.end()};
}

}  // namespace

LambdaSearchResult minimize_lambda1(const Descriptors& d, const OperatorBundle& ops, const Grid& grid,
                                    const LambdaSearchOptions& opts) {
  require(ops.size() == grid.interior_size(), ErrorKind::DimensionMismatch, "bundle does not match grid");
  const Index k = favourable_cell_count(d, grid);
  std::vector<std::vector<Index>> starts = opts.starts;
  if (starts.empty()) {
    std::vector<Index> seeds;
    if (grid.interior_size() <= opts.seed_all_below) {
      seeds.resize(static_cast<std::size_t>(grid.interior_size()));
      std::iota(seeds.begin(), seeds.end(), Index{0});
    } else {
      seeds = geometric_seeds(grid);
    }
    std::set<std::vector<Index>> unique;
    for (Index s : seeds) unique.insert(ball_around(s, k, grid));
    starts.assign(unique.begin(), unique.end());
  }

  LambdaSearchResult out;
  out.lambda_under = std::numeric_limits<double>::infinity();
  std::set<std::vector<Index>> explored;
  for (const auto& start : starts) {
    ++out.starts;
    std::vector<Index> cells = start;
    std::set<std::vector<Index>> visited;
    std::vector<double> history;
    bool cycling = false;
    BangBangResource best_here;
    EigenPair pair_here;
    double best_lambda = std::numeric_limits<double>::infinity();
    for (int round = 0; round < opts.max_rounds; ++round) {
      std::sort(cells.begin(), cells.end());
      if (explored.count(cells)) break;  // joins a run already done
      visited.insert(cells);
      explored.insert(cells);
      BangBangResource bb = make_bang_bang(cells, d, grid);
      EigenPair pair = first_positive_eigen(ops, bb.values, opts.spectral);
      ++out.solves;
      history.push_back(pair.lambda1);
      if (pair.lambda1 < best_lambda) {
        best_lambda = pair.lambda1;
        best_here = bb;
        pair_here = pair;
      }
      std::vector<Index> next = bathtub_maximize(pair.e.cwiseAbs2(), d, grid).cells;
      if (next == cells) break;
      if (visited.count(next)) {
        cycling = true;
        break;
      }
      cells = std::move(next);
    }
    if (best_lambda < out.lambda_under) {
      out.lambda_under = best_lambda;
      out.best = best_here;
      out.pair = pair_here;
      out.history = history;
      out.cycling = cycling;
    }
  }
  return out;
}

double bump(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 1.5) return 0.0;
  const double t = (1.5 - r) / 0.5;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double bump_slope(double r) {
  if (r <= 1.0 || r >= 1.5) return 0.0;
  const double t = (1.5 - r) / 0.5;
  return -2.0 * 30.0 * t * t * (1.0 - t) * (1.0 - t);
}

double cells_per_period(double omega, const Grid& grid) {
  return 2.0 * M_PI / omega / grid.spacing()[0];
}

OscillatoryResource oscillatory_resource(double amplitude, double omega, double m0, const Grid& grid) {
  require(std::isfinite(amplitude) && std::isfinite(omega) && omega > 0, ErrorKind::InvalidSpec,
          "amplitude and frequency must be finite with omega > 0");
  require(m0 < 0, ErrorKind::InvalidSpec, "m0 must be negative");
  require(amplitude > -4.0 * m0, ErrorKind::InvalidSpec, "amplitude must exceed -4 m0");
  const int d = grid.dimension();
  require(grid.contains_ball(Eigen::VectorXd::Zero(d), 4.0), ErrorKind::NotContained,
          "domain must contain the ball of radius 4 about the origin");

  const Matrix& c = grid.interior_centroids();
  const Index n = grid.interior_size();
  Vector wave(n);
  for (Index i = 0; i < n; ++i) wave[i] = bump(c.col(i).norm()) * std::sin(omega * c(0, i));

  OscillatoryResource out;
  out.amplitude = amplitude;
  out.omega = omega;
  out.m_omega = m0 - amplitude * wave.mean();
  out.resource.values = (out.m_omega + amplitude * wave.array()).matrix();
  out.resource.descriptors = {2 * amplitude, 2 * amplitude, m0};

  const Vector& m = out.resource.values;
  std::ostringstream os;
  if (!(out.m_omega >= 2 * m0 && out.m_omega <= m0 / 2))
    os << "mean correction " << out.m_omega << " outside [2 m0, m0/2]; ";
  if (m.cwiseAbs().maxCoeff() > 2 * amplitude) os << "|m| exceeds twice the amplitude; ";
  double sup = -std::numeric_limits<double>::infinity(), inf = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    if (c.col(i).norm() < 1.0) {
      sup = std::max(sup, m[i]);
      inf = std::min(inf, m[i]);
    }
  if (!(sup >= amplitude / 2)) os << "sup over the unit ball " << sup << " below amplitude/2; ";
  if (!(inf <= -amplitude / 2)) os << "inf over the unit ball " << inf << " above -amplitude/2; ";
  require(os.str().empty(), ErrorKind::Infeasible, "oscillatory resource not in class: " + os.str());
  return out;
}

}  // namespace niche
