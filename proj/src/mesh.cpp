#include "niche/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

namespace niche {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "invalid-spec";
    case ErrorKind::OutOfRange: return "out-of-range";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::EmptyInterior: return "empty-interior";
    case ErrorKind::WeightDegenerate: return "weight-degenerate";
    case ErrorKind::MissingEigenPair: return "missing-eigen-pair";
    case ErrorKind::NotContained: return "not-contained";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Unresolved: return "unresolved";
    case ErrorKind::Nonconvergence: return "nonconvergence";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

DomainSpec DomainSpec::interval(double a, double b, int cells, double exterior_radius) {
  return DomainSpec{1, {Box{{a}, {b}}}, cells, exterior_radius};
}

DomainSpec DomainSpec::square(double a, double b, int cells, double exterior_radius) {
  return DomainSpec{2, {Box{{a, a}, {b, b}}}, cells, exterior_radius};
}

namespace {

using LatticePoint = Eigen::Matrix<long, Eigen::Dynamic, 1>;

class Fnv {
 public:
  void add(const void* data, std::size_t n) {
    auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 0x100000001b3ULL;
    }
  }
  template <typename T>
  void add(const T& v) { add(&v, sizeof(T)); }
  std::uint64_t value() const { return h_; }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

long snap(double x, const char* what) {
  const double r = std::round(x);
  require(std::abs(x - r) < 1e-9 * std::max(1.0, std::abs(x)), ErrorKind::InvalidSpec,
          std::string(what) + " is not aligned with the lattice of the first box");
  return static_cast<long>(r);
}

// Visits every lattice point of [lo, hi) with axis 0 fastest.
template <typename F>
void for_each_lattice(const LatticePoint& lo, const LatticePoint& hi, F&& f) {
  const int d = static_cast<int>(lo.size());
  for (int k = 0; k < d; ++k)
    if (hi[k] <= lo[k]) return;
  LatticePoint p = lo;
  while (true) {
    f(p);
    int k = 0;
    while (k < d) {
      if (++p[k] < hi[k]) break;
      p[k] = lo[k];
      ++k;
    }
    if (k == d) return;
  }
}

}  // namespace

bool Grid::contains(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  for (const auto& b : spec_.boxes) {
    bool in = true;
    for (int k = 0; k < dim_ && in; ++k) in = x[k] > b.lower[k] && x[k] < b.upper[k];
    if (in) return true;
  }
  return false;
}

double Grid::distance_to_domain(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& b : spec_.boxes) {
    double d2 = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double t = std::max({b.lower[k] - x[k], 0.0, x[k] - b.upper[k]});
      d2 += t * t;
    }
    best = std::min(best, std::sqrt(d2));
  }
  return best;
}

bool Grid::contains_ball(const Eigen::Ref<const Eigen::VectorXd>& center, double r) const {
  const double slack = 1e-12 * std::max(1.0, r);
  for (const auto& b : spec_.boxes) {
    bool in = true;
    for (int k = 0; k < dim_ && in; ++k)
      in = center[k] - r >= b.lower[k] - slack && center[k] + r <= b.upper[k] + slack;
    if (in) return true;
  }
  // Unions: no exterior cell may meet the open ball. Only meaningful when the
  // collar is at least as wide as the ball.
  if (r > exterior_radius_ || !contains(center)) return false;
  for (Index x = 0; x < exterior_size(); ++x) {
    double d2 = 0.0;
    for (int k = 0; k < dim_; ++k) {
      const double lo = exterior_centroids_(k, x) - 0.5 * spacing_[k];
      const double t = std::max({lo - center[k], 0.0, center[k] - lo - spacing_[k]});
      d2 += t * t;
    }
    if (std::sqrt(d2) < r - slack) return false;
  }
  return true;
}

Index Grid::interior_at(const Eigen::Ref<const LatticePoint>& p) const {
  Index flat = 0, stride = 1;
  for (int k = 0; k < dim_; ++k) {
    const long off = p[k] - box_lo_[k];
    if (off < 0 || off >= box_extent_[k]) return -1;
    flat += off * stride;
    stride *= box_extent_[k];
  }
  return lookup_[static_cast<std::size_t>(flat)];
}

Grid build_grid(const DomainSpec& spec) {
  require(spec.dimension >= 1 && spec.dimension <= 3, ErrorKind::InvalidSpec,
          "dimension must be 1, 2 or 3");
  require(!spec.boxes.empty(), ErrorKind::InvalidSpec, "domain needs at least one box");
  require(spec.cells_per_axis >= 2, ErrorKind::InvalidSpec, "cells_per_axis must be at least 2");
  const int d = spec.dimension;
  for (const auto& b : spec.boxes) {
    require(static_cast<int>(b.lower.size()) == d && static_cast<int>(b.upper.size()) == d,
            ErrorKind::InvalidSpec, "box corner has wrong dimension");
    for (int k = 0; k < d; ++k)
      require(std::isfinite(b.lower[k]) && std::isfinite(b.upper[k]) && b.lower[k] < b.upper[k],
              ErrorKind::InvalidSpec, "box must have positive extent");
  }
  require(std::isfinite(spec.exterior_radius), ErrorKind::InvalidSpec, "exterior radius must be finite");

  Grid g;
  g.spec_ = spec;
  g.dim_ = d;
  const Box& first = spec.boxes.front();
  g.origin_.resize(d);
  g.spacing_.resize(d);
  for (int k = 0; k < d; ++k) {
    g.origin_[k] = first.lower[k];
    g.spacing_[k] = (first.upper[k] - first.lower[k]) / spec.cells_per_axis;
  }
  g.cell_volume_ = g.spacing_.prod();

  std::vector<std::pair<LatticePoint, LatticePoint>> ranges;
  LatticePoint lo = LatticePoint::Constant(d, std::numeric_limits<long>::max());
  LatticePoint hi = LatticePoint::Constant(d, std::numeric_limits<long>::min());
  for (const auto& b : spec.boxes) {
    LatticePoint a(d), c(d);
    for (int k = 0; k < d; ++k) {
      a[k] = snap((b.lower[k] - g.origin_[k]) / g.spacing_[k], "box lower corner");
      c[k] = snap((b.upper[k] - g.origin_[k]) / g.spacing_[k], "box upper corner");
    }
    lo = lo.cwiseMin(a);
    hi = hi.cwiseMax(c);
    ranges.emplace_back(a, c);
  }

  auto centroid = [&](const LatticePoint& p) {
    Eigen::VectorXd x(d);
    for (int k = 0; k < d; ++k) x[k] = g.origin_[k] + (static_cast<double>(p[k]) + 0.5) * g.spacing_[k];
    return x;
  };
  auto inside = [&](const LatticePoint& p) {
    for (const auto& [a, c] : ranges)
      if (((p.array() >= a.array()) && (p.array() < c.array())).all()) return true;
    return false;
  };

  std::vector<LatticePoint> interior;
  for_each_lattice(lo, hi, [&](const LatticePoint& p) {
    if (inside(p)) interior.push_back(p);
  });
  require(!interior.empty(), ErrorKind::EmptyInterior, "no interior cells");

  double diam2 = 0.0;
  for (const auto& bi : spec.boxes)
    for (const auto& bj : spec.boxes) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) {
        const double t = std::max(bj.upper[k] - bi.lower[k], bi.upper[k] - bj.lower[k]);
        s += t * t;
      }
      diam2 = std::max(diam2, s);
    }
  g.diameter_ = std::sqrt(diam2);
  g.exterior_radius_ = spec.exterior_radius > 0 ? spec.exterior_radius : 2.0 * g.diameter_;

  g.box_lo_ = lo;
  g.box_extent_ = hi - lo;
  g.lookup_.assign(static_cast<std::size_t>(g.box_extent_.prod()), -1);
  g.interior_lattice_.resize(d, static_cast<Index>(interior.size()));
  g.interior_centroids_.resize(d, static_cast<Index>(interior.size()));
  for (std::size_t i = 0; i < interior.size(); ++i) {
    g.interior_lattice_.col(static_cast<Index>(i)) = interior[i];
    g.interior_centroids_.col(static_cast<Index>(i)) = centroid(interior[i]);
  }
  for (Index i = 0; i < g.interior_size(); ++i) {
    Index flat = 0, stride = 1;
    for (int k = 0; k < d; ++k) {
      flat += (g.interior_lattice_(k, i) - lo[k]) * stride;
      stride *= g.box_extent_[k];
    }
    g.lookup_[static_cast<std::size_t>(flat)] = i;
  }

  LatticePoint pad(d);
  for (int k = 0; k < d; ++k) pad[k] = static_cast<long>(std::ceil(g.exterior_radius_ / g.spacing_[k]));
  std::vector<LatticePoint> exterior;
  for_each_lattice(LatticePoint(lo - pad), LatticePoint(hi + pad), [&](const LatticePoint& p) {
    if (inside(p)) return;
    if (g.distance_to_domain(centroid(p)) < g.exterior_radius_) exterior.push_back(p);
  });
  g.exterior_lattice_.resize(d, static_cast<Index>(exterior.size()));
  g.exterior_centroids_.resize(d, static_cast<Index>(exterior.size()));
  for (std::size_t x = 0; x < exterior.size(); ++x) {
    g.exterior_lattice_.col(static_cast<Index>(x)) = exterior[x];
    g.exterior_centroids_.col(static_cast<Index>(x)) = centroid(exterior[x]);
  }

  Fnv h;
  h.add(d);
  for (int k = 0; k < d; ++k) {
    h.add(g.origin_[k]);
    h.add(g.spacing_[k]);
  }
  h.add(g.exterior_radius_);
  h.add(g.interior_lattice_.data(), sizeof(long) * static_cast<std::size_t>(g.interior_lattice_.size()));
  h.add(g.exterior_lattice_.data(), sizeof(long) * static_cast<std::size_t>(g.exterior_lattice_.size()));
  g.hash_ = h.value();
  return g;
}

int connected_components(const Grid& grid) {
  const Index n = grid.interior_size();
  const int d = grid.dimension();
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int count = 0;
  LatticePoint q(d);
  for (Index start = 0; start < n; ++start) {
    if (label[static_cast<std::size_t>(start)] >= 0) continue;
    std::queue<Index> todo;
    todo.push(start);
    label[static_cast<std::size_t>(start)] = count;
    while (!todo.empty()) {
      const Index i = todo.front();
      todo.pop();
      for (int k = 0; k < d; ++k)
        for (long step : {-1L, 1L}) {
          q = grid.interior_lattice().col(i);
          q[k] += step;
          const Index j = grid.interior_at(q);
          if (j >= 0 && label[static_cast<std::size_t>(j)] < 0) {
            label[static_cast<std::size_t>(j)] = count;
            todo.push(j);
          }
        }
    }
    ++count;
  }
  return count;
}

}  // namespace niche
