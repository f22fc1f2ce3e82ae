#include "niche/kernel_ops.hpp"

#include <map>

namespace niche {

namespace {

using LatticePoint = Eigen::Matrix<long, Eigen::Dynamic, 1>;

void check_size(const Vector& u, Index n, const char* what) {
  require(u.size() == n, ErrorKind::DimensionMismatch, std::string(what) + " has wrong length");
}

void check_weights(const Grid& grid, const SingularWeights& w) {
  require(w.interior.rows() == grid.interior_size() && w.cross.rows() == grid.interior_size() &&
              w.cross.cols() == grid.exterior_size(),
          ErrorKind::DimensionMismatch, "weights do not match grid");
}

}  // namespace

DiscreteKernel discretize_kernel(const KernelSpec& kernel, const Grid& grid) {
  require(kernel.radius > 0 && std::isfinite(kernel.radius), ErrorKind::InvalidSpec,
          "kernel radius must be positive");
  if (kernel.kind == KernelSpec::Kind::TruncatedGaussian)
    require(kernel.sigma > 0, ErrorKind::InvalidSpec, "gaussian width must be positive");
  const int d = grid.dimension();
  const auto& h = grid.spacing();
  LatticePoint reach(d);
  for (int k = 0; k < d; ++k) reach[k] = static_cast<long>(std::floor(kernel.radius / h[k]));

  std::vector<LatticePoint> offsets;
  std::vector<double> values;
  LatticePoint p = -reach;
  while (true) {
    double r2 = 0.0;
    for (int k = 0; k < d; ++k) r2 += std::pow(static_cast<double>(p[k]) * h[k], 2);
    const double r = std::sqrt(r2);
    if (r < kernel.radius || r2 == 0.0) {
      const double v = kernel.kind == KernelSpec::Kind::UniformBall
                           ? 1.0
                           : std::exp(-r2 / (2 * kernel.sigma * kernel.sigma));
      offsets.push_back(p);
      values.push_back(v);
    }
    int k = 0;
    while (k < d) {
      if (++p[k] <= reach[k]) break;
      p[k] = -reach[k];
      ++k;
    }
    if (k == d) break;
  }

  DiscreteKernel out;
  out.offsets.resize(d, static_cast<Index>(offsets.size()));
  out.values.resize(static_cast<Index>(values.size()));
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    out.offsets.col(static_cast<Index>(i)) = offsets[i];
    out.values[static_cast<Index>(i)] = values[i];
  }
  if (kernel.kind == KernelSpec::Kind::UniformBall) {
    // Continuous ball value before renormalization, for reporting only.
    const double ball = d == 1 ? 2 * kernel.radius
                        : d == 2 ? M_PI * kernel.radius * kernel.radius
                                 : 4.0 / 3.0 * M_PI * std::pow(kernel.radius, 3);
    out.values /= ball;
  }
  out.raw_mass = out.values.sum() * grid.cell_volume();
  out.values /= out.raw_mass;
  return out;
}

Vector convolve(const DiscreteKernel& kernel, const Vector& u, const Grid& grid) {
  check_size(u, grid.interior_size(), "convolution input");
  const Index n = grid.interior_size();
  Vector out = Vector::Zero(n);
  LatticePoint q(grid.dimension());
  for (Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Index k = 0; k < kernel.offsets.cols(); ++k) {
      q = grid.interior_lattice().col(i) + kernel.offsets.col(k);
      const Index j = grid.interior_at(q);
      if (j >= 0) acc += kernel.values[k] * u[j];
    }
    out[i] = acc * grid.cell_volume();
  }
  return out;
}

Vector convolve(const KernelSpec& kernel, const Vector& u, const Grid& grid) {
  return convolve(discretize_kernel(kernel, grid), u, grid);
}

Matrix convolution_matrix(const DiscreteKernel& kernel, const Grid& grid) {
  const Index n = grid.interior_size();
  const double v2 = grid.cell_volume() * grid.cell_volume();
  Matrix c = Matrix::Zero(n, n);
  LatticePoint q(grid.dimension());
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < kernel.offsets.cols(); ++k) {
      q = grid.interior_lattice().col(i) + kernel.offsets.col(k);
      const Index j = grid.interior_at(q);
      if (j >= 0) c(i, j) = kernel.values[k] * v2;
    }
  return c;
}

SingularWeights singular_weights(const Grid& grid, double s, const QuadratureRule& rule) {
  require(s > 0 && s < 1, ErrorKind::OutOfRange, "fractional order must lie in (0,1)");
  require(rule.subdivisions >= 1 && rule.near_range >= 0, ErrorKind::InvalidSpec, "bad quadrature rule");
  const int d = grid.dimension();
  const auto& h = grid.spacing();
  const Index n = grid.interior_size(), m = grid.exterior_size();

  const auto near = near_weights<double>(h, s, rule);
  std::vector<long> off(static_cast<std::size_t>(d));
  auto weight = [&](const auto& a, const auto& b) {
    long cheb = 0;
    for (int k = 0; k < d; ++k) {
      off[static_cast<std::size_t>(k)] = std::abs(a[k] - b[k]);
      cheb = std::max(cheb, off[static_cast<std::size_t>(k)]);
    }
    if (cheb > rule.near_range) return far_weight<double>(off, h, s);
    return near.at(off);
  };

  SingularWeights w;
  w.s = s;
  w.rule = rule;
  w.grid_hash = grid.hash();
  w.interior = Matrix::Zero(n, n);
  const auto& li = grid.interior_lattice();
  const auto& lx = grid.exterior_lattice();
  for (Index j = 0; j < n; ++j)
    for (Index i = j + 1; i < n; ++i) {
      const double v = weight(li.col(i), li.col(j));
      w.interior(i, j) = v;
      w.interior(j, i) = v;
    }
  w.cross.resize(n, m);
  for (Index x = 0; x < m; ++x)
    for (Index i = 0; i < n; ++i) w.cross(i, x) = weight(li.col(i), lx.col(x));
  return w;
}

Vector neumann_extension(const Vector& u, const Grid& grid, const SingularWeights& weights) {
  check_weights(grid, weights);
  check_size(u, grid.interior_size(), "interior values");
  const Vector mass = weights.exterior_sums();
  require((mass.array() > 0).all(), ErrorKind::WeightDegenerate, "exterior cell with zero kernel mass");
  return (weights.cross.transpose() * u).cwiseQuotient(mass);
}

Vector neumann_residual(const Vector& u, const Vector& exterior, const Grid& grid,
                        const SingularWeights& weights) {
  check_weights(grid, weights);
  check_size(u, grid.interior_size(), "interior values");
  check_size(exterior, grid.exterior_size(), "exterior values");
  return exterior.cwiseProduct(weights.exterior_sums()) - weights.cross.transpose() * u;
}

double gagliardo(const Vector& u, const Vector& exterior, const SingularWeights& weights) {
  require(u.size() == weights.interior.rows() && exterior.size() == weights.cross.cols(),
          ErrorKind::DimensionMismatch, "values do not match weights");
  const Vector r_int = weights.interior_row_sums();
  const Vector r_cross = weights.cross_row_sums();
  const Vector d_ext = weights.exterior_sums();
  const double inner = 2.0 * (u.dot(r_int.cwiseProduct(u)) - u.dot(weights.interior * u));
  const double cross = u.dot(r_cross.cwiseProduct(u)) - 2.0 * u.dot(weights.cross * exterior) +
                       exterior.dot(d_ext.cwiseProduct(exterior));
  return inner + 2.0 * cross;
}

}  // namespace niche
