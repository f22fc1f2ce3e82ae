#include "niche/operators.hpp"

#include <iomanip>

namespace niche {

void ModelParams::validate(const Grid& grid) const {
  require(std::isfinite(alpha) && std::isfinite(beta) && alpha >= 0 && beta >= 0 && alpha + beta > 0,
          ErrorKind::InvalidSpec, "need alpha, beta >= 0 with alpha + beta > 0");
  require(beta == 0 || (s > 0 && s < 1), ErrorKind::OutOfRange, "fractional order must lie in (0,1)");
  require(std::isfinite(tau) && tau >= 0, ErrorKind::InvalidSpec, "pollination rate must be >= 0");
  if (mu.size() != 0)
    require(mu.size() == grid.interior_size(), ErrorKind::DimensionMismatch, "saturation has wrong length");
  const Vector m = saturation(grid);
  require(m.allFinite() && m.minCoeff() > 0, ErrorKind::InvalidSpec, "saturation must be bounded below by a positive constant");
}

SparseMatrix local_stiffness(const Grid& grid) {
  const Index n = grid.interior_size();
  const int d = grid.dimension();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(n) * (2 * d + 1));
  Eigen::Matrix<long, Eigen::Dynamic, 1> q(d);
  Vector diag = Vector::Zero(n);
  for (Index i = 0; i < n; ++i)
    for (int k = 0; k < d; ++k) {
      q = grid.interior_lattice().col(i);
      q[k] += 1;
      const Index j = grid.interior_at(q);
      if (j < 0) continue;
      // face area / centroid distance
      const double c = grid.cell_volume() / (grid.spacing()[k] * grid.spacing()[k]);
      t.emplace_back(i, j, -c);
      t.emplace_back(j, i, -c);
      diag[i] += c;
      diag[j] += c;
    }
  for (Index i = 0; i < n; ++i) t.emplace_back(i, i, diag[i]);
  SparseMatrix a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

OperatorBundle assemble(const Grid& grid, const ModelParams& params,
                        std::shared_ptr<const SingularWeights> weights) {
  params.validate(grid);
  const Index n = grid.interior_size();
  OperatorBundle ops;
  ops.dimension = grid.dimension();
  ops.alpha = params.alpha;
  ops.beta = params.beta;
  ops.s = params.s;
  ops.volumes = grid.interior_volumes();
  ops.local = local_stiffness(grid);
  ops.stiffness = params.alpha * Matrix(ops.local);

  if (params.beta > 0) {
    if (!weights) weights = std::make_shared<SingularWeights>(singular_weights(grid, params.s));
    require(weights->grid_hash == grid.hash() && weights->s == params.s, ErrorKind::DimensionMismatch,
            "weights were computed for another grid or order");
    const Vector d_ext = weights->exterior_sums();
    require((d_ext.array() > 0).all(), ErrorKind::WeightDegenerate, "exterior cell with zero kernel mass");
    const Vector r_int = weights->interior_row_sums();
    const Vector r_cross = weights->cross_row_sums();
    ops.nonlocal = -weights->interior;
    ops.nonlocal.diagonal() += r_int + r_cross;
    const Matrix scaled = weights->cross * d_ext.cwiseInverse().cwiseSqrt().asDiagonal();
    ops.nonlocal.selfadjointView<Eigen::Lower>().rankUpdate(scaled, -1.0);
    ops.nonlocal.triangularView<Eigen::StrictlyUpper>() = ops.nonlocal.transpose().eval();
    ops.stiffness += params.beta * ops.nonlocal;
    ops.weights = std::move(weights);
  } else {
    ops.nonlocal = Matrix::Zero(n, n);
  }

  if (params.kernel) ops.convolution = convolution_matrix(discretize_kernel(*params.kernel, grid), grid);
  return ops;
}

void write_triplets(std::ostream& os, const Matrix& a, double drop) {
  os << std::setprecision(17);
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      if (std::abs(a(i, j)) > drop) os << i << ' ' << j << ' ' << a(i, j) << '\n';
}

void write_triplets(std::ostream& os, const SparseMatrix& a) {
  os << std::setprecision(17);
  for (Index j = 0; j < a.outerSize(); ++j)
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace niche
