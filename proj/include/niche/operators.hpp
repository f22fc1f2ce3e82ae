#pragma once

#include "niche/kernel_ops.hpp"

#include <Eigen/Sparse>

#include <memory>
#include <optional>
#include <ostream>

namespace niche {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct ModelParams {
  double alpha = 1.0;
  double beta = 0.0;
  double s = 0.5;
  double tau = 0.0;
  // Saturation per interior cell; empty means the constant `mu_value`.
  Vector mu;
  double mu_value = 1.0;
  std::optional<KernelSpec> kernel;

  Vector saturation(const Grid& grid) const { return saturation_or(grid.interior_size()); }
  Vector saturation_or(Index n) const { return mu.size() ? mu : Vector::Constant(n, mu_value); }
  void validate(const Grid& grid) const;
};

// Everything needed to evaluate the quadratic forms on interior values.
// None of it depends on the resource.
struct OperatorBundle {
  int dimension = 1;
  double alpha = 1.0, beta = 0.0, s = 0.5;
  Vector volumes;
  SparseMatrix local;   // two-point flux stiffness, u'Lu ~ int |grad u|^2
  Matrix nonlocal;      // u'Nu = half the Gagliardo form of the Neumann extension
  Matrix stiffness;     // alpha*local + beta*nonlocal; u'Su is the weak bilinear form
  Matrix convolution;   // entries J(c_i-c_j) vol_i vol_j; empty without a kernel
  std::shared_ptr<const SingularWeights> weights;

  Index size() const { return volumes.size(); }
};

SparseMatrix local_stiffness(const Grid& grid);

// Weights may be omitted; they are computed when beta > 0.
OperatorBundle assemble(const Grid& grid, const ModelParams& params,
                        std::shared_ptr<const SingularWeights> weights = nullptr);

// Weak bilinear form a(u,v).
template <typename DerivedU, typename DerivedV>
double bilinear(const OperatorBundle& ops, const Eigen::MatrixBase<DerivedU>& u,
                const Eigen::MatrixBase<DerivedV>& v) {
  return u.dot(ops.stiffness * v);
}

// Seminorm squared: (alpha/2) int|grad u|^2 + (beta/4) Gagliardo(ext u) = a(u,u)/2.
template <typename Derived>
double seminorm_sq(const Eigen::MatrixBase<Derived>& u, const OperatorBundle& ops) {
  return 0.5 * bilinear(ops, u, u);
}

// Scalar product of the energy space: int uv + a(u,v).
template <typename DerivedU, typename DerivedV>
double energy_inner(const OperatorBundle& ops, const Eigen::MatrixBase<DerivedU>& u,
                    const Eigen::MatrixBase<DerivedV>& v) {
  return u.dot(ops.volumes.cwiseProduct(v)) + bilinear(ops, u, v);
}

// sum_i m_i u_i^2 vol_i.
template <typename DerivedM, typename DerivedU>
double weight_form(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedU>& u,
                   const OperatorBundle& ops) {
  return (m.array() * u.array().square() * ops.volumes.array()).sum();
}

// "row col value" lines, zero-based, entries with |value| > drop only.
void write_triplets(std::ostream& os, const Matrix& a, double drop = 0.0);
void write_triplets(std::ostream& os, const SparseMatrix& a);

}  // namespace niche
