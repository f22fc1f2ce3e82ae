#pragma once

#include "niche/mesh.hpp"

#include <map>

#include <cmath>
#include <cstdint>

namespace niche {

// Dispersal kernel. Values are renormalized on the lattice to unit discrete mass.
struct KernelSpec {
  enum class Kind { UniformBall, TruncatedGaussian };
  Kind kind = Kind::UniformBall;
  double radius = 0.25;   // ball radius, or truncation radius for the Gaussian
  double sigma = 0.1;

  static KernelSpec uniform_ball(double r) { return {Kind::UniformBall, r, 0.0}; }
  static KernelSpec truncated_gaussian(double sigma, double cutoff) {
    return {Kind::TruncatedGaussian, cutoff, sigma};
  }
};

struct DiscreteKernel {
  IndexMatrix offsets;  // dim x K lattice offsets with nonzero weight
  Vector values;        // kernel value per offset, sum(values) * cell volume == 1
  double raw_mass = 0;  // lattice mass before renormalization
};

DiscreteKernel discretize_kernel(const KernelSpec& kernel, const Grid& grid);

// (J*u)_i = sum_j J(c_i - c_j) u_j vol_j over interior cells.
Vector convolve(const DiscreteKernel& kernel, const Vector& u, const Grid& grid);
Vector convolve(const KernelSpec& kernel, const Vector& u, const Grid& grid);
// Bilinear form matrix: entries J(c_i - c_j) vol_i vol_j.
Matrix convolution_matrix(const DiscreteKernel& kernel, const Grid& grid);

// Pairs within Chebyshev lattice distance near_range get a dedicated rule
// (see near_weights); `subdivisions` only matters for s >= 1/2.
struct QuadratureRule {
  int subdivisions = 8;
  int near_range = 4;
};

// Cell-averaged singular kernel |x-y|^{-n-2s} integrated over cell pairs.
// `interior` is symmetric with zero diagonal; `cross` couples interior rows to
// exterior columns.
struct SingularWeights {
  double s = 0.5;
  QuadratureRule rule;
  std::uint64_t grid_hash = 0;
  Matrix interior;
  Matrix cross;

  Vector interior_row_sums() const { return interior.rowwise().sum(); }
  Vector cross_row_sums() const { return cross.rowwise().sum(); }
  Vector exterior_sums() const { return cross.colwise().sum().transpose(); }
};

// Two-cell weight for pairs beyond the near range: midpoint value plus the
// second-moment correction of the cell-pair density, error O((h/r)^4).
template <typename Scalar, typename OffsetVec, typename SpacingVec>
Scalar far_weight(const OffsetVec& offset, const SpacingVec& spacing, Scalar s) {
  const int d = static_cast<int>(spacing.size());
  Scalar vol = 1, r2 = 0;
  for (int k = 0; k < d; ++k) {
    vol *= Scalar(spacing[k]);
    const Scalar t = Scalar(offset[k]) * Scalar(spacing[k]);
    r2 += t * t;
  }
  const Scalar q = Scalar(d) + 2 * s;
  const Scalar kernel = std::pow(r2, -q / 2);
  Scalar correction = 0;
  for (int k = 0; k < d; ++k) {
    const Scalar t = Scalar(offset[k]) * Scalar(spacing[k]);
    const Scalar hk = Scalar(spacing[k]);
    correction += hk * hk / 12 * q * ((q + 2) * t * t / r2 - 1) / r2;
  }
  return vol * vol * kernel * (1 + correction);
}

// Near-range weights keyed by the absolute offset, every offset with
// 0 < Chebyshev length <= near_range.
//
// For s < 1/2 the cell-pair integral is finite, and halving both cells gives
// W(a) = 2^{2s-n} sum_delta prod(2 - |delta_k|) W(|2a + delta|), which is a
// small linear system once the far sub-pairs are known. For s >= 1/2 the
// integral over face-adjacent cells diverges; there the weight is the
// subdivision sum of sub-pair midpoint values, a regularization whose value
// depends on `subdivisions`.
template <typename Scalar, typename SpacingVec>
std::map<std::vector<long>, Scalar> near_weights(const SpacingVec& spacing, Scalar s, const QuadratureRule& rule) {
  const int d = static_cast<int>(spacing.size());
  const long R = rule.near_range;
  std::vector<std::vector<long>> keys;
  {
    std::vector<long> a(static_cast<std::size_t>(d), 0);
    while (true) {
      long cheb = 0;
      for (long v : a) cheb = std::max(cheb, v);
      if (cheb > 0) keys.push_back(a);
      int k = 0;
      while (k < d && ++a[static_cast<std::size_t>(k)] > R) a[static_cast<std::size_t>(k++)] = 0;
      if (k == d) break;
    }
  }
  std::map<std::vector<long>, Scalar> out;
  if (keys.empty()) return out;
  std::vector<Scalar> half(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) half[static_cast<std::size_t>(k)] = Scalar(spacing[k]) / 2;
  long deltas = 1;
  for (int k = 0; k < d; ++k) deltas *= 3;

  if (s < Scalar(0.5)) {
    std::map<std::vector<long>, std::size_t> index;
    for (std::size_t i = 0; i < keys.size(); ++i) index[keys[i]] = i;
    const std::size_t n = keys.size();
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Mat system = Mat::Identity(static_cast<Index>(n), static_cast<Index>(n));
    Vec rhs = Vec::Zero(static_cast<Index>(n));
    const Scalar scale = std::pow(Scalar(2), 2 * s - Scalar(d));
    for (std::size_t i = 0; i < n; ++i) {
      for (long flat = 0; flat < deltas; ++flat) {
        long rest = flat, cheb = 0;
        Scalar mult = 1;
        std::vector<long> sub(static_cast<std::size_t>(d));
        for (int k = 0; k < d; ++k) {
          const long delta = rest % 3 - 1;
          rest /= 3;
          mult *= Scalar(2 - std::abs(delta));
          sub[static_cast<std::size_t>(k)] = std::abs(2 * keys[i][static_cast<std::size_t>(k)] + delta);
          cheb = std::max(cheb, sub[static_cast<std::size_t>(k)]);
        }
        if (cheb > R)
          rhs[static_cast<Index>(i)] += mult * far_weight<Scalar>(sub, half, s);
        else
          system(static_cast<Index>(i), static_cast<Index>(index.at(sub))) -= mult * scale;
      }
    }
    const Vec w = system.partialPivLu().solve(rhs);
    for (std::size_t i = 0; i < n; ++i) out[keys[i]] = w[static_cast<Index>(i)];
    return out;
  }

  // Sub-pairs depend only on the difference of subcell indices, so sum over
  // differences with their multiplicities.
  const int m = rule.subdivisions;
  const int span = 2 * m - 1;
  long total = 1;
  for (int k = 0; k < d; ++k) total *= span;
  Scalar vol = 1;
  for (int k = 0; k < d; ++k) vol *= Scalar(spacing[k]);
  const Scalar power = -(Scalar(d) + 2 * s) / 2;
  Scalar sub = vol;
  for (int k = 0; k < d; ++k) sub /= Scalar(m);
  for (const auto& a : keys) {
    Scalar sum = 0;
    for (long flat = 0; flat < total; ++flat) {
      long rest = flat;
      Scalar r2 = 0, mult = 1;
      for (int k = 0; k < d; ++k) {
        const int delta = static_cast<int>(rest % span) - (m - 1);
        rest /= span;
        mult *= Scalar(m - std::abs(delta));
        const Scalar t = (Scalar(a[static_cast<std::size_t>(k)]) + Scalar(delta) / Scalar(m)) * Scalar(spacing[k]);
        r2 += t * t;
      }
      sum += mult * std::pow(r2, power);
    }
    out[a] = sum * sub * sub;
  }
  return out;
}

// Weight for two cells whose lattice positions differ by `offset`. Near
// offsets build the whole near table, so prefer near_weights in loops.
template <typename Scalar, typename OffsetVec, typename SpacingVec>
Scalar pair_weight(const OffsetVec& offset, const SpacingVec& spacing, Scalar s, const QuadratureRule& rule) {
  const int d = static_cast<int>(spacing.size());
  long cheb = 0;
  std::vector<long> key(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    key[static_cast<std::size_t>(k)] = std::abs(static_cast<long>(offset[k]));
    cheb = std::max(cheb, key[static_cast<std::size_t>(k)]);
  }
  if (cheb == 0) return Scalar(0);
  if (cheb > rule.near_range) return far_weight<Scalar>(key, spacing, s);
  return near_weights<Scalar>(spacing, s, rule).at(key);
}

SingularWeights singular_weights(const Grid& grid, double s, const QuadratureRule& rule = {});

// Exterior values minimizing the Gagliardo form for fixed interior values.
Vector neumann_extension(const Vector& u, const Grid& grid, const SingularWeights& weights);

// Integrated nonlocal Neumann defect per exterior cell:
// sum_j W(x, j) (v_x - u_j).
Vector neumann_residual(const Vector& u, const Vector& exterior, const Grid& grid,
                        const SingularWeights& weights);

// Double integral over int x int, int x ext and ext x int of (u(x)-u(y))^2 K.
double gagliardo(const Vector& u, const Vector& exterior, const SingularWeights& weights);

}  // namespace niche
