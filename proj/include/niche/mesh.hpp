#pragma once

#include "niche/types.hpp"

#include <cstdint>
#include <vector>

namespace niche {

// Axis-aligned open box; lower/upper have one entry per axis.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

struct DomainSpec {
  int dimension = 1;
  // The first box fixes the lattice: cells_per_axis cells along each of its axes.
  // Further boxes must have corners on that lattice.
  std::vector<Box> boxes;
  int cells_per_axis = 0;
  // Width of the exterior collar. Non-positive means twice the domain diameter.
  double exterior_radius = 0.0;

  static DomainSpec interval(double a, double b, int cells, double exterior_radius = 0.0);
  static DomainSpec square(double a, double b, int cells, double exterior_radius = 0.0);
};

// Cell-centred uniform lattice over the domain plus an exterior collar of the
// same lattice. Columns of the centroid/lattice matrices are cells.
class Grid {
 public:
  int dimension() const { return dim_; }
  Index interior_size() const { return interior_lattice_.cols(); }
  Index exterior_size() const { return exterior_lattice_.cols(); }

  const Eigen::VectorXd& spacing() const { return spacing_; }
  double cell_volume() const { return cell_volume_; }
  double measure() const { return cell_volume_ * static_cast<double>(interior_size()); }
  double diameter() const { return diameter_; }
  double exterior_radius() const { return exterior_radius_; }

  const Matrix& interior_centroids() const { return interior_centroids_; }
  const Matrix& exterior_centroids() const { return exterior_centroids_; }
  const IndexMatrix& interior_lattice() const { return interior_lattice_; }
  const IndexMatrix& exterior_lattice() const { return exterior_lattice_; }
  Vector interior_volumes() const { return Vector::Constant(interior_size(), cell_volume_); }
  Vector exterior_volumes() const { return Vector::Constant(exterior_size(), cell_volume_); }

  const DomainSpec& spec() const { return spec_; }
  std::uint64_t hash() const { return hash_; }

  // Point strictly inside the union of boxes.
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  // Closed ball B_r(center) lies inside the domain (up to the open boundary).
  bool contains_ball(const Eigen::Ref<const Eigen::VectorXd>& center, double r) const;
  double distance_to_domain(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  // Interior index of the cell at this lattice position, or -1.
  Index interior_at(const Eigen::Ref<const Eigen::Matrix<long, Eigen::Dynamic, 1>>& lattice) const;

 private:
  friend Grid build_grid(const DomainSpec&);

  DomainSpec spec_;
  int dim_ = 1;
  Eigen::VectorXd origin_;
  Eigen::VectorXd spacing_;
  double cell_volume_ = 0.0;
  double diameter_ = 0.0;
  double exterior_radius_ = 0.0;
  Matrix interior_centroids_, exterior_centroids_;
  IndexMatrix interior_lattice_, exterior_lattice_;
  // Dense lookup over the interior bounding box.
  Eigen::Matrix<long, Eigen::Dynamic, 1> box_lo_, box_extent_;
  std::vector<Index> lookup_;
  std::uint64_t hash_ = 0;
};

Grid build_grid(const DomainSpec& spec);

// Face-adjacency components of the interior cells.
int connected_components(const Grid& grid);

}  // namespace niche
