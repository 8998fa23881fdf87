#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "aerocap/geometry.hpp"

namespace aerocap {

struct GridDims {
  int nx = 0;
  int ny = 0;
  int nz = 0;

  std::size_t count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) * static_cast<std::size_t>(nz);
  }
  bool operator==(const GridDims&) const = default;
};

/// Regular voxel lattice. Voxel (i, j, k) spans [origin + (i, j, k) * voxel_size,
/// origin + (i+1, j+1, k+1) * voxel_size); its value sits at the voxel center.
/// Storage is x-major: index = (i * ny + j) * nz + k.
class VoxelLattice {
 public:
  VoxelLattice() = default;
  VoxelLattice(const Vec3& origin, double voxel_size, GridDims dims);

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  const GridDims& dims() const { return dims_; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * dims_.ny + j) * dims_.nz + k;
  }
  bool contains(int i, int j, int k) const {
    return i >= 0 && j >= 0 && k >= 0 && i < dims_.nx && j < dims_.ny && k < dims_.nz;
  }
  Vec3 voxel_center(int i, int j, int k) const;
  /// Continuous lattice coordinate; integer values land on voxel centers.
  Vec3 lattice_coord(const Vec3& p) const;
  Vec3 min_corner() const { return origin_; }
  Vec3 max_corner() const;

 protected:
  Vec3 origin_ = Vec3::Zero();
  double voxel_size_ = 1.0;
  GridDims dims_;
};

/// Occupancy probability per voxel in [0, 1]. Continuous queries use trilinear
/// interpolation between voxel centers; voxels outside the lattice read as the
/// configured out-of-bounds occupancy.
class OccupancyGrid : public VoxelLattice {
 public:
  OccupancyGrid() = default;
  OccupancyGrid(const Vec3& origin, double voxel_size, GridDims dims, double fill = 0.0,
                double out_of_bounds = 0.0);

  double out_of_bounds_value() const { return out_of_bounds_; }

  float at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  /// Lattice read that honors the out-of-bounds value.
  double at_or_default(int i, int j, int k) const {
    return contains(i, j, k) ? static_cast<double>(values_[index(i, j, k)]) : out_of_bounds_;
  }
  void set(int i, int j, int k, double value);

  /// Sets every voxel whose center lies inside the axis-aligned box.
  void fill_box(const Vec3& lo, const Vec3& hi, double value);

  const std::vector<float>& values() const { return values_; }

  /// Trilinear occupancy at p.
  double occupancy_at(const Vec3& p) const;
  /// Trilinear occupancy and its spatial gradient (per meter).
  double occupancy_with_gradient(const Vec3& p, Vec3* grad) const;

  std::size_t count_at_least(double threshold) const;

  /// `OCCGRID v1 nx ny nz voxel_size ox oy oz` header, then one value per line.
  void save(std::ostream& os) const;
  void save(const std::string& path) const;
  static OccupancyGrid load(std::istream& is, double out_of_bounds = 0.0);
  static OccupancyGrid load(const std::string& path, double out_of_bounds = 0.0);

  bool operator==(const OccupancyGrid& other) const;

 private:
  bool outside_support(const Vec3& u) const;

  double out_of_bounds_ = 0.0;
  std::vector<float> values_;
  // Index bounds of voxels with non-zero value; queries beyond them with a
  // zero out-of-bounds value short-circuit to 0.
  std::array<int, 3> nz_lo_{0, 0, 0};
  std::array<int, 3> nz_hi_{-1, -1, -1};
};

/// Signed Euclidean distance between voxel centers: positive outside obstacles
/// (distance to the nearest occupied voxel), negative inside (minus the distance
/// to the nearest free voxel).
class SignedDistanceField : public VoxelLattice {
 public:
  SignedDistanceField() = default;
  SignedDistanceField(const VoxelLattice& lattice, std::vector<double> values, double max_distance);

  double at(int i, int j, int k) const { return values_[index(i, j, k)]; }
  const std::vector<double>& values() const { return values_; }
  double max_distance() const { return max_distance_; }

  /// Trilinear distance at p. Points outside the lattice add their distance to
  /// the lattice boundary.
  double distance_at(const Vec3& p) const;
  double distance_with_gradient(const Vec3& p, Vec3* grad) const;

 private:
  std::vector<double> values_;
  double max_distance_ = 1e3;
};

inline constexpr double kDefaultOccupancyThreshold = 0.5;
inline constexpr double kDefaultMaxDistance = 1e3;

/// Exact Euclidean distance transform (separable lower-envelope method).
SignedDistanceField sdf_from_grid(const OccupancyGrid& grid,
                                  double occupancy_threshold = kDefaultOccupancyThreshold,
                                  double max_distance = kDefaultMaxDistance);

/// Occupancy grid plus its derived distance field.
struct WorldModel {
  OccupancyGrid grid;
  SignedDistanceField sdf;
};

WorldModel make_world(OccupancyGrid grid, double occupancy_threshold = kDefaultOccupancyThreshold,
                      double max_distance = kDefaultMaxDistance);

}  // namespace aerocap
