#include "aerocap/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace aerocap {

namespace {

constexpr double kInf = 1e20;

// Squared distance transform of a sampled function along one axis, written in
// place. `f` holds 0 at feature sites and kInf elsewhere on the first pass.
void distance_transform_1d(std::vector<double>& f, std::vector<double>& d, std::vector<int>& v,
                           std::vector<double>& z, int n) {
  auto intersect = [&](int q, int p) {
    return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
           (2.0 * q - 2.0 * p);
  };
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s = intersect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = intersect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
  for (int q = 0; q < n; ++q) f[q] = d[q];
}

// Squared voxel-unit distance to the nearest site where `site[idx]` is true.
std::vector<double> squared_edt(const VoxelLattice& lat, const std::vector<char>& site) {
  const GridDims& g = lat.dims();
  std::vector<double> grid(g.count());
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = site[i] ? 0.0 : kInf;

  const int nmax = std::max({g.nx, g.ny, g.nz});
  std::vector<double> f(nmax), d(nmax), z(nmax + 1);
  std::vector<int> v(nmax);

  // z axis
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      for (int k = 0; k < g.nz; ++k) f[k] = grid[lat.index(i, j, k)];
      distance_transform_1d(f, d, v, z, g.nz);
      for (int k = 0; k < g.nz; ++k) grid[lat.index(i, j, k)] = f[k];
    }
  // y axis
  for (int i = 0; i < g.nx; ++i)
    for (int k = 0; k < g.nz; ++k) {
      for (int j = 0; j < g.ny; ++j) f[j] = grid[lat.index(i, j, k)];
      distance_transform_1d(f, d, v, z, g.ny);
      for (int j = 0; j < g.ny; ++j) grid[lat.index(i, j, k)] = f[j];
    }
  // x axis
  for (int j = 0; j < g.ny; ++j)
    for (int k = 0; k < g.nz; ++k) {
      for (int i = 0; i < g.nx; ++i) f[i] = grid[lat.index(i, j, k)];
      distance_transform_1d(f, d, v, z, g.nx);
      for (int i = 0; i < g.nx; ++i) grid[lat.index(i, j, k)] = f[i];
    }
  return grid;
}

}  // namespace

VoxelLattice::VoxelLattice(const Vec3& origin, double voxel_size, GridDims dims)
    : origin_(origin), voxel_size_(voxel_size), dims_(dims) {
  if (!(voxel_size > 0.0) || !std::isfinite(voxel_size))
    throw InvalidArgument("voxel_size must be positive");
  if (dims.nx <= 0 || dims.ny <= 0 || dims.nz <= 0)
    throw InvalidArgument("grid dimensions must be positive");
  if (!origin.allFinite()) throw InvalidArgument("grid origin must be finite");
}

Vec3 VoxelLattice::voxel_center(int i, int j, int k) const {
  return origin_ + voxel_size_ * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

Vec3 VoxelLattice::lattice_coord(const Vec3& p) const {
  return (p - origin_) / voxel_size_ - Vec3::Constant(0.5);
}

Vec3 VoxelLattice::max_corner() const {
  return origin_ + voxel_size_ * Vec3(dims_.nx, dims_.ny, dims_.nz);
}

OccupancyGrid::OccupancyGrid(const Vec3& origin, double voxel_size, GridDims dims, double fill,
                             double out_of_bounds)
    : VoxelLattice(origin, voxel_size, dims), out_of_bounds_(out_of_bounds) {
  if (!(fill >= 0.0 && fill <= 1.0)) throw InvalidArgument("occupancy must lie in [0, 1]");
  if (!(out_of_bounds >= 0.0 && out_of_bounds <= 1.0))
    throw InvalidArgument("out-of-bounds occupancy must lie in [0, 1]");
  values_.assign(dims.count(), static_cast<float>(fill));
  if (fill > 0.0) {
    nz_lo_ = {0, 0, 0};
    nz_hi_ = {dims.nx - 1, dims.ny - 1, dims.nz - 1};
  }
}

void OccupancyGrid::set(int i, int j, int k, double value) {
  if (!contains(i, j, k)) throw InvalidArgument("voxel index out of range");
  if (!(value >= 0.0 && value <= 1.0)) throw InvalidArgument("occupancy must lie in [0, 1]");
  values_[index(i, j, k)] = static_cast<float>(value);
  if (value > 0.0) {
    const std::array<int, 3> idx{i, j, k};
    const bool empty = nz_hi_[0] < nz_lo_[0];
    for (int a = 0; a < 3; ++a) {
      nz_lo_[a] = empty ? idx[a] : std::min(nz_lo_[a], idx[a]);
      nz_hi_[a] = empty ? idx[a] : std::max(nz_hi_[a], idx[a]);
    }
  }
}

void OccupancyGrid::fill_box(const Vec3& lo, const Vec3& hi, double value) {
  const Vec3 ulo = lattice_coord(lo);
  const Vec3 uhi = lattice_coord(hi);
  const int i0 = std::max(0, static_cast<int>(std::ceil(ulo.x())));
  const int j0 = std::max(0, static_cast<int>(std::ceil(ulo.y())));
  const int k0 = std::max(0, static_cast<int>(std::ceil(ulo.z())));
  const int i1 = std::min(dims_.nx - 1, static_cast<int>(std::floor(uhi.x())));
  const int j1 = std::min(dims_.ny - 1, static_cast<int>(std::floor(uhi.y())));
  const int k1 = std::min(dims_.nz - 1, static_cast<int>(std::floor(uhi.z())));
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) set(i, j, k, value);
}

bool OccupancyGrid::outside_support(const Vec3& u) const {
  if (out_of_bounds_ != 0.0) return false;
  if (nz_hi_[0] < nz_lo_[0]) return true;
  for (int a = 0; a < 3; ++a) {
    if (u[a] <= nz_lo_[a] - 1.0 || u[a] >= nz_hi_[a] + 1.0) return true;
  }
  return false;
}

double OccupancyGrid::occupancy_at(const Vec3& p) const { return occupancy_with_gradient(p, nullptr); }

double OccupancyGrid::occupancy_with_gradient(const Vec3& p, Vec3* grad) const {
  const Vec3 u = lattice_coord(p);
  if (outside_support(u)) {
    if (grad) grad->setZero();
    return 0.0;
  }
  const int i0 = static_cast<int>(std::floor(u.x()));
  const int j0 = static_cast<int>(std::floor(u.y()));
  const int k0 = static_cast<int>(std::floor(u.z()));
  const double fx = u.x() - i0, fy = u.y() - j0, fz = u.z() - k0;

  double c[2][2][2];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int e = 0; e < 2; ++e) c[a][b][e] = at_or_default(i0 + a, j0 + b, k0 + e);

  const double c00 = c[0][0][0] * (1 - fz) + c[0][0][1] * fz;
  const double c01 = c[0][1][0] * (1 - fz) + c[0][1][1] * fz;
  const double c10 = c[1][0][0] * (1 - fz) + c[1][0][1] * fz;
  const double c11 = c[1][1][0] * (1 - fz) + c[1][1][1] * fz;
  const double c0 = c00 * (1 - fy) + c01 * fy;
  const double c1 = c10 * (1 - fy) + c11 * fy;
  const double value = c0 * (1 - fx) + c1 * fx;

  if (grad) {
    const double dfx = c1 - c0;
    const double dfy = (c01 - c00) * (1 - fx) + (c11 - c10) * fx;
    const double dz00 = c[0][0][1] - c[0][0][0];
    const double dz01 = c[0][1][1] - c[0][1][0];
    const double dz10 = c[1][0][1] - c[1][0][0];
    const double dz11 = c[1][1][1] - c[1][1][0];
    const double dfz = (dz00 * (1 - fy) + dz01 * fy) * (1 - fx) + (dz10 * (1 - fy) + dz11 * fy) * fx;
    *grad = Vec3(dfx, dfy, dfz) / voxel_size_;
  }
  return value;
}

std::size_t OccupancyGrid::count_at_least(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [&](float v) { return v >= threshold; }));
}

void OccupancyGrid::save(std::ostream& os) const {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "OCCGRID v1 %d %d %d %.17g %.17g %.17g %.17g\n", dims_.nx, dims_.ny,
                dims_.nz, voxel_size_, origin_.x(), origin_.y(), origin_.z());
  os << buf;
  for (float v : values_) {
    std::snprintf(buf, sizeof(buf), "%.9g\n", static_cast<double>(v));
    os << buf;
  }
}

void OccupancyGrid::save(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  save(os);
  if (!os) throw std::runtime_error("failed writing '" + path + "'");
}

OccupancyGrid OccupancyGrid::load(std::istream& is, double out_of_bounds) {
  std::string header;
  if (!std::getline(is, header)) throw InvalidArgument("occupancy grid: missing header");
  std::istringstream hs(header);
  std::string magic, version;
  GridDims dims;
  double voxel = 0.0, ox = 0.0, oy = 0.0, oz = 0.0;
  hs >> magic >> version >> dims.nx >> dims.ny >> dims.nz >> voxel >> ox >> oy >> oz;
  if (!hs || magic != "OCCGRID" || version != "v1")
    throw InvalidArgument("occupancy grid: malformed header '" + header + "'");
  OccupancyGrid grid(Vec3(ox, oy, oz), voxel, dims, 0.0, out_of_bounds);
  std::string token;
  for (int i = 0; i < dims.nx; ++i)
    for (int j = 0; j < dims.ny; ++j)
      for (int k = 0; k < dims.nz; ++k) {
        if (!(is >> token)) throw InvalidArgument("occupancy grid: truncated value list");
        char* end = nullptr;
        const double v = std::strtod(token.c_str(), &end);
        if (end == token.c_str() || *end != '\0')
          throw InvalidArgument("occupancy grid: bad value '" + token + "'");
        grid.set(i, j, k, static_cast<double>(static_cast<float>(v)));
      }
  if (is >> token) throw InvalidArgument("occupancy grid: trailing data after value list");
  return grid;
}

OccupancyGrid OccupancyGrid::load(const std::string& path, double out_of_bounds) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open '" + path + "'");
  return load(is, out_of_bounds);
}

bool OccupancyGrid::operator==(const OccupancyGrid& other) const {
  return dims_ == other.dims_ && voxel_size_ == other.voxel_size_ && origin_ == other.origin_ &&
         out_of_bounds_ == other.out_of_bounds_ && values_ == other.values_;
}

SignedDistanceField::SignedDistanceField(const VoxelLattice& lattice, std::vector<double> values,
                                         double max_distance)
    : VoxelLattice(lattice), values_(std::move(values)), max_distance_(max_distance) {
  if (values_.size() != dims_.count()) throw InvalidArgument("distance field size mismatch");
}

double SignedDistanceField::distance_at(const Vec3& p) const { return distance_with_gradient(p, nullptr); }

double SignedDistanceField::distance_with_gradient(const Vec3& p, Vec3* grad) const {
  const Vec3 u = lattice_coord(p);
  const std::array<int, 3> n{dims_.nx, dims_.ny, dims_.nz};
  Vec3 uc;
  std::array<bool, 3> clamped{};
  for (int a = 0; a < 3; ++a) {
    const double hi = n[a] - 1.0;
    uc[a] = std::clamp(u[a], 0.0, hi);
    clamped[a] = (u[a] < 0.0 || u[a] > hi);
  }
  std::array<int, 3> i0{}, i1{};
  std::array<double, 3> f{};
  for (int a = 0; a < 3; ++a) {
    i0[a] = std::min(static_cast<int>(std::floor(uc[a])), std::max(0, n[a] - 2));
    i1[a] = std::min(i0[a] + 1, n[a] - 1);
    f[a] = uc[a] - i0[a];
  }
  auto c = [&](int a, int b, int e) {
    return at(a ? i1[0] : i0[0], b ? i1[1] : i0[1], e ? i1[2] : i0[2]);
  };
  const double fx = f[0], fy = f[1], fz = f[2];
  const double c00 = c(0, 0, 0) * (1 - fz) + c(0, 0, 1) * fz;
  const double c01 = c(0, 1, 0) * (1 - fz) + c(0, 1, 1) * fz;
  const double c10 = c(1, 0, 0) * (1 - fz) + c(1, 0, 1) * fz;
  const double c11 = c(1, 1, 0) * (1 - fz) + c(1, 1, 1) * fz;
  const double c0 = c00 * (1 - fy) + c01 * fy;
  const double c1 = c10 * (1 - fy) + c11 * fy;
  double value = c0 * (1 - fx) + c1 * fx;

  Vec3 g = Vec3::Zero();
  if (grad) {
    const double dz00 = c(0, 0, 1) - c(0, 0, 0);
    const double dz01 = c(0, 1, 1) - c(0, 1, 0);
    const double dz10 = c(1, 0, 1) - c(1, 0, 0);
    const double dz11 = c(1, 1, 1) - c(1, 1, 0);
    g = Vec3(c1 - c0, (c01 - c00) * (1 - fx) + (c11 - c10) * fx,
             (dz00 * (1 - fy) + dz01 * fy) * (1 - fx) + (dz10 * (1 - fy) + dz11 * fy) * fx) /
        voxel_size_;
    for (int a = 0; a < 3; ++a)
      if (clamped[a] || n[a] == 1) g[a] = 0.0;
  }

  const Vec3 outside = (u - uc) * voxel_size_;
  const double extra = outside.norm();
  if (extra > 0.0) {
    value += extra;
    if (grad) g += outside / extra;
  }
  if (value >= max_distance_) {
    value = max_distance_;
    g.setZero();
  }
  if (grad) *grad = g;
  return value;
}

SignedDistanceField sdf_from_grid(const OccupancyGrid& grid, double occupancy_threshold,
                                  double max_distance) {
  if (!(occupancy_threshold > 0.0 && occupancy_threshold <= 1.0))
    throw InvalidArgument("occupancy_threshold must lie in (0, 1]");
  if (!(max_distance > 0.0)) throw InvalidArgument("max_distance must be positive");

  const std::size_t count = grid.dims().count();
  std::vector<char> occupied(count), free_site(count);
  std::size_t n_occ = 0;
  for (std::size_t i = 0; i < count; ++i) {
    occupied[i] = grid.values()[i] >= occupancy_threshold;
    free_site[i] = !occupied[i];
    n_occ += occupied[i] ? 1 : 0;
  }

  std::vector<double> values(count, max_distance);
  const VoxelLattice& lattice = grid;
  if (n_occ == 0) return SignedDistanceField(lattice, std::move(values), max_distance);

  const std::vector<double> outside = squared_edt(lattice, occupied);
  std::vector<double> inside;
  if (n_occ < count) inside = squared_edt(lattice, free_site);

  const double vs = grid.voxel_size();
  for (std::size_t i = 0; i < count; ++i) {
    if (occupied[i]) {
      values[i] = inside.empty() ? -max_distance : -std::min(max_distance, std::sqrt(inside[i]) * vs);
    } else {
      values[i] = std::min(max_distance, std::sqrt(outside[i]) * vs);
    }
  }
  return SignedDistanceField(lattice, std::move(values), max_distance);
}

WorldModel make_world(OccupancyGrid grid, double occupancy_threshold, double max_distance) {
  WorldModel world;
  world.sdf = sdf_from_grid(grid, occupancy_threshold, max_distance);
  world.grid = std::move(grid);
  return world;
}

}  // namespace aerocap
