// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "eigenfracture/mesh.hpp"

namespace ef {

/// Set of simplex ids of one mesh, kept sorted.  Used for the accumulated
/// crack, a precrack, and eigenstrain supports.
class CrackSet {
 public:
  CrackSet() = default;
  explicit CrackSet(std::size_t universe) : member_(universe, 0) {}
  CrackSet(std::size_t universe, std::span<const int> ids);

  std::size_t universe() const { return member_.size(); }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(int s) const { return member_[s] != 0; }
  std::span<const int> ids() const { return ids_; }

  /// Returns false if s was already present.
  bool insert(int s);
  void insert_all(std::span<const int> ids);
  bool subset_of(const CrackSet& other) const;

  friend bool operator==(const CrackSet& a, const CrackSet& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<std::uint8_t> member_;
  std::vector<int> ids_;
};

/// Exact distance between two closed triangles (0 when they meet).
/// Throws std::invalid_argument on a zero-area triangle.
double simplex_distance(const Triangle& a, const Triangle& b);
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1);
bool triangle_contains(const Triangle& t, Vec2 p);
bool triangle_meets_segment(const Triangle& t, Vec2 a, Vec2 b);
/// Closed triangle against the open axis-aligned box.
bool triangle_meets_open_box(const Triangle& t, const Rect& box);
/// Absolute slack under which two simplices count as lying at distance
/// exactly r, so that grid-aligned ties resolve the same everywhere.
inline constexpr double kDistanceTieTol = 1e-12;

/// Distance between a triangle and a closed axis-aligned rectangle.
double triangle_rect_distance(const Triangle& t, const Rect& box);

/// Bucket grid over simplex centroids.  Queries return every simplex whose
/// closed shape can come within `radius` of a given simplex, sorted by id.
class SpatialIndex {
 public:
  SpatialIndex(const TriangulationMesh& mesh, double cell);

  const TriangulationMesh& mesh() const { return *mesh_; }
  double cell() const { return cell_; }

  /// Simplices within distance r (up to kDistanceTieTol) of simplex s,
  /// including s, sorted.
  std::vector<int> within(int s, double r) const;
  /// Distance between two simplices of the mesh; symmetric bit for bit.
  double distance(int a, int b) const;

 private:
  const TriangulationMesh* mesh_;
  double cell_;
  double reach_ = 0.0;  // max centroid-to-vertex distance
  int nx_ = 0, ny_ = 0;
  std::vector<int> offsets_, items_;
};

/// Simplices T with dist(T, A) <= eps, sorted.
std::vector<int> discrete_neighborhood(const SpatialIndex& index, const CrackSet& a, double eps);

/// Which simplices count toward the neighborhood volume.
enum class VolumeConvention : std::uint8_t { all_simplices, reference_only };

double neighborhood_volume(const TriangulationMesh& mesh, std::span<const int> simplices,
                           VolumeConvention conv = VolumeConvention::all_simplices);

/// Maintains, for every simplex, how many broken simplices lie within eps,
/// and the total area of simplices with a nonzero count.
class NeighborhoodLedger {
 public:
  NeighborhoodLedger(const SpatialIndex& index, double eps,
                     VolumeConvention conv = VolumeConvention::all_simplices);

  double eps() const { return eps_; }
  double volume() const { return volume_ + volume_c_; }
  const CrackSet& broken() const { return broken_; }
  int count(int s) const { return counters_[s]; }
  bool covered(int s) const { return counters_[s] > 0; }
  VolumeConvention convention() const { return conv_; }

  /// Adds s to the broken set and returns the newly covered area.
  /// Throws ContractError if s is already broken.
  double add(int s);
  /// Newly covered area if s were added; no mutation.
  double preview(int s) const;
  /// Newly covered area if all of `set` were added; no mutation.
  double preview(std::span<const int> set) const;

  /// Covered simplices, sorted.
  std::vector<int> covered_simplices() const;
  /// Area counted for s under the volume convention.
  double weight(int s) const;

 private:

  const SpatialIndex* index_;
  double eps_;
  VolumeConvention conv_;
  CrackSet broken_;
  std::vector<int> counters_;
  double volume_ = 0.0, volume_c_ = 0.0;  // Neumaier sum
};

/// Area 2 eps L + pi eps^2 of the closed eps-neighborhood of a segment.
double tube_volume_exact(Vec2 a, Vec2 b, double eps);

struct Segment {
  Vec2 a, b;
};

struct MonteCarloArea {
  double area = 0.0;
  double standard_error = 0.0;
};

/// Monte-Carlo area of the eps-neighborhood of a union of segments.
/// Requires samples >= 10^4.
MonteCarloArea tube_volume_mc(std::span<const Segment> shapes, double eps, std::size_t samples,
                              std::uint64_t seed);

struct GrowthCheck {
  double r = 0.0, r_prime = 0.0;
  double vol_r = 0.0, vol_grown = 0.0;
  double ratio = 0.0;
  double constant = 1.0;
  double bound = 0.0;  // constant * ((r + r') / r)^2
  bool satisfied() const { return ratio <= bound; }
};

/// Area of the union of closed disks of radius r around `points`: exact
/// for pairwise disjoint disks, otherwise by scanline rasterization with
/// row spacing `cell` and exact chord unions.
double disk_union_area(std::span<const Vec2> points, double r, double cell);

/// Measures L2(U_{r+r'}(V)) / L2(U_r(V)) and the bound C ((r+r')/r)^2.
/// Rejects cell > r/10; default cell is r/50.
GrowthCheck neighborhood_growth_check(std::span<const Vec2> points, double r, double r_prime,
                                      double constant = 1.0, double cell = 0.0);

struct CubeCover {
  double side = 0.0;
  int nx = 0, ny = 0;
  Vec2 origin;
  std::vector<std::uint8_t> selected;  // nx * ny, row-major
  std::size_t cube_count = 0;
  std::size_t crack_cube_count = 0;  // selected cubes contained in the reference
  double perimeter = 0.0;           // H1 of the boundary of the union

  Rect cube(int i, int j) const {
    return {origin.x + i * side, origin.y + j * side, origin.x + (i + 1) * side,
            origin.y + (j + 1) * side};
  }
};

/// Cubes of side eps/sqrt(2), anchored at the box corner, that meet the
/// crack or stick out of the reference configuration.
CubeCover cube_cover(const TriangulationMesh& mesh, const CrackSet& crack, double eps);

/// Simplices of the reference configuration outside U_eps(crack) that are
/// edge-connected to a collar simplex, sorted.
std::vector<int> good_set(const SpatialIndex& index, const CrackSet& crack, double eps);

/// Vertex-connectivity components of unbroken reference simplices; true if
/// the collar simplices fall into more than one component while they all
/// lay in one component of the uncracked body.
bool separates_collar(const TriangulationMesh& mesh, const CrackSet& crack);

}  // namespace ef
