// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace ef {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

struct Rect {
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  bool contains(const Rect& r) const {
    return r.x0 >= x0 && r.x1 <= x1 && r.y0 >= y0 && r.y1 <= y1;
  }
};

enum Side : unsigned { kLeft = 1u, kRight = 2u, kBottom = 4u, kTop = 8u };

/// The body and its Dirichlet collar.  The reference configuration is the
/// rectangle obtained by pushing each Dirichlet side of `omega` outward by
/// `collar_width`; everything in it outside the closed body is the collar.
struct DomainSpec {
  Rect omega{0.0, 0.0, 1.0, 1.0};
  double collar_width = 0.1;
  unsigned dirichlet_sides = kLeft | kRight;

  Rect reference() const;
  void validate() const;
};

enum class Region : std::uint8_t { interior, collar, exterior };

/// h(eps) = scale * eps^exponent with exponent > 1, so h/eps -> 0.
struct ResolutionCoupling {
  double scale = 1.0;
  double exponent = 1.5;
};

double couple_resolution(double eps, const ResolutionCoupling& coupling);

using Triangle = std::array<Vec2, 3>;

/// Structured triangulation of a rectangular box.  Cells are rectangles of
/// a tensor-product grid whose lines include the body and collar edges;
/// each cell is split along the same diagonal into a lower-left (k = 0) and
/// an upper-right (k = 1) triangle.  Simplex id = 2 * (row * nx + col) + k.
class TriangulationMesh {
 public:
  const Rect& box() const { return box_; }
  const DomainSpec& domain() const { return domain_; }
  double nominal_h() const { return h_; }
  double max_diameter() const { return max_diam_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_simplices() const { return simplices_.size(); }
  int cells_x() const { return static_cast<int>(xs_.size()) - 1; }
  int cells_y() const { return static_cast<int>(ys_.size()) - 1; }
  std::span<const double> grid_x() const { return xs_; }
  std::span<const double> grid_y() const { return ys_; }

  Vec2 vertex(int v) const { return vertices_[v]; }
  std::span<const Vec2> vertices() const { return vertices_; }
  const std::array<int, 3>& simplex(int s) const { return simplices_[s]; }
  Triangle triangle(int s) const;
  Vec2 centroid(int s) const;
  double area(int s) const { return areas_[s]; }
  std::span<const double> areas() const { return areas_; }
  Region label(int s) const { return labels_[s]; }

  /// Edge-sharing neighbors, -1 where the edge lies on the box boundary.
  const std::array<int, 3>& edge_neighbors(int s) const { return edge_nbrs_[s]; }
  /// Simplices incident to vertex v.
  std::span<const int> vertex_simplices(int v) const;

  /// Cell and half-cell index of a simplex.
  int cell_col(int s) const { return (s / 2) % cells_x(); }
  int cell_row(int s) const { return (s / 2) / cells_x(); }

  /// Vertex belongs to at least one collar simplex.
  bool is_collar_vertex(int v) const { return collar_vertex_[v] != 0; }
  /// Vertex belongs to at least one interior simplex.
  bool is_body_vertex(int v) const { return body_vertex_[v] != 0; }

  /// Constant gradient of the P1 interpolant of nodal values on simplex s.
  Vec2 gradient(int s, std::span<const double> nodal) const;
  /// Shape-function gradients of simplex s (one per local vertex).
  const std::array<Vec2, 3>& shape_gradients(int s) const { return shape_grads_[s]; }

  friend TriangulationMesh build_structured_mesh(const DomainSpec&, double, double);

 private:
  DomainSpec domain_;
  Rect box_;
  double h_ = 0.0;
  double max_diam_ = 0.0;
  std::vector<double> xs_, ys_;
  std::vector<Vec2> vertices_;
  std::vector<std::array<int, 3>> simplices_;
  std::vector<double> areas_;
  std::vector<Region> labels_;
  std::vector<std::array<int, 3>> edge_nbrs_;
  std::vector<std::array<Vec2, 3>> shape_grads_;
  std::vector<int> vs_offsets_, vs_items_;
  std::vector<std::uint8_t> collar_vertex_, body_vertex_;
};

/// Meshes the reference rectangle grown by `pad` on every side.  Each
/// segment between consecutive breakpoints (box, reference and body edges)
/// is divided into ceil(length / h) equal cells, so no cell side exceeds h.
/// Throws std::invalid_argument for h <= 0, h larger than the shortest box
/// edge, negative pad, or an invalid domain.
TriangulationMesh build_structured_mesh(const DomainSpec& dom, double h, double pad = 0.0);

}  // namespace ef
