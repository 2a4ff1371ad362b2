// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ef {

Rect DomainSpec::reference() const {
  Rect r = omega;
  if (dirichlet_sides & kLeft) r.x0 -= collar_width;
  if (dirichlet_sides & kRight) r.x1 += collar_width;
  if (dirichlet_sides & kBottom) r.y0 -= collar_width;
  if (dirichlet_sides & kTop) r.y1 += collar_width;
  return r;
}

void DomainSpec::validate() const {
  if (!(omega.width() > 0.0) || !(omega.height() > 0.0))
    throw std::invalid_argument("domain: omega must have positive area");
  if (!(collar_width > 0.0))
    throw std::invalid_argument("domain: collar_width must be positive");
  if ((dirichlet_sides & (kLeft | kRight | kBottom | kTop)) == 0)
    throw std::invalid_argument("domain: at least one Dirichlet side is required");
}

double couple_resolution(double eps, const ResolutionCoupling& coupling) {
  if (!(eps > 0.0)) throw std::invalid_argument("couple_resolution: eps must be positive");
  if (!(coupling.exponent > 1.0) || !(coupling.scale > 0.0))
    throw std::invalid_argument("couple_resolution: need exponent > 1 and scale > 0");
  return coupling.scale * std::pow(eps, coupling.exponent);
}

Triangle TriangulationMesh::triangle(int s) const {
  const auto& t = simplices_[s];
  return {vertices_[t[0]], vertices_[t[1]], vertices_[t[2]]};
}

Vec2 TriangulationMesh::centroid(int s) const {
  const auto& t = simplices_[s];
  const Vec2 a = vertices_[t[0]], b = vertices_[t[1]], c = vertices_[t[2]];
  return {(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
}

std::span<const int> TriangulationMesh::vertex_simplices(int v) const {
  return {vs_items_.data() + vs_offsets_[v],
          static_cast<std::size_t>(vs_offsets_[v + 1] - vs_offsets_[v])};
}

Vec2 TriangulationMesh::gradient(int s, std::span<const double> nodal) const {
  const auto& t = simplices_[s];
  const auto& g = shape_grads_[s];
  Vec2 r;
  for (int k = 0; k < 3; ++k) r = r + nodal[t[k]] * g[k];
  return r;
}

namespace {

// Breakpoints sorted and deduplicated; each gap split into ceil(len/h) cells.
std::vector<double> graded_axis(std::vector<double> breaks, double h) {
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> uniq;
  for (double b : breaks)
    if (uniq.empty() || b - uniq.back() > 1e-12 * std::max(1.0, std::abs(b))) uniq.push_back(b);
  std::vector<double> axis{uniq.front()};
  for (std::size_t i = 1; i < uniq.size(); ++i) {
    const double a = uniq[i - 1], b = uniq[i];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / h - 1e-9)));
    for (int k = 1; k < n; ++k) axis.push_back(a + (b - a) * k / n);
    axis.push_back(b);
  }
  return axis;
}

}  // namespace

TriangulationMesh build_structured_mesh(const DomainSpec& dom, double h, double pad) {
  dom.validate();
  if (!(h > 0.0)) throw std::invalid_argument("mesh: h must be positive");
  if (pad < 0.0) throw std::invalid_argument("mesh: pad must be non-negative");
  const Rect ref = dom.reference();
  const Rect box{ref.x0 - pad, ref.y0 - pad, ref.x1 + pad, ref.y1 + pad};
  if (h > std::min(box.width(), box.height()))
    throw std::invalid_argument("mesh: h exceeds the shortest box edge");

  TriangulationMesh m;
  m.domain_ = dom;
  m.box_ = box;
  m.h_ = h;
  m.xs_ = graded_axis({box.x0, ref.x0, dom.omega.x0, dom.omega.x1, ref.x1, box.x1}, h);
  m.ys_ = graded_axis({box.y0, ref.y0, dom.omega.y0, dom.omega.y1, ref.y1, box.y1}, h);

  const int nx = m.cells_x(), ny = m.cells_y();
  const int vx = nx + 1;
  m.vertices_.reserve(static_cast<std::size_t>(vx) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) m.vertices_.push_back({m.xs_[i], m.ys_[j]});

  const std::size_t ns = 2u * nx * ny;
  m.simplices_.reserve(ns);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = j * vx + i, v10 = v00 + 1, v01 = v00 + vx, v11 = v01 + 1;
      m.simplices_.push_back({v00, v10, v01});
      m.simplices_.push_back({v10, v11, v01});
    }
  }

  m.areas_.resize(ns);
  m.labels_.resize(ns);
  m.shape_grads_.resize(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& t = m.simplices_[s];
    const Vec2 a = m.vertices_[t[0]], b = m.vertices_[t[1]], c = m.vertices_[t[2]];
    const double twice = cross(b - a, c - a);
    m.areas_[s] = 0.5 * twice;
    // grad phi_k = rot90(opposite edge) / (2 area)
    const std::array<Vec2, 3> opp{c - b, a - c, b - a};
    for (int k = 0; k < 3; ++k) m.shape_grads_[s][k] = {-opp[k].y / twice, opp[k].x / twice};
    const double d = std::max({std::hypot((b - a).x, (b - a).y), std::hypot((c - b).x, (c - b).y),
                               std::hypot((a - c).x, (a - c).y)});
    m.max_diam_ = std::max(m.max_diam_, d);
    const Vec2 g = m.centroid(static_cast<int>(s));
    if (dom.omega.contains(g))
      m.labels_[s] = Region::interior;
    else if (ref.contains(g))
      m.labels_[s] = Region::collar;
    else
      m.labels_[s] = Region::exterior;
  }

  // Edge adjacency.  Local edge k is opposite local vertex k.
  m.edge_nbrs_.assign(ns, {-1, -1, -1});
  auto id = [nx](int i, int j, int k) { return 2 * (j * nx + i) + k; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto& lower = m.edge_nbrs_[id(i, j, 0)];
      lower[0] = id(i, j, 1);
      lower[1] = i > 0 ? id(i - 1, j, 1) : -1;
      lower[2] = j > 0 ? id(i, j - 1, 1) : -1;
      auto& upper = m.edge_nbrs_[id(i, j, 1)];
      upper[0] = j + 1 < ny ? id(i, j + 1, 0) : -1;
      upper[1] = id(i, j, 0);
      upper[2] = i + 1 < nx ? id(i + 1, j, 0) : -1;
    }
  }

  const std::size_t nv = m.vertices_.size();
  m.vs_offsets_.assign(nv + 1, 0);
  for (const auto& t : m.simplices_)
    for (int v : t) ++m.vs_offsets_[v + 1];
  for (std::size_t v = 0; v < nv; ++v) m.vs_offsets_[v + 1] += m.vs_offsets_[v];
  m.vs_items_.resize(m.vs_offsets_[nv]);
  std::vector<int> fill(m.vs_offsets_.begin(), m.vs_offsets_.end() - 1);
  for (std::size_t s = 0; s < ns; ++s)
    for (int v : m.simplices_[s]) m.vs_items_[fill[v]++] = static_cast<int>(s);

  m.collar_vertex_.assign(nv, 0);
  m.body_vertex_.assign(nv, 0);
  for (std::size_t s = 0; s < ns; ++s) {
    for (int v : m.simplices_[s]) {
      if (m.labels_[s] == Region::collar) m.collar_vertex_[v] = 1;
      if (m.labels_[s] == Region::interior) m.body_vertex_[v] = 1;
    }
  }
  return m;
}

}  // namespace ef
