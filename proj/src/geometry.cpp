// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "eigenfracture/error.hpp"

namespace ef {

// ---------------------------------------------------------------------------
// CrackSet

CrackSet::CrackSet(std::size_t universe, std::span<const int> ids) : member_(universe, 0) {
  insert_all(ids);
}

bool CrackSet::insert(int s) {
  if (s < 0 || static_cast<std::size_t>(s) >= member_.size())
    throw ContractError("CrackSet: simplex id out of range");
  if (member_[s]) return false;
  member_[s] = 1;
  ids_.insert(std::lower_bound(ids_.begin(), ids_.end(), s), s);
  return true;
}

void CrackSet::insert_all(std::span<const int> ids) {
  bool any = false;
  for (int s : ids) {
    if (s < 0 || static_cast<std::size_t>(s) >= member_.size())
      throw ContractError("CrackSet: simplex id out of range");
    if (!member_[s]) {
      member_[s] = 1;
      ids_.push_back(s);
      any = true;
    }
  }
  if (any) std::sort(ids_.begin(), ids_.end());
}

bool CrackSet::subset_of(const CrackSet& other) const {
  return std::all_of(ids_.begin(), ids_.end(), [&](int s) { return other.contains(s); });
}

// ---------------------------------------------------------------------------
// Primitive distances

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const Vec2 q = a + t * ab;
  return std::hypot(p.x - q.x, p.y - q.y);
}

namespace {

// Cross products within rounding of zero count as collinear.
int orient(Vec2 a, Vec2 b, Vec2 c) {
  const Vec2 u = b - a, w = c - a;
  const double v = cross(u, w);
  const double tol = 1e-13 * (std::abs(u.x) + std::abs(u.y)) * (std::abs(w.x) + std::abs(w.y));
  return (v > tol) - (v < -tol);
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_meet(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  const int o1 = orient(a0, a1, b0), o2 = orient(a0, a1, b1);
  const int o3 = orient(b0, b1, a0), o4 = orient(b0, b1, a1);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a0, a1, b0)) return true;
  if (o2 == 0 && on_segment(a0, a1, b1)) return true;
  if (o3 == 0 && on_segment(b0, b1, a0)) return true;
  if (o4 == 0 && on_segment(b0, b1, a1)) return true;
  return false;
}

double signed_area2(const Triangle& t) { return cross(t[1] - t[0], t[2] - t[0]); }

}  // namespace

double segment_distance(Vec2 a0, Vec2 a1, Vec2 b0, Vec2 b1) {
  if (segments_meet(a0, a1, b0, b1)) return 0.0;
  return std::min({point_segment_distance(a0, b0, b1), point_segment_distance(a1, b0, b1),
                   point_segment_distance(b0, a0, a1), point_segment_distance(b1, a0, a1)});
}

bool triangle_contains(const Triangle& t, Vec2 p) {
  const int o0 = orient(t[0], t[1], p), o1 = orient(t[1], t[2], p), o2 = orient(t[2], t[0], p);
  const bool has_neg = o0 < 0 || o1 < 0 || o2 < 0;
  const bool has_pos = o0 > 0 || o1 > 0 || o2 > 0;
  return !(has_neg && has_pos);
}

double simplex_distance(const Triangle& a, const Triangle& b) {
  if (signed_area2(a) == 0.0 || signed_area2(b) == 0.0)
    throw std::invalid_argument("simplex_distance: degenerate triangle");
  for (int k = 0; k < 3; ++k)
    if (triangle_contains(a, b[k]) || triangle_contains(b, a[k])) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      d = std::min(d, segment_distance(a[i], a[(i + 1) % 3], b[j], b[(j + 1) % 3]));
  return d;
}

bool triangle_meets_segment(const Triangle& t, Vec2 a, Vec2 b) {
  if (triangle_contains(t, a) || triangle_contains(t, b)) return true;
  for (int k = 0; k < 3; ++k)
    if (segments_meet(t[k], t[(k + 1) % 3], a, b)) return true;
  return false;
}

bool triangle_meets_open_box(const Triangle& t, const Rect& box) {
  auto separated = [](double tmin, double tmax, double bmin, double bmax) {
    return tmax <= bmin || bmax <= tmin;
  };
  const double txmin = std::min({t[0].x, t[1].x, t[2].x}), txmax = std::max({t[0].x, t[1].x, t[2].x});
  const double tymin = std::min({t[0].y, t[1].y, t[2].y}), tymax = std::max({t[0].y, t[1].y, t[2].y});
  if (separated(txmin, txmax, box.x0, box.x1) || separated(tymin, tymax, box.y0, box.y1)) return false;
  const std::array<Vec2, 4> corners{Vec2{box.x0, box.y0}, Vec2{box.x1, box.y0}, Vec2{box.x1, box.y1},
                                    Vec2{box.x0, box.y1}};
  for (int k = 0; k < 3; ++k) {
    const Vec2 e = t[(k + 1) % 3] - t[k];
    const Vec2 n{-e.y, e.x};
    double tmin = dot(n, t[0]), tmax = tmin;
    for (int q = 1; q < 3; ++q) {
      tmin = std::min(tmin, dot(n, t[q]));
      tmax = std::max(tmax, dot(n, t[q]));
    }
    double bmin = dot(n, corners[0]), bmax = bmin;
    for (int q = 1; q < 4; ++q) {
      bmin = std::min(bmin, dot(n, corners[q]));
      bmax = std::max(bmax, dot(n, corners[q]));
    }
    if (separated(tmin, tmax, bmin, bmax)) return false;
  }
  return true;
}

double triangle_rect_distance(const Triangle& t, const Rect& box) {
  const std::array<Vec2, 4> c{Vec2{box.x0, box.y0}, Vec2{box.x1, box.y0}, Vec2{box.x1, box.y1},
                              Vec2{box.x0, box.y1}};
  for (const Vec2& p : t)
    if (box.contains(p)) return 0.0;
  for (const Vec2& p : c)
    if (triangle_contains(t, p)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k)
    for (int q = 0; q < 4; ++q) d = std::min(d, segment_distance(t[k], t[(k + 1) % 3], c[q], c[(q + 1) % 4]));
  return d;
}

// ---------------------------------------------------------------------------
// SpatialIndex

SpatialIndex::SpatialIndex(const TriangulationMesh& mesh, double cell) : mesh_(&mesh) {
  cell_ = std::max(cell, mesh.max_diameter());
  const Rect& box = mesh.box();
  nx_ = std::max(1, static_cast<int>(std::ceil(box.width() / cell_)));
  ny_ = std::max(1, static_cast<int>(std::ceil(box.height() / cell_)));
  const int ns = static_cast<int>(mesh.num_simplices());
  std::vector<int> bucket(ns);
  offsets_.assign(static_cast<std::size_t>(nx_) * ny_ + 1, 0);
  for (int s = 0; s < ns; ++s) {
    const Vec2 c = mesh.centroid(s);
    for (Vec2 v : mesh.triangle(s)) reach_ = std::max(reach_, std::hypot(v.x - c.x, v.y - c.y));
    const int i = std::clamp(static_cast<int>((c.x - box.x0) / cell_), 0, nx_ - 1);
    const int j = std::clamp(static_cast<int>((c.y - box.y0) / cell_), 0, ny_ - 1);
    bucket[s] = j * nx_ + i;
    ++offsets_[bucket[s] + 1];
  }
  for (std::size_t b = 1; b < offsets_.size(); ++b) offsets_[b] += offsets_[b - 1];
  items_.resize(ns);
  std::vector<int> fill(offsets_.begin(), offsets_.end() - 1);
  for (int s = 0; s < ns; ++s) items_[fill[bucket[s]]++] = s;
}

double SpatialIndex::distance(int a, int b) const {
  if (a > b) std::swap(a, b);
  return simplex_distance(mesh_->triangle(a), mesh_->triangle(b));
}

std::vector<int> SpatialIndex::within(int s, double r) const {
  const Rect& box = mesh_->box();
  const Triangle t = mesh_->triangle(s);
  const double grow = r + reach_ + kDistanceTieTol;
  const double x0 = std::min({t[0].x, t[1].x, t[2].x}) - grow;
  const double x1 = std::max({t[0].x, t[1].x, t[2].x}) + grow;
  const double y0 = std::min({t[0].y, t[1].y, t[2].y}) - grow;
  const double y1 = std::max({t[0].y, t[1].y, t[2].y}) + grow;
  const int i0 = std::clamp(static_cast<int>(std::floor((x0 - box.x0) / cell_)), 0, nx_ - 1);
  const int i1 = std::clamp(static_cast<int>(std::floor((x1 - box.x0) / cell_)), 0, nx_ - 1);
  const int j0 = std::clamp(static_cast<int>(std::floor((y0 - box.y0) / cell_)), 0, ny_ - 1);
  const int j1 = std::clamp(static_cast<int>(std::floor((y1 - box.y0) / cell_)), 0, ny_ - 1);
  std::vector<int> out;
  for (int j = j0; j <= j1; ++j) {
    for (int i = i0; i <= i1; ++i) {
      const int b = j * nx_ + i;
      for (int k = offsets_[b]; k < offsets_[b + 1]; ++k) {
        const int o = items_[k];
        if (o == s || distance(s, o) <= r + kDistanceTieTol) out.push_back(o);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Neighborhoods

std::vector<int> discrete_neighborhood(const SpatialIndex& index, const CrackSet& a, double eps) {
  if (eps < 0.0) throw std::invalid_argument("discrete_neighborhood: eps must be >= 0");
  std::vector<std::uint8_t> hit(index.mesh().num_simplices(), 0);
  for (int s : a.ids())
    for (int o : index.within(s, eps)) hit[o] = 1;
  std::vector<int> out;
  for (std::size_t s = 0; s < hit.size(); ++s)
    if (hit[s]) out.push_back(static_cast<int>(s));
  return out;
}

double neighborhood_volume(const TriangulationMesh& mesh, std::span<const int> simplices,
                           VolumeConvention conv) {
  double sum = 0.0, c = 0.0;
  for (int s : simplices) {
    if (conv == VolumeConvention::reference_only && mesh.label(s) == Region::exterior) continue;
    const double a = mesh.area(s);
    const double t = sum + a;
    c += std::abs(sum) >= std::abs(a) ? (sum - t) + a : (a - t) + sum;
    sum = t;
  }
  return sum + c;
}

NeighborhoodLedger::NeighborhoodLedger(const SpatialIndex& index, double eps, VolumeConvention conv)
    : index_(&index),
      eps_(eps),
      conv_(conv),
      broken_(index.mesh().num_simplices()),
      counters_(index.mesh().num_simplices(), 0) {
  if (eps < 0.0) throw std::invalid_argument("NeighborhoodLedger: eps must be >= 0");
}

double NeighborhoodLedger::weight(int s) const {
  const auto& mesh = index_->mesh();
  if (conv_ == VolumeConvention::reference_only && mesh.label(s) == Region::exterior) return 0.0;
  return mesh.area(s);
}

double NeighborhoodLedger::add(int s) {
  if (!broken_.insert(s)) throw ContractError("NeighborhoodLedger: simplex already broken");
  double delta = 0.0;
  for (int o : index_->within(s, eps_)) {
    if (counters_[o]++ == 0) {
      const double a = weight(o);
      delta += a;
      const double t = volume_ + a;
      volume_c_ += std::abs(volume_) >= std::abs(a) ? (volume_ - t) + a : (a - t) + volume_;
      volume_ = t;
    }
  }
  return delta;
}

double NeighborhoodLedger::preview(int s) const {
  if (broken_.contains(s)) return 0.0;
  double delta = 0.0;
  for (int o : index_->within(s, eps_))
    if (counters_[o] == 0) delta += weight(o);
  return delta;
}

double NeighborhoodLedger::preview(std::span<const int> set) const {
  std::unordered_set<int> fresh;
  for (int s : set) {
    if (broken_.contains(s)) continue;
    for (int o : index_->within(s, eps_))
      if (counters_[o] == 0) fresh.insert(o);
  }
  std::vector<int> ordered(fresh.begin(), fresh.end());
  std::sort(ordered.begin(), ordered.end());
  double delta = 0.0;
  for (int o : ordered) delta += weight(o);
  return delta;
}

std::vector<int> NeighborhoodLedger::covered_simplices() const {
  std::vector<int> out;
  for (std::size_t s = 0; s < counters_.size(); ++s)
    if (counters_[s] > 0) out.push_back(static_cast<int>(s));
  return out;
}

// ---------------------------------------------------------------------------
// Continuum references

double tube_volume_exact(Vec2 a, Vec2 b, double eps) {
  const double len = std::hypot(b.x - a.x, b.y - a.y);
  return 2.0 * eps * len + std::numbers::pi * eps * eps;
}

MonteCarloArea tube_volume_mc(std::span<const Segment> shapes, double eps, std::size_t samples,
                              std::uint64_t seed) {
  if (shapes.empty()) return {};
  if (samples < 10000) throw std::invalid_argument("tube_volume_mc: need at least 1e4 samples");
  Rect bb{shapes[0].a.x, shapes[0].a.y, shapes[0].a.x, shapes[0].a.y};
  for (const auto& sg : shapes) {
    for (Vec2 p : {sg.a, sg.b}) {
      bb.x0 = std::min(bb.x0, p.x);
      bb.x1 = std::max(bb.x1, p.x);
      bb.y0 = std::min(bb.y0, p.y);
      bb.y1 = std::max(bb.y1, p.y);
    }
  }
  bb = {bb.x0 - eps, bb.y0 - eps, bb.x1 + eps, bb.y1 + eps};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(bb.x0, bb.x1), uy(bb.y0, bb.y1);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    const Vec2 p{ux(rng), uy(rng)};
    for (const auto& sg : shapes) {
      if (point_segment_distance(p, sg.a, sg.b) <= eps) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  const double a = bb.area();
  return {a * p, a * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

namespace {

bool disks_disjoint(std::span<const Vec2> points, double r) {
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j)
      if (std::hypot(points[i].x - points[j].x, points[i].y - points[j].y) <= 2.0 * r) return false;
  return true;
}

}  // namespace

double disk_union_area(std::span<const Vec2> points, double r, double cell) {
  if (points.empty()) return 0.0;
  if (disks_disjoint(points, r)) return static_cast<double>(points.size()) * std::numbers::pi * r * r;
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) { return a.y < b.y; });
  const double y0 = pts.front().y - r, y1 = pts.back().y + r;
  const int rows = std::max(1, static_cast<int>(std::ceil((y1 - y0) / cell)));
  const double dy = (y1 - y0) / rows;
  std::vector<std::pair<double, double>> chords;
  double area = 0.0;
  std::size_t lo = 0;
  for (int k = 0; k < rows; ++k) {
    const double y = y0 + (k + 0.5) * dy;
    while (lo < pts.size() && pts[lo].y < y - r) ++lo;
    chords.clear();
    for (std::size_t q = lo; q < pts.size() && pts[q].y <= y + r; ++q) {
      const double d = y - pts[q].y;
      const double half = std::sqrt(std::max(0.0, r * r - d * d));
      chords.emplace_back(pts[q].x - half, pts[q].x + half);
    }
    std::sort(chords.begin(), chords.end());
    double len = 0.0, a = 0.0, b = 0.0;
    bool open = false;
    for (auto [c0, c1] : chords) {
      if (!open || c0 > b) {
        if (open) len += b - a;
        a = c0;
        b = c1;
        open = true;
      } else {
        b = std::max(b, c1);
      }
    }
    if (open) len += b - a;
    area += len * dy;
  }
  return area;
}

GrowthCheck neighborhood_growth_check(std::span<const Vec2> points, double r, double r_prime,
                                      double constant, double cell) {
  if (points.empty()) throw std::invalid_argument("growth check: empty point set");
  if (!(r > 0.0) || !(r_prime > 0.0)) throw std::invalid_argument("growth check: radii must be positive");
  if (cell <= 0.0) cell = r / 50.0;
  if (cell > r / 10.0) throw std::invalid_argument("growth check: raster cell exceeds r/10");
  GrowthCheck g;
  g.r = r;
  g.r_prime = r_prime;
  g.constant = constant;
  g.vol_r = disk_union_area(points, r, cell);
  g.vol_grown = disk_union_area(points, r + r_prime, cell);
  const double s = (r + r_prime) / r;
  g.ratio = disks_disjoint(points, r + r_prime) ? s * s : g.vol_grown / g.vol_r;
  g.bound = constant * s * s;
  return g;
}

// ---------------------------------------------------------------------------
// Cube cover, good set, separation

CubeCover cube_cover(const TriangulationMesh& mesh, const CrackSet& crack, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("cube_cover: eps must be positive");
  const Rect ref = mesh.domain().reference();
  const Rect& box = mesh.box();
  CubeCover cc;
  cc.side = eps / std::numbers::sqrt2;
  cc.origin = {box.x0, box.y0};
  cc.nx = static_cast<int>(std::ceil(box.width() / cc.side - 1e-9));
  cc.ny = static_cast<int>(std::ceil(box.height() / cc.side - 1e-9));
  const std::size_t n = static_cast<std::size_t>(cc.nx) * cc.ny;
  std::vector<std::uint8_t> considered(n, 0), meets(n, 0);
  cc.selected.assign(n, 0);
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(j) * cc.nx + i; };
  for (int j = 0; j < cc.ny; ++j) {
    for (int i = 0; i < cc.nx; ++i) {
      const Rect q = cc.cube(i, j);
      const bool overlaps_ref = q.x0 < ref.x1 && q.x1 > ref.x0 && q.y0 < ref.y1 && q.y1 > ref.y0;
      considered[idx(i, j)] = overlaps_ref;
      if (overlaps_ref && !ref.contains(q)) cc.selected[idx(i, j)] = 1;
    }
  }
  for (int s : crack.ids()) {
    const Triangle t = mesh.triangle(s);
    const double x0 = std::min({t[0].x, t[1].x, t[2].x}), x1 = std::max({t[0].x, t[1].x, t[2].x});
    const double y0 = std::min({t[0].y, t[1].y, t[2].y}), y1 = std::max({t[0].y, t[1].y, t[2].y});
    const int i0 = std::clamp(static_cast<int>(std::floor((x0 - box.x0) / cc.side)) - 1, 0, cc.nx - 1);
    const int i1 = std::clamp(static_cast<int>(std::floor((x1 - box.x0) / cc.side)) + 1, 0, cc.nx - 1);
    const int j0 = std::clamp(static_cast<int>(std::floor((y0 - box.y0) / cc.side)) - 1, 0, cc.ny - 1);
    const int j1 = std::clamp(static_cast<int>(std::floor((y1 - box.y0) / cc.side)) + 1, 0, cc.ny - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        if (considered[idx(i, j)] && triangle_meets_open_box(t, cc.cube(i, j))) {
          cc.selected[idx(i, j)] = 1;
          meets[idx(i, j)] = 1;
        }
  }
  auto on = [&](int i, int j) {
    return i >= 0 && j >= 0 && i < cc.nx && j < cc.ny && considered[idx(i, j)] && cc.selected[idx(i, j)];
  };
  for (int j = 0; j < cc.ny; ++j) {
    for (int i = 0; i < cc.nx; ++i) {
      if (!on(i, j)) continue;
      ++cc.cube_count;
      if (meets[idx(i, j)] && ref.contains(cc.cube(i, j))) ++cc.crack_cube_count;
      const int exposed = !on(i - 1, j) + !on(i + 1, j) + !on(i, j - 1) + !on(i, j + 1);
      cc.perimeter += exposed * cc.side;
    }
  }
  return cc;
}

std::vector<int> good_set(const SpatialIndex& index, const CrackSet& crack, double eps) {
  const auto& mesh = index.mesh();
  const std::size_t ns = mesh.num_simplices();
  std::vector<std::uint8_t> blocked(ns, 0), kept(ns, 0);
  for (int s : discrete_neighborhood(index, crack, eps)) blocked[s] = 1;
  for (std::size_t s = 0; s < ns; ++s)
    if (mesh.label(static_cast<int>(s)) == Region::exterior) blocked[s] = 1;
  std::vector<int> stack;
  for (std::size_t s = 0; s < ns; ++s) {
    if (mesh.label(static_cast<int>(s)) != Region::collar || blocked[s] || kept[s]) continue;
    kept[s] = 1;
    stack.push_back(static_cast<int>(s));
    while (!stack.empty()) {
      const int c = stack.back();
      stack.pop_back();
      for (int o : mesh.edge_neighbors(c)) {
        if (o >= 0 && !blocked[o] && !kept[o]) {
          kept[o] = 1;
          stack.push_back(o);
        }
      }
    }
  }
  std::vector<int> out;
  for (std::size_t s = 0; s < ns; ++s)
    if (kept[s]) out.push_back(static_cast<int>(s));
  return out;
}

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

std::size_t collar_components(const TriangulationMesh& mesh, const CrackSet* crack) {
  std::vector<int> parent(mesh.num_vertices());
  std::iota(parent.begin(), parent.end(), 0);
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) == Region::exterior || (crack && crack->contains(s))) continue;
    const auto& t = mesh.simplex(s);
    const int r0 = find_root(parent, t[0]);
    for (int k = 1; k < 3; ++k) {
      const int rk = find_root(parent, t[k]);
      if (rk != r0) parent[rk] = r0;
    }
  }
  std::vector<int> roots;
  for (int s = 0; s < ns; ++s)
    if (mesh.label(s) == Region::collar) roots.push_back(find_root(parent, mesh.simplex(s)[0]));
  std::sort(roots.begin(), roots.end());
  return static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
}

}  // namespace

bool separates_collar(const TriangulationMesh& mesh, const CrackSet& crack) {
  if (crack.empty()) return false;
  return collar_components(mesh, &crack) > collar_components(mesh, nullptr);
}

}  // namespace ef
