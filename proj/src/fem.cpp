// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "eigenfracture/error.hpp"

namespace ef {

double Stiffness::max_eigenvalue() const {
  const double m = 0.5 * (c11 + c22);
  const double d = std::sqrt(0.25 * (c11 - c22) * (c11 - c22) + c12 * c12);
  return m + d;
}

std::vector<int> EigenField::support() const {
  std::vector<int> out;
  for (std::size_t s = 0; s < values.size(); ++s)
    if (values[s].x != 0.0 || values[s].y != 0.0) out.push_back(static_cast<int>(s));
  return out;
}

double BoundaryLoad::value(double t, Vec2 x) const {
  switch (kind) {
    case LoadKind::zero: return 0.0;
    case LoadKind::uniform_stretch: return amplitude * t * x.x;
    case LoadKind::shear_ramp: return amplitude * t * x.y;
    case LoadKind::affine_ramp: return (c0 + c1 * x.x + c2 * x.y) * std::pow(t, power);
    case LoadKind::quadratic: return amplitude * t * x.x * x.x;
  }
  return 0.0;
}

double BoundaryLoad::rate(double t, Vec2 x) const {
  switch (kind) {
    case LoadKind::zero: return 0.0;
    case LoadKind::uniform_stretch: return amplitude * x.x;
    case LoadKind::shear_ramp: return amplitude * x.y;
    case LoadKind::affine_ramp:
      return power == 0.0 ? 0.0 : (c0 + c1 * x.x + c2 * x.y) * power * std::pow(t, power - 1.0);
    case LoadKind::quadratic: return amplitude * x.x * x.x;
  }
  return 0.0;
}

LoadKind parse_load_kind(const std::string& name) {
  if (name == "zero") return LoadKind::zero;
  if (name == "uniform_stretch") return LoadKind::uniform_stretch;
  if (name == "shear_ramp") return LoadKind::shear_ramp;
  if (name == "affine_ramp") return LoadKind::affine_ramp;
  if (name == "quadratic") return LoadKind::quadratic;
  throw std::invalid_argument("unknown load type '" + name + "'");
}

std::string to_string(LoadKind kind) {
  switch (kind) {
    case LoadKind::zero: return "zero";
    case LoadKind::uniform_stretch: return "uniform_stretch";
    case LoadKind::shear_ramp: return "shear_ramp";
    case LoadKind::affine_ramp: return "affine_ramp";
    case LoadKind::quadratic: return "quadratic";
  }
  return "zero";
}

std::vector<double> interpolate_boundary(const BoundaryLoad& load, const TriangulationMesh& mesh,
                                         double t) {
  std::vector<double> g(mesh.num_vertices());
  for (std::size_t v = 0; v < g.size(); ++v) g[v] = load.value(t, mesh.vertex(static_cast<int>(v)));
  return g;
}

std::vector<double> interpolate_rate(const BoundaryLoad& load, const TriangulationMesh& mesh,
                                     double t) {
  std::vector<double> g(mesh.num_vertices());
  for (std::size_t v = 0; v < g.size(); ++v) g[v] = load.rate(t, mesh.vertex(static_cast<int>(v)));
  return g;
}

// ---------------------------------------------------------------------------

namespace {

void build_csr(std::vector<std::pair<int, int>>& pairs, std::size_t rows, std::vector<int>& row_ptr,
               std::vector<int>& cols) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  row_ptr.assign(rows + 1, 0);
  cols.resize(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    ++row_ptr[pairs[k].first + 1];
    cols[k] = pairs[k].second;
  }
  for (std::size_t r = 0; r < rows; ++r) row_ptr[r + 1] += row_ptr[r];
}

int slot(const std::vector<int>& row_ptr, const std::vector<int>& cols, int row, int col) {
  const auto b = cols.begin() + row_ptr[row], e = cols.begin() + row_ptr[row + 1];
  const auto it = std::lower_bound(b, e, col);
  return static_cast<int>(it - cols.begin());
}

}  // namespace

FemContext::FemContext(const TriangulationMesh& mesh) : mesh_(&mesh) {
  const std::size_t nv = mesh.num_vertices();
  dof_.assign(nv, -1);
  for (std::size_t v = 0; v < nv; ++v) {
    const int vi = static_cast<int>(v);
    if (mesh.is_body_vertex(vi) && !mesh.is_collar_vertex(vi)) {
      dof_[v] = static_cast<int>(free_vertex_.size());
      free_vertex_.push_back(vi);
    }
  }
  const int ns = static_cast<int>(mesh.num_simplices());
  std::vector<std::pair<int, int>> ff, fc;
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior) continue;
    const auto& t = mesh.simplex(s);
    for (int a = 0; a < 3; ++a) {
      const int ra = dof_[t[a]];
      if (ra < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int cb = dof_[t[b]];
        if (cb >= 0)
          ff.emplace_back(ra, cb);
        else
          fc.emplace_back(ra, t[b]);
      }
    }
  }
  build_csr(ff, free_vertex_.size(), ff_rows_, ff_cols_);
  build_csr(fc, free_vertex_.size(), fc_rows_, fc_cols_);
  scatter_.assign(mesh.num_simplices(), {});
  for (int s = 0; s < ns; ++s) {
    scatter_[s].fill(-1);
    if (mesh.label(s) != Region::interior) continue;
    const auto& t = mesh.simplex(s);
    for (int a = 0; a < 3; ++a) {
      const int ra = dof_[t[a]];
      if (ra < 0) continue;
      for (int b = 0; b < 3; ++b) {
        const int cb = dof_[t[b]];
        scatter_[s][3 * a + b] = cb >= 0 ? slot(ff_rows_, ff_cols_, ra, cb)
                                         : -(slot(fc_rows_, fc_cols_, ra, t[b]) + 2);
      }
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

int root_of(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

ElasticSystem assemble(const FemContext& ctx, const CrackSet& crack, const Stiffness& c) {
  if (!c.spd()) throw std::invalid_argument("assemble: stiffness tensor must be SPD");
  const auto& mesh = ctx.mesh();
  for (int s : crack.ids())
    if (mesh.label(s) != Region::interior)
      throw ContractError("assemble: crack contains a non-interior simplex");

  ElasticSystem sys;
  sys.ctx_ = &ctx;
  sys.crack_ = crack;
  sys.c_ = c;
  sys.ff_vals_.assign(ctx.ff_cols_.size(), 0.0);
  sys.fc_vals_.assign(ctx.fc_cols_.size(), 0.0);

  const std::size_t n = ctx.num_free();
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  const int anchor = static_cast<int>(n);

  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior || crack.contains(s)) continue;
    const auto& g = mesh.shape_gradients(s);
    const double area = mesh.area(s);
    const auto& sc = ctx.scatter_[s];
    for (int a = 0; a < 3; ++a) {
      const Vec2 cg = c.apply(g[a]);
      for (int b = 0; b < 3; ++b) {
        const int k = sc[3 * a + b];
        if (k == -1) continue;
        const double v = area * dot(cg, g[b]);
        if (k >= 0)
          sys.ff_vals_[k] += v;
        else
          sys.fc_vals_[-k - 2] += v;
      }
    }
    const auto& t = mesh.simplex(s);
    const int r0 = root_of(parent, ctx.dof_[t[0]] >= 0 ? ctx.dof_[t[0]] : anchor);
    for (int k = 1; k < 3; ++k) {
      const int rk = root_of(parent, ctx.dof_[t[k]] >= 0 ? ctx.dof_[t[k]] : anchor);
      if (rk != r0) parent[std::max(rk, r0)] = std::min(rk, r0);
    }
  }

  sys.diag_.assign(n, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (int k = ctx.ff_rows_[r]; k < ctx.ff_rows_[r + 1]; ++k)
      if (ctx.ff_cols_[k] == static_cast<int>(r)) sys.diag_[r] = sys.ff_vals_[k];

  // Components not reaching the anchor float; gather them in dof order.
  const int anchor_root = root_of(parent, anchor);
  std::vector<int> comp_index(n + 1, -1);
  sys.active_.assign(n, 1);
  for (std::size_t d = 0; d < n; ++d) {
    const int r = root_of(parent, static_cast<int>(d));
    if (r == anchor_root) continue;
    if (comp_index[r] < 0) {
      comp_index[r] = static_cast<int>(sys.floating_.size());
      sys.floating_.emplace_back();
    }
    sys.floating_[comp_index[r]].push_back(static_cast<int>(d));
    sys.active_[d] = 0;
  }
  return sys;
}

void ElasticSystem::multiply(std::span<const double> x, std::span<double> y) const {
  const auto& ctx = *ctx_;
  const std::size_t n = ctx.num_free();
  for (std::size_t r = 0; r < n; ++r) {
    if (!active_[r]) {
      y[r] = 0.0;
      continue;
    }
    double acc = 0.0;
    for (int k = ctx.ff_rows_[r]; k < ctx.ff_rows_[r + 1]; ++k) acc += ff_vals_[k] * x[ctx.ff_cols_[k]];
    y[r] = acc;
  }
}

double ElasticSystem::entry(int i, int j) const {
  const auto& ctx = *ctx_;
  const auto b = ctx.ff_cols_.begin() + ctx.ff_rows_[i], e = ctx.ff_cols_.begin() + ctx.ff_rows_[i + 1];
  const auto it = std::lower_bound(b, e, j);
  if (it == e || *it != j) return 0.0;
  return ff_vals_[it - ctx.ff_cols_.begin()];
}

// ---------------------------------------------------------------------------

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dotv(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

struct CgOutcome {
  bool converged = false;
  int iterations = 0;
  double relative_residual = 0.0;
};

CgOutcome conjugate_gradient(const ElasticSystem& sys, std::span<const double> diag,
                             std::span<const double> b, std::vector<double>& x, double rtol,
                             int max_iter, bool jacobi) {
  const std::size_t n = b.size();
  CgOutcome out;
  const double bnorm = norm2(b);
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    out.converged = true;
    return out;
  }
  std::vector<double> r(n), z(n), p(n), q(n);
  sys.multiply(x, q);
  for (std::size_t k = 0; k < n; ++k) r[k] = sys.active(static_cast<int>(k)) ? b[k] - q[k] : 0.0;
  auto precondition = [&] {
    for (std::size_t k = 0; k < n; ++k)
      z[k] = jacobi && diag[k] > 0.0 ? r[k] / diag[k] : r[k];
  };
  double rnorm = norm2(r);
  if (rnorm <= rtol * bnorm) {
    out.converged = true;
    out.relative_residual = rnorm / bnorm;
    return out;
  }
  precondition();
  p = z;
  double rz = dotv(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    sys.multiply(p, q);
    const double pq = dotv(p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    for (std::size_t k = 0; k < n; ++k) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    rnorm = norm2(r);
    out.iterations = it;
    out.relative_residual = rnorm / bnorm;
    if (rnorm <= rtol * bnorm) {
      out.converged = true;
      return out;
    }
    precondition();
    const double rz_new = dotv(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  return out;
}

}  // namespace

DisplacementField solve_displacement(const ElasticSystem& sys, const BoundaryLoad& load, double t,
                                     const DisplacementField* prev, const DisplacementField* guess,
                                     SolveReport* report) {
  const auto& ctx = *sys.ctx_;
  const auto& mesh = ctx.mesh();
  DisplacementField u{interpolate_boundary(load, mesh, t)};
  const std::size_t n = ctx.num_free();

  for (const auto& comp : sys.floating_) {
    double mean = 0.0;
    if (prev) {
      for (int d : comp) mean += prev->values[ctx.free_vertex(d)];
      mean /= static_cast<double>(comp.size());
    }
    for (int d : comp) u.values[ctx.free_vertex(d)] = mean;
  }

  std::vector<double> b(n, 0.0), x(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    if (!sys.active_[r]) continue;
    double acc = 0.0;
    for (int k = ctx.fc_rows_[r]; k < ctx.fc_rows_[r + 1]; ++k) acc -= sys.fc_vals_[k] * u.values[ctx.fc_cols_[k]];
    b[r] = acc;
    const int v = ctx.free_vertex(static_cast<int>(r));
    x[r] = guess ? guess->values[v] : u.values[v];
  }

  const int active = static_cast<int>(std::count(sys.active_.begin(), sys.active_.end(), 1));
  const int max_iter = std::max(50, static_cast<int>(std::ceil(50.0 * std::sqrt(static_cast<double>(active)))));
  constexpr double rtol = 1e-10;
  const std::vector<double> x0 = x;
  CgOutcome res = conjugate_gradient(sys, sys.diag_, b, x, rtol, max_iter, false);
  bool jacobi = false;
  if (!res.converged) {
    x = x0;
    res = conjugate_gradient(sys, sys.diag_, b, x, rtol, max_iter, true);
    jacobi = true;
  }
  if (!res.converged)
    throw SolverError("conjugate gradients did not converge", res.relative_residual);
  for (std::size_t r = 0; r < n; ++r)
    if (sys.active_[r]) u.values[ctx.free_vertex(static_cast<int>(r))] = x[r];
  if (report) *report = {res.iterations, res.relative_residual, jacobi};
  return u;
}

EigenField optimal_gamma(const TriangulationMesh& mesh, const DisplacementField& u, const CrackSet& crack) {
  EigenField g{std::vector<Vec2>(mesh.num_simplices())};
  for (int s : crack.ids()) g.values[s] = mesh.gradient(s, u.values);
  return g;
}

double elastic_energy(const TriangulationMesh& mesh, const DisplacementField& u, const CrackSet& crack,
                      const Stiffness& c) {
  double e = 0.0;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior || crack.contains(s)) continue;
    e += mesh.area(s) * c.q(mesh.gradient(s, u.values));
  }
  return e;
}

}  // namespace ef
