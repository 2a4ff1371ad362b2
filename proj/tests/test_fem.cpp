// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>

#include "eigenfracture/error.hpp"
#include "eigenfracture/fem.hpp"
#include "support.hpp"

using namespace ef;

namespace {

// Dense stiffness over all vertices from the unbroken interior simplices.
std::vector<std::vector<double>> dense_stiffness(const TriangulationMesh& mesh, const CrackSet& crack,
                                                 const Stiffness& c) {
  const std::size_t n = mesh.num_vertices();
  std::vector<std::vector<double>> k(n, std::vector<double>(n, 0.0));
  for (int s = 0; s < static_cast<int>(mesh.num_simplices()); ++s) {
    if (mesh.label(s) != Region::interior || crack.contains(s)) continue;
    const auto& tri = mesh.simplex(s);
    const Triangle t = mesh.triangle(s);
    const double two_a = cross(t[1] - t[0], t[2] - t[0]);
    std::array<Vec2, 3> g;
    for (int i = 0; i < 3; ++i) {
      const Vec2 e = t[(i + 2) % 3] - t[(i + 1) % 3];
      g[i] = {-e.y / two_a, e.x / two_a};
    }
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) k[tri[a]][tri[b]] += 0.5 * std::abs(two_a) * dot(g[a], c.apply(g[b]));
  }
  return k;
}

std::vector<double> gauss_solve(std::vector<std::vector<double>> a, std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace

TEST_CASE("stiffness entries match dense assembly") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.125);
  const FemContext ctx(mesh);
  const Stiffness c{2.0, 0.3, 1.1};
  CrackSet crack(mesh.num_simplices());
  std::mt19937_64 rng(2);
  crack.insert_all(eftest::random_interior_set(mesh, 6, rng));
  const auto sys = assemble(ctx, crack, c);
  const auto dense = dense_stiffness(mesh, crack, c);
  for (int i = 0; i < static_cast<int>(ctx.num_free()); ++i)
    for (int j = 0; j < static_cast<int>(ctx.num_free()); ++j)
      CHECK(sys.entry(i, j) == doctest::Approx(dense[ctx.free_vertex(i)][ctx.free_vertex(j)]).epsilon(1e-12));
}

TEST_CASE("conjugate gradients agree with a dense solve") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1);
  const FemContext ctx(mesh);
  const Stiffness c{1.5, -0.2, 0.8};
  CrackSet crack(mesh.num_simplices());
  for (int s : eftest::interior_simplices(mesh))
    if (mesh.cell_col(s) == 5 && mesh.centroid(s).y < 0.45) crack.insert(s);
  const BoundaryLoad load{LoadKind::quadratic, 1.3};
  const auto sys = assemble(ctx, crack, c);
  SolveReport rep;
  const auto u = solve_displacement(sys, load, 0.7, nullptr, nullptr, &rep);
  CHECK(rep.relative_residual <= 1e-10);

  const auto dense = dense_stiffness(mesh, crack, c);
  const auto g = interpolate_boundary(load, mesh, 0.7);
  const std::size_t nf = ctx.num_free();
  std::vector<std::vector<double>> a(nf, std::vector<double>(nf));
  std::vector<double> rhs(nf, 0.0);
  for (std::size_t i = 0; i < nf; ++i) {
    const int vi = ctx.free_vertex(static_cast<int>(i));
    for (std::size_t j = 0; j < nf; ++j) a[i][j] = dense[vi][ctx.free_vertex(static_cast<int>(j))];
    for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v)
      if (ctx.dof(v) < 0) rhs[i] -= dense[vi][v] * g[v];
  }
  const auto x = gauss_solve(a, rhs);
  for (std::size_t i = 0; i < nf; ++i) CHECK(u.values[ctx.free_vertex(static_cast<int>(i))] == doctest::Approx(x[i]).epsilon(1e-7));
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v)
    if (mesh.is_collar_vertex(v)) CHECK(u.values[v] == g[v]);
}

TEST_CASE("affine loads are reproduced exactly off the crack") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1);
  const FemContext ctx(mesh);
  const auto sys = assemble(ctx, CrackSet(mesh.num_simplices()), Stiffness{});
  const auto load = BoundaryLoad::stretch(2.0);
  const auto u = solve_displacement(sys, load, 0.5);
  for (int v = 0; v < static_cast<int>(mesh.num_vertices()); ++v)
    CHECK(u.values[v] == doctest::Approx(mesh.vertex(v).x).epsilon(1e-8));
  CHECK(elastic_energy(mesh, u, CrackSet(mesh.num_simplices()), Stiffness{}) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("severed component floats at the mean of the previous state") {
  DomainSpec d;
  d.dirichlet_sides = kLeft;
  const auto mesh = build_structured_mesh(d, 0.1);
  const FemContext ctx(mesh);
  CrackSet cut(mesh.num_simplices());
  for (int s : eftest::interior_simplices(mesh))
    if (mesh.cell_col(s) == 6) cut.insert(s);
  const auto sys = assemble(ctx, cut, Stiffness{});
  REQUIRE(!sys.floating().empty());
  DisplacementField prev{std::vector<double>(mesh.num_vertices(), 0.25)};
  const auto u = solve_displacement(sys, BoundaryLoad::stretch(1.0), 1.0, &prev);
  for (const auto& comp : sys.floating())
    for (int dof : comp) CHECK(u.values[ctx.free_vertex(dof)] == doctest::Approx(0.25));
  const auto u0 = solve_displacement(sys, BoundaryLoad::stretch(1.0), 1.0);
  for (const auto& comp : sys.floating())
    for (int dof : comp) CHECK(u0.values[ctx.free_vertex(dof)] == 0.0);
}

TEST_CASE("optimal eigenstrain equals the gradient on the crack") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1);
  std::vector<double> nodal(mesh.num_vertices());
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n01;
  for (auto& v : nodal) v = n01(rng);
  CrackSet crack(mesh.num_simplices());
  crack.insert_all(eftest::random_interior_set(mesh, 10, rng));
  const DisplacementField u{nodal};
  const auto gamma = optimal_gamma(mesh, u, crack);
  for (int s = 0; s < static_cast<int>(mesh.num_simplices()); ++s) {
    const Vec2 g = gamma.values[s];
    if (crack.contains(s)) {
      const Vec2 du = mesh.gradient(s, nodal);
      CHECK(g.x == du.x);
      CHECK(g.y == du.y);
    } else {
      CHECK(g.x == 0.0);
      CHECK(g.y == 0.0);
    }
  }
  const auto sup = gamma.support();
  CHECK(eftest::is_subset(sup, std::vector<int>(crack.ids().begin(), crack.ids().end())));
}

TEST_CASE("load protocols and their rates") {
  const Vec2 x{0.3, 0.7};
  const BoundaryLoad shear{LoadKind::shear_ramp, 2.0};
  CHECK(shear.value(0.5, x) == doctest::Approx(0.7));
  CHECK(shear.rate(0.5, x) == doctest::Approx(1.4));
  BoundaryLoad ramp{LoadKind::affine_ramp, 1.0, 0.1, 0.2, 0.3, 2.0};
  const double dt = 1e-6;
  CHECK(ramp.rate(0.6, x) == doctest::Approx((ramp.value(0.6 + dt, x) - ramp.value(0.6 - dt, x)) / (2 * dt)).epsilon(1e-6));
  CHECK(BoundaryLoad::zero().value(1.0, x) == 0.0);
  CHECK(parse_load_kind(to_string(LoadKind::quadratic)) == LoadKind::quadratic);
  CHECK_THROWS_AS(parse_load_kind("torsion"), std::invalid_argument);
}

TEST_CASE("assembly preconditions") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.2);
  const FemContext ctx(mesh);
  CHECK_THROWS_AS(assemble(ctx, CrackSet(mesh.num_simplices()), Stiffness{1.0, 2.0, 1.0}), std::invalid_argument);
  CrackSet bad(mesh.num_simplices());
  for (int s = 0; s < static_cast<int>(mesh.num_simplices()); ++s)
    if (mesh.label(s) == Region::collar) {
      bad.insert(s);
      break;
    }
  CHECK_THROWS_AS(assemble(ctx, bad, Stiffness{}), ContractError);
}
