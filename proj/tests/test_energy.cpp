// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "eigenfracture/energy.hpp"
#include "eigenfracture/error.hpp"
#include "support.hpp"

using namespace ef;

TEST_CASE("total energy splits into elastic and surface parts") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1, 0.3);
  const EnergyParams p{0.12, 0.7, Stiffness{1.2, 0.1, 0.9}};
  const SpatialIndex index(mesh, p.eps);
  std::mt19937_64 rng(8);
  std::vector<double> nodal(mesh.num_vertices());
  std::uniform_real_distribution<double> u01(-1.0, 1.0);
  for (auto& v : nodal) v = u01(rng);
  const DisplacementField u{nodal};
  CrackSet pre(mesh.num_simplices()), crack(mesh.num_simplices());
  const auto a = eftest::random_interior_set(mesh, 3, rng);
  const auto b = eftest::random_interior_set(mesh, 5, rng);
  pre.insert_all(a);
  crack.insert_all(a);
  crack.insert_all(b);
  const auto gamma = optimal_gamma(mesh, u, crack);
  NeighborhoodLedger ledger(index, p.eps);
  for (int s : crack.ids()) ledger.add(s);
  const auto e = total_energy(mesh, u, gamma, pre, p, ledger);

  double elastic = 0.0;
  for (int s : eftest::interior_simplices(mesh))
    if (!crack.contains(s)) elastic += mesh.area(s) * p.c.q(mesh.gradient(s, nodal));
  const auto ids = std::vector<int>(crack.ids().begin(), crack.ids().end());
  const double vol = eftest::area_of(mesh, eftest::brute_neighborhood(mesh, ids, p.eps));
  CHECK(e.elastic == doctest::Approx(elastic).epsilon(1e-12));
  CHECK(e.lambda == doctest::Approx(vol / (2 * p.eps)).epsilon(1e-12));
  CHECK(e.surface == doctest::Approx(p.kappa * e.lambda).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(e.elastic + e.surface).epsilon(1e-12));

  NeighborhoodLedger wrong(index, p.eps);
  wrong.add(a.front());
  CHECK_THROWS_AS(total_energy(mesh, u, gamma, pre, p, wrong), ContractError);
}

TEST_CASE("work increment of a uniform stretch") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1);
  const double a = 1.5, t0 = 0.25, t1 = 0.375;
  const auto load = BoundaryLoad::stretch(a);
  DisplacementField u{interpolate_boundary(load, mesh, t0)};
  const EigenField gamma{std::vector<Vec2>(mesh.num_simplices())};
  // 2 int grad u . C grad(g(t1) - g(t0)) = 2 a t0 a (t1 - t0) over the unit body.
  const double expect = 2.0 * a * t0 * a * (t1 - t0);
  CHECK(work_increment(mesh, u, gamma, load, t0, t1, Stiffness{}) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(work_increment_left(mesh, u, gamma, load, t0, t1, Stiffness{}) == doctest::Approx(expect).epsilon(1e-12));

  const BoundaryLoad quad{LoadKind::affine_ramp, 1.0, 0.0, 1.0, 0.0, 2.0};
  DisplacementField uq{interpolate_boundary(quad, mesh, t0)};
  const double exact = 2.0 * t0 * t0 * (t1 * t1 - t0 * t0);
  CHECK(work_increment(mesh, uq, gamma, quad, t0, t1, Stiffness{}) == doctest::Approx(exact).epsilon(1e-12));
  const double left = 2.0 * t0 * t0 * (t1 - t0) * 2.0 * t0;
  CHECK(work_increment_left(mesh, uq, gamma, quad, t0, t1, Stiffness{}) == doctest::Approx(left).epsilon(1e-12));
}

TEST_CASE("Griffith reference energy") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1);
  DisplacementField u{interpolate_boundary(BoundaryLoad::stretch(1.0), mesh, 1.0)};
  CHECK(griffith_reference(mesh, u, 0.5, 2.0, Stiffness{}) == doctest::Approx(2.0));
}
