// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "eigenfracture/evolution.hpp"

using namespace ef;

namespace {

Problem coarse_bar(double eps = 0.1) { return Problem::build(DomainSpec{}, 0.1, EnergyParams{eps, 1.0, Stiffness{}}); }

}  // namespace

TEST_CASE("dyadic time grid") {
  const TimeGrid g(3);
  CHECK(g.size() == 9);
  CHECK(g.node(0) == 0.0);
  CHECK(g.node(8) == 1.0);
  CHECK(g.spacing() == 0.125);
  CHECK(g.nodes()[3] == 0.375);
  CHECK(g.nested_in(TimeGrid(5)));
  CHECK_FALSE(TimeGrid(4).nested_in(g));
  CHECK(TimeGrid(0).size() == 2);
  CHECK_THROWS_AS(TimeGrid(-1), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(21), std::invalid_argument);
}

TEST_CASE("zero load leaves everything at zero") {
  const auto p = coarse_bar();
  const auto traj = evolve(p, BoundaryLoad::zero(), TimeGrid(2), MinimizeStrategy{});
  REQUIRE(traj.nodes.size() == 5);
  for (const auto& n : traj.nodes) {
    CHECK(n.energy.total == 0.0);
    CHECK(n.cumulative_work == 0.0);
    CHECK(n.crack.empty());
    CHECK_FALSE(n.rupture);
  }
  CHECK_FALSE(traj.rupture_time());
}

TEST_CASE("bar ruptures once and stays ruptured") {
  const auto p = coarse_bar();
  const auto traj = evolve(p, BoundaryLoad::stretch(2.0), TimeGrid(4), MinimizeStrategy{});
  REQUIRE(traj.rupture_node);
  int transitions = 0;
  for (std::size_t i = 1; i < traj.nodes.size(); ++i) {
    CHECK(traj.nodes[i - 1].crack.subset_of(traj.nodes[i].crack));
    CHECK(traj.nodes[i].energy.lambda >= traj.nodes[i - 1].energy.lambda);
    transitions += traj.nodes[i].rupture != traj.nodes[i - 1].rupture;
    if (traj.nodes[i - 1].rupture) CHECK(traj.nodes[i].rupture);
  }
  CHECK(transitions == 1);
  CHECK(traj.nodes[*traj.rupture_node].rupture);
  CHECK(check_trajectory_invariants(traj).ok());
  const auto est = verify_discrete_estimate(traj);
  CHECK(est.ok());
  CHECK(est.pairs_checked == 17 * 18 / 2);
}

TEST_CASE("rate integrals of a uniform stretch") {
  const auto p = coarse_bar();
  const auto rates = interval_rate_integrals(*p.mesh, BoundaryLoad::stretch(3.0), TimeGrid(3));
  REQUIRE(rates.size() == 8);
  for (double r : rates) CHECK(r == doctest::Approx(3.0 / 8.0).epsilon(1e-12));
  // ||d_t grad g|| = 2 t over the unit body for g = x t^2.
  const BoundaryLoad ramp{LoadKind::affine_ramp, 1.0, 0.0, 1.0, 0.0, 2.0};
  const auto r2 = interval_rate_integrals(*p.mesh, ramp, TimeGrid(2));
  for (std::size_t i = 0; i < r2.size(); ++i) {
    const double a = 0.25 * i, b = a + 0.25;
    CHECK(r2[i] == doctest::Approx(b * b - a * a).epsilon(1e-12));
  }
  CHECK(e_of_m(*p.mesh, ramp, TimeGrid(2)) == doctest::Approx(1.0 - 0.5625).epsilon(1e-12));
}

TEST_CASE("balance defect is first order in the time step") {
  const auto p = coarse_bar(0.15);
  std::vector<double> defects;
  for (int m : {3, 4, 5}) {
    const auto traj = evolve(p, BoundaryLoad::stretch(1.0), TimeGrid(m), MinimizeStrategy{});
    CHECK_FALSE(traj.rupture_node);
    defects.push_back(traj.max_balance_defect());
  }
  CHECK(defects[1] == doctest::Approx(defects[0] / 2).epsilon(1e-6));
  CHECK(defects[2] == doctest::Approx(defects[1] / 2).epsilon(1e-6));
}

TEST_CASE("kept states and callbacks") {
  const auto p = coarse_bar();
  EvolveOptions opt;
  opt.keep_states = false;
  opt.keep_at = {0.5};
  std::size_t calls = 0;
  opt.on_node = [&](const NodeRecord& rec, const StepResult& st) {
    CHECK(rec.index == calls++);
    CHECK(st.ledger.has_value());
    CHECK(check_state_invariants(p, st, rec.index).ok());
  };
  const auto traj = evolve(p, BoundaryLoad::stretch(2.0), TimeGrid(2), MinimizeStrategy{}, opt);
  CHECK(calls == 5);
  for (const auto& n : traj.nodes) CHECK(n.state.has_value() == (n.t == 0.5));
}

TEST_CASE("simultaneous schedules") {
  const DomainSpec d;
  const EnergyParams base;
  const auto load = BoundaryLoad::stretch(2.0);
  CHECK_THROWS_AS(simultaneous_run(d, base, {}, {}, {}, load, {}), std::invalid_argument);
  CHECK_THROWS_AS(simultaneous_run(d, base, {}, {0.1, 0.05}, {3}, load, {}), std::invalid_argument);
  CHECK_THROWS_AS(simultaneous_run(d, base, {}, {-0.1}, {3}, load, {}), std::invalid_argument);
  const auto one = simultaneous_run(d, base, {1.0, 1.5}, {0.2, 0.16}, {2, 3}, load, {}, VolumeConvention::all_simplices, 2);
  REQUIRE(one.rows.size() == 2);
  CHECK(one.rows[0].m == 2);
  CHECK(one.rows[1].lambda_series.size() == 9);
  CHECK(one.rows[1].h == doctest::Approx(std::pow(0.16, 1.5)));
}
