// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "eigenfracture/error.hpp"
#include "eigenfracture/minimizer.hpp"
#include "support.hpp"

using namespace ef;

namespace {

Problem micro(double eps, double kappa) {
  DomainSpec d;
  d.omega = {0.0, 0.0, 1.0, 0.2};
  d.collar_width = 0.2;
  return Problem::build(d, 0.2, EnergyParams{eps, kappa, Stiffness{}});
}

Problem small_bar(double eps) { return Problem::build(DomainSpec{}, 0.1, EnergyParams{eps, 1.0, Stiffness{}}); }

}  // namespace

TEST_CASE("problem validation") {
  const DomainSpec d;
  CHECK_THROWS_AS(Problem::build(d, 0.1, EnergyParams{0.0, 1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(Problem::build(d, 0.1, EnergyParams{0.1, -1.0, {}}), std::invalid_argument);
  CHECK_THROWS_AS(Problem::build(d, 0.1, EnergyParams{0.1, 1.0, {1, 3, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Problem::build(d, 0.1, 0.15, EnergyParams{0.1, 1.0, {}}), std::invalid_argument);
  CHECK(parse_strategy(to_string(StrategyVariant::greedy)) == StrategyVariant::greedy);
  CHECK_THROWS_AS(parse_strategy("annealing"), std::invalid_argument);
}

TEST_CASE("exhaustive minimum matches direct enumeration") {
  const auto p = micro(0.15, 0.1);
  const auto load = BoundaryLoad::stretch(3.0);
  const auto interior = eftest::interior_simplices(*p.mesh);
  REQUIRE(interior.size() == 10);
  double best = 1e300;
  for (unsigned mask = 0; mask < (1u << interior.size()); ++mask) {
    CrackSet c = p.empty_crack();
    for (std::size_t k = 0; k < interior.size(); ++k)
      if (mask >> k & 1u) c.insert(interior[k]);
    const auto st = solve_state(p, c, p.ledger_for(c), load, 0.75, nullptr, nullptr);
    best = std::min(best, st.total());
  }
  const auto ex = exhaustive_minimize(p, p.empty_crack(), load, 0.75);
  CHECK(ex.energy.total == doctest::Approx(best).epsilon(1e-12));
  CHECK(ex.energy.total <= ex.trace.do_nothing_energy);
  CHECK_THROWS_AS(exhaustive_minimize(p, p.empty_crack(), load, 0.75, 9), std::invalid_argument);
}

TEST_CASE("greedy pass stops at a fixed point of the acceptance inequality") {
  const auto p = small_bar(0.1);
  const auto load = BoundaryLoad::stretch(3.0);
  MinimizeStrategy strat;
  strat.full_sweep = true;
  // Column 5 broken except for two simplices: closing it costs little surface.
  CrackSet col = p.empty_crack();
  std::vector<int> colids;
  for (int s : eftest::interior_simplices(*p.mesh))
    if (p.mesh->cell_col(s) == p.mesh->cells_x() / 2) colids.push_back(s);
  for (std::size_t k = 0; k < colids.size(); ++k)
    if (k != 7 && k != 12) col.insert(colids[k]);
  auto st = solve_state(p, col, p.ledger_for(col), load, 1.0, nullptr, nullptr);
  const auto all = greedy_candidates(p, st.crack, st.u, strat);
  CHECK(all.size() == eftest::interior_simplices(*p.mesh).size() - col.size());
  const double before = st.total();
  const auto accepted = greedy_flip_pass(st, strat, all);
  CHECK(!accepted.empty());
  int passes = 1;
  while (!greedy_flip_pass(st, strat, all).empty()) ++passes;
  CHECK(passes < 100);
  double frozen = 0.0;
  for (int s : eftest::interior_simplices(*p.mesh))
    if (!st.crack.contains(s)) frozen += p.mesh->area(s) * p.params.c.q(p.mesh->gradient(s, st.u.values));
  const double after = frozen + surface_energy(st.ledger.volume(), p.params);
  CHECK(after < before);
  const double k2 = p.params.kappa / (2 * p.params.eps);
  for (int s : all) {
    if (st.crack.contains(s)) continue;
    const double release = p.mesh->area(s) * p.params.c.q(p.mesh->gradient(s, st.u.values));
    CHECK(release <= k2 * st.ledger.preview(s) + strat.tie_tol);
  }
}

TEST_CASE("cut bound never exceeds the covered area of the cut") {
  const auto p = small_bar(0.12);
  std::mt19937_64 rng(6);
  CrackSet c = p.empty_crack();
  c.insert_all(eftest::random_interior_set(*p.mesh, 8, rng));
  const auto ledger = p.ledger_for(c);
  const auto family = nucleation_cut_family(p, c, MinimizeStrategy{});
  CHECK(family.size() == static_cast<std::size_t>(2 * 10));
  for (const auto& cut : family) {
    const double bound = cut_volume_bound(p, ledger, cut.region);
    CHECK(bound <= ledger.preview(cut.simplices) * (1 + 1e-12) + 1e-15);
  }
}

TEST_CASE("minimize step contracts") {
  const auto p = small_bar(0.1);
  const MinimizeStrategy strat;
  const auto empty = p.empty_crack();
  const auto zero = minimize_step(p, empty, p.ledger_for(empty), BoundaryLoad::zero(), 1.0, strat);
  CHECK(zero.crack.empty());
  CHECK(zero.energy.total == 0.0);

  const auto load = BoundaryLoad::stretch(3.0);
  const auto r = minimize_step(p, empty, p.ledger_for(empty), load, 1.0, strat);
  CHECK(r.energy.total <= r.trace.do_nothing_energy);
  REQUIRE(r.ledger);
  CHECK(r.ledger->broken() == r.crack);
  for (int s = 0; s < static_cast<int>(p.mesh->num_simplices()); ++s) {
    const Vec2 g = r.gamma.values[s];
    const Vec2 du = r.crack.contains(s) ? p.mesh->gradient(s, r.u.values) : Vec2{};
    CHECK(g.x == du.x);
    CHECK(g.y == du.y);
  }
  CHECK(separates_collar(*p.mesh, r.crack));

  CrackSet other = p.empty_crack();
  other.insert(eftest::interior_simplices(*p.mesh).front());
  CHECK_THROWS_AS(minimize_step(p, other, p.ledger_for(empty), load, 1.0, strat), ContractError);
}

TEST_CASE("precrack is kept") {
  const auto p = small_bar(0.1);
  std::mt19937_64 rng(13);
  CrackSet pre = p.empty_crack();
  pre.insert_all(eftest::random_interior_set(*p.mesh, 3, rng));
  const auto r = minimize_step(p, pre, p.ledger_for(pre), BoundaryLoad::stretch(0.1), 0.5, MinimizeStrategy{});
  CHECK(pre.subset_of(r.crack));
}
