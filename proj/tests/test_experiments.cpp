// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eigenfracture/experiments.hpp"

using namespace ef;

TEST_CASE("tube study rows") {
  TubeStudyConfig cfg;
  cfg.eps = {0.1, 0.08};
  const auto rep = tube_convergence_study(cfg);
  REQUIRE(rep.rows.size() == 2);
  for (const auto& r : rep.rows) {
    CHECK(r.reference == doctest::Approx(0.5 + std::numbers::pi * r.eps / 2));
    CHECK(r.lambda >= r.reference);
    CHECK(r.h == doctest::Approx(std::pow(r.eps, 1.5)));
  }
  cfg.eps = {0.05, 0.08};
  CHECK_THROWS_AS(tube_convergence_study(cfg), std::invalid_argument);
  cfg.eps = {0.08};
  cfg.b = {1.5, 0.5};
  CHECK_THROWS_AS(tube_convergence_study(cfg), std::invalid_argument);
}

TEST_CASE("segment crack picks the simplices crossing the segment") {
  const auto mesh = build_structured_mesh(DomainSpec{}, 0.1, 0.2);
  const auto crack = segment_crack(mesh, {0.25, 0.55}, {0.75, 0.55});
  CHECK(!crack.empty());
  for (int s : crack.ids()) {
    const Vec2 c = mesh.centroid(s);
    CHECK(std::abs(c.y - 0.55) < 0.1);
    CHECK(mesh.label(s) == Region::interior);
  }
}

TEST_CASE("bar study with a high toughness stays intact") {
  BarStudyConfig cfg;
  cfg.eps = {0.2, 0.16};
  cfg.kappa = 4.0;
  cfg.m = 3;
  cfg.goodset_times = {0.5};
  const auto res = bar_rupture_study(cfg);
  for (const auto& r : res.report.rows) {
    CHECK(r.censored);
    CHECK(r.reference == 1.0);
  }
  REQUIRE(res.goodset.size() == 2);
  for (const auto& g : res.goodset) {
    CHECK_FALSE(g.post_rupture);
    CHECK(g.l1_difference < 1e-8);
  }
  cfg.goodset_times = {0.3};
  CHECK_THROWS_AS(bar_rupture_study(cfg), std::invalid_argument);
}

TEST_CASE("growth study rows respect the bound with C = 1") {
  GrowthStudyConfig cfg;
  cfg.clouds = 10;
  const auto rows = growth_study(cfg);
  CHECK(rows.size() == 20);
  for (const auto& r : rows) {
    CHECK(r.check.vol_grown >= r.check.vol_r);
    CHECK(r.points >= 1);
  }
  const double c = calibrate_growth_constant(cfg);
  CHECK(c > 0.5);
  CHECK(c <= 1.0 + 1e-3);
  const auto again = growth_study(cfg);
  CHECK(again.front().check.ratio == rows.front().check.ratio);
}
