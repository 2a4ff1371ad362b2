// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace ef {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void check_decreasing(const std::vector<double>& eps, const char* who) {
  if (eps.empty()) throw std::invalid_argument(std::string(who) + ": empty eps list");
  for (std::size_t k = 0; k < eps.size(); ++k) {
    if (!(eps[k] > 0.0)) throw std::invalid_argument(std::string(who) + ": eps must be positive");
    if (k > 0 && !(eps[k] < eps[k - 1]))
      throw std::invalid_argument(std::string(who) + ": eps list must be strictly decreasing");
  }
}

}  // namespace

CrackSet segment_crack(const TriangulationMesh& mesh, Vec2 a, Vec2 b) {
  CrackSet crack(mesh.num_simplices());
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s)
    if (mesh.label(s) == Region::interior && triangle_meets_segment(mesh.triangle(s), a, b)) crack.insert(s);
  return crack;
}

StudyReport tube_convergence_study(const TubeStudyConfig& cfg) {
  check_decreasing(cfg.eps, "tube study");
  cfg.domain.validate();
  if (!cfg.domain.omega.contains(cfg.a) || !cfg.domain.omega.contains(cfg.b))
    throw std::invalid_argument("tube study: segment leaves the body");
  const double len = std::hypot(cfg.b.x - cfg.a.x, cfg.b.y - cfg.a.y);

  StudyReport rep;
  rep.study_id = "tube";
  for (double eps : cfg.eps) {
    const auto t0 = std::chrono::steady_clock::now();
    const double h = couple_resolution(eps, cfg.coupling);
    const TriangulationMesh mesh = build_structured_mesh(cfg.domain, h, eps + h);
    const SpatialIndex index(mesh, eps);
    const CrackSet crack = segment_crack(mesh, cfg.a, cfg.b);
    NeighborhoodLedger ledger(index, eps, cfg.convention);
    for (int s : crack.ids()) ledger.add(s);

    StudyRow row;
    row.eps = eps;
    row.h = h;
    row.lambda = ledger.volume() / (2.0 * eps);
    row.reference = tube_volume_exact(cfg.a, cfg.b, eps) / (2.0 * eps);
    row.rel_error = std::abs(row.lambda - row.reference) / (len > 0.0 ? len : row.reference);
    row.length = len;
    row.rel_error_length = len > 0.0 ? std::abs(row.lambda - len) / len : row.lambda;
    row.runtime_s = seconds_since(t0);
    rep.rows.push_back(row);
  }
  return rep;
}

BarStudyResult bar_rupture_study(const BarStudyConfig& cfg) {
  check_decreasing(cfg.eps, "bar study");
  if (!(cfg.kappa > 0.0) || !(cfg.t_max > 0.0))
    throw std::invalid_argument("bar study: kappa and t_max must be positive");
  const auto t0 = std::chrono::steady_clock::now();
  EnergyParams base;
  base.kappa = cfg.kappa;
  const std::vector<int> grids(cfg.eps.size(), cfg.m);
  const TimeGrid grid(cfg.m);
  EvolveOptions opt;
  opt.keep_states = false;
  for (double t : cfg.goodset_times) {
    const double snapped = std::round(t / grid.spacing()) * grid.spacing();
    if (snapped != t || t < 0.0 || t > 1.0) throw std::invalid_argument("bar study: good-set time is not a grid node");
    opt.keep_at.push_back(t);
  }
  auto family = simultaneous_run(DomainSpec{}, base, cfg.coupling, cfg.eps, grids, BoundaryLoad::stretch(cfg.t_max),
                                 cfg.strategy, cfg.convention, cfg.threads, opt);
  const double total = seconds_since(t0);

  BarStudyResult out;
  out.report.study_id = "bar";
  const double ref = std::sqrt(cfg.kappa) / cfg.t_max;
  for (const auto& srow : family.rows) {
    StudyRow row;
    row.eps = srow.eps;
    row.h = srow.h;
    row.m = srow.m;
    row.lambda = srow.final_lambda;
    row.reference = ref;
    row.rupture_time = srow.rupture_time;
    row.censored = !srow.rupture_time;
    row.rel_error = srow.rupture_time ? std::abs(*srow.rupture_time - ref) / ref : 0.0;
    row.runtime_s = total / static_cast<double>(family.rows.size());
    out.report.rows.push_back(row);
  }
  out.runs = std::move(family.runs);
  if (!cfg.goodset_times.empty()) out.goodset = goodset_convergence_check(out.runs, cfg.goodset_times);
  return out;
}

std::vector<GoodSetRow> goodset_convergence_check(const std::vector<EvolutionTrajectory>& runs,
                                                  const std::vector<double>& times) {
  std::vector<GoodSetRow> out;
  for (const auto& traj : runs) {
    const auto& mesh = *traj.problem.mesh;
    const double eps = traj.problem.params.eps;
    const Rect& omega = mesh.domain().omega;
    for (double t : times) {
      const auto it = std::find_if(traj.nodes.begin(), traj.nodes.end(),
                                   [&](const NodeRecord& n) { return n.t == t; });
      if (it == traj.nodes.end()) throw std::invalid_argument("goodset check: time is not a grid node");
      if (!it->state) throw std::invalid_argument("goodset check: run kept no states");
      const auto& u = it->state->u.values;

      const auto good = good_set(*traj.problem.index, it->crack, eps);
      std::vector<std::uint8_t> in_good(mesh.num_simplices(), 0);
      for (int s : good) in_good[s] = 1;

      double crack_x = 0.0;
      for (int s : it->crack.ids()) crack_x += mesh.centroid(s).x;
      if (!it->crack.empty()) crack_x /= static_cast<double>(it->crack.size());
      const double left = traj.load.value(t, {omega.x0, 0.0});
      const double right = traj.load.value(t, {omega.x1, 0.0});

      GoodSetRow row;
      row.eps = eps;
      row.t = t;
      row.post_rupture = it->rupture;
      const int ns = static_cast<int>(mesh.num_simplices());
      for (int s = 0; s < ns; ++s) {
        if (mesh.label(s) != Region::interior) continue;
        if (!in_good[s]) {
          row.excluded_area += mesh.area(s);
          continue;
        }
        row.good_area += mesh.area(s);
        const auto& tri = mesh.simplex(s);
        const bool left_side = mesh.centroid(s).x < crack_x;
        double acc = 0.0;
        for (int v : tri) {
          const Vec2 x = mesh.vertex(v);
          const double limit = row.post_rupture ? (left_side ? left : right) : traj.load.value(t, x);
          acc += std::abs(u[v] - limit);
        }
        row.l1_difference += mesh.area(s) * acc / 3.0;
      }
      out.push_back(row);
    }
  }
  return out;
}

std::vector<GrowthRow> growth_study(const GrowthStudyConfig& cfg) {
  if (cfg.clouds < 0 || cfg.max_points < 1) throw std::invalid_argument("growth study: bad cloud parameters");
  std::vector<GrowthRow> out;
  for (int c = 0; c < cfg.clouds; ++c) {
    const std::uint64_t seed = cfg.seed * 1000003ULL + static_cast<std::uint64_t>(c);
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> count(1, cfg.max_points);
    std::uniform_real_distribution<double> coord(0.0, cfg.spread);
    std::vector<Vec2> pts(static_cast<std::size_t>(count(rng)));
    for (auto& p : pts) p = {coord(rng), coord(rng)};
    for (const auto& [r, rp] : cfg.radii) {
      GrowthRow row;
      row.seed = seed;
      row.points = pts.size();
      row.check = neighborhood_growth_check(pts, r, rp, cfg.constant);
      out.push_back(row);
    }
  }
  return out;
}

double calibrate_growth_constant(const GrowthStudyConfig& held_out) {
  double c = 0.0;
  for (const auto& row : growth_study(held_out)) {
    const double s = (row.check.r + row.check.r_prime) / row.check.r;
    c = std::max(c, row.check.ratio / (s * s));
  }
  return c;
}

}  // namespace ef
