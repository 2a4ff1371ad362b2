// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/evolution.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <thread>

#include "eigenfracture/error.hpp"

namespace ef {

TimeGrid::TimeGrid(int m) : m_(m) {
  if (m < 0 || m > 20) throw std::invalid_argument("time grid level must lie in [0, 20]");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
  return out;
}

std::optional<double> EvolutionTrajectory::rupture_time() const {
  if (!rupture_node) return std::nullopt;
  return nodes[*rupture_node].t;
}

double EvolutionTrajectory::max_balance_defect() const {
  double m = 0.0;
  for (const auto& n : nodes) m = std::max(m, n.balance_defect);
  return m;
}

EvolutionTrajectory evolve(const Problem& problem, const BoundaryLoad& load, const TimeGrid& grid,
                           const MinimizeStrategy& strategy, const EvolveOptions& options) {
  const auto& mesh = *problem.mesh;
  EvolutionTrajectory traj{problem, load, grid, {}, std::nullopt};
  traj.nodes.reserve(grid.size());

  CrackSet crack = problem.empty_crack();
  NeighborhoodLedger ledger = problem.ledger_for(crack);
  NucleationCache cache;
  std::optional<StepResult> prev;
  double prev_t = 0.0;
  bool ruptured = false;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid.node(i);
    StepResult r;
    try {
      const PreviousNode pn = prev ? PreviousNode{&*prev, prev_t} : PreviousNode{};
      r = minimize_step(problem, crack, ledger, load, t, strategy, pn, &cache);
    } catch (const std::exception& e) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "step %zu (t = %.6g) failed: ", i, t);
      throw EvolutionAborted(buf + std::string(e.what()), std::move(traj), std::current_exception());
    }

    NodeRecord rec;
    rec.index = i;
    rec.t = t;
    rec.energy = r.energy;
    rec.trace = r.trace;
    rec.crack = r.crack;
    if (!ruptured && !(r.crack == crack)) ruptured = separates_collar(mesh, r.crack);
    rec.rupture = ruptured;
    if (ruptured && !traj.rupture_node) traj.rupture_node = i;
    if (prev) {
      auto& last = traj.nodes.back();
      last.work_increment = work_increment(mesh, prev->u, prev->gamma, load, prev_t, t, problem.params.c);
      rec.cumulative_work = last.cumulative_work + last.work_increment;
    }
    const double e0 = traj.nodes.empty() ? r.energy.total : traj.nodes.front().energy.total;
    rec.balance_defect = std::abs(r.energy.total - e0 - rec.cumulative_work);

    if (options.on_node) options.on_node(rec, r);
    crack = r.crack;
    ledger = std::move(*r.ledger);
    r.ledger.reset();
    if (options.keep_states || std::find(options.keep_at.begin(), options.keep_at.end(), t) != options.keep_at.end())
      rec.state = r;
    traj.nodes.push_back(std::move(rec));
    prev = std::move(r);
    prev_t = t;
  }
  return traj;
}

namespace {

double rate_norm(const TriangulationMesh& mesh, const BoundaryLoad& load, double t) {
  const auto rate = interpolate_rate(load, mesh, t);
  double sum = 0.0;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior) continue;
    const Vec2 g = mesh.gradient(s, rate);
    sum += mesh.area(s) * dot(g, g);
  }
  return std::sqrt(sum);
}

}  // namespace

std::vector<double> interval_rate_integrals(const TriangulationMesh& mesh, const BoundaryLoad& load,
                                            const TimeGrid& grid) {
  static constexpr std::array<double, 4> kNodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                0.8611363115940526};
  static constexpr std::array<double, 4> kWeights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                  0.3478548451374538};
  std::vector<double> out(grid.size() - 1);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double a = grid.node(i), b = grid.node(i + 1);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int q = 0; q < 4; ++q) acc += kWeights[q] * rate_norm(mesh, load, mid + half * kNodes[q]);
    out[i] = half * acc;
  }
  return out;
}

double e_of_m(const TriangulationMesh& mesh, const BoundaryLoad& load, const TimeGrid& grid) {
  const auto r = interval_rate_integrals(mesh, load, grid);
  return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
}

EstimateReport verify_discrete_estimate(const EvolutionTrajectory& traj, double slack) {
  EstimateReport rep;
  const auto& mesh = *traj.problem.mesh;
  const auto rates = interval_rate_integrals(mesh, traj.load, traj.grid);
  rep.e_m = rates.empty() ? 0.0 : *std::max_element(rates.begin(), rates.end());
  rep.lambda_max = traj.problem.params.c.max_eigenvalue();
  const std::size_t n = traj.nodes.size();
  std::vector<double> rate_prefix(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) rate_prefix[i] = rate_prefix[i - 1] + rates[i - 1];
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double work = traj.nodes[j].cumulative_work - traj.nodes[i].cumulative_work;
      const double rhs = traj.nodes[i].energy.total + work +
                         rep.lambda_max * rep.e_m * (rate_prefix[j] - rate_prefix[i]) + slack;
      const double excess = traj.nodes[j].energy.total - rhs;
      ++rep.pairs_checked;
      if (excess > 0.0) ++rep.violations;
      if (excess > rep.max_violation) {
        rep.max_violation = excess;
        rep.worst_first = i;
        rep.worst_second = j;
      }
    }
  }
  if (n == 0) rep.max_violation = 0.0;
  return rep;
}

double verify_energy_balance(const EvolutionTrajectory& traj) { return traj.max_balance_defect(); }

InvariantReport check_trajectory_invariants(const EvolutionTrajectory& traj) {
  InvariantReport rep;
  const auto& problem = traj.problem;
  auto fail = [&](std::size_t i, const char* what) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "node %zu: %s", i, what);
    rep.failures.emplace_back(buf);
  };
  for (std::size_t i = 0; i < traj.nodes.size(); ++i) {
    const auto& node = traj.nodes[i];
    if (i > 0) {
      const auto& before = traj.nodes[i - 1];
      if (!before.crack.subset_of(node.crack)) fail(i, "crack set shrank");
      if (node.energy.lambda < before.energy.lambda - 1e-12 * std::max(1.0, before.energy.lambda))
        fail(i, "lambda decreased");
    }
    if (!node.state) continue;
    if (!(node.state->crack == node.crack)) fail(i, "stored crack differs from the record");
    auto sub = check_state_invariants(problem, *node.state, i);
    for (auto& f : sub.failures) rep.failures.push_back(std::move(f));
  }
  return rep;
}

InvariantReport check_state_invariants(const Problem& problem, const StepResult& st, std::size_t node) {
  InvariantReport rep;
  const auto& mesh = *problem.mesh;
  auto fail = [&](const char* what) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "node %zu: %s", node, what);
    rep.failures.emplace_back(buf);
  };
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    const Vec2 want = st.crack.contains(s) ? mesh.gradient(s, st.u.values) : Vec2{};
    if (st.gamma.values[s].x != want.x || st.gamma.values[s].y != want.y) {
      fail("eigenstrain differs from grad u on the crack");
      break;
    }
  }
  const auto cover = discrete_neighborhood(*problem.index, st.crack, problem.params.eps);
  const double vol = neighborhood_volume(mesh, cover, problem.convention);
  const double ledger_vol = st.ledger ? st.ledger->volume() : st.energy.lambda * 2.0 * problem.params.eps;
  if (std::abs(vol - ledger_vol) > 1e-12 * vol) fail("ledger volume disagrees with recomputation");
  return rep;
}

SimultaneousResult simultaneous_run(const DomainSpec& domain, const EnergyParams& base,
                                    const ResolutionCoupling& coupling, const std::vector<double>& eps_schedule,
                                    const std::vector<int>& grid_schedule, const BoundaryLoad& load,
                                    const MinimizeStrategy& strategy, VolumeConvention conv, int threads,
                                    const EvolveOptions& options) {
  if (eps_schedule.empty()) throw std::invalid_argument("simultaneous_run: empty schedule");
  if (eps_schedule.size() != grid_schedule.size())
    throw std::invalid_argument("simultaneous_run: eps and grid schedules differ in length");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k)
    if (!(eps_schedule[k] > 0.0) || grid_schedule[k] < 0)
      throw std::invalid_argument("simultaneous_run: schedule entries must be positive");

  const std::size_t n = eps_schedule.size();
  std::vector<std::optional<EvolutionTrajectory>> runs(n);
  std::vector<std::exception_ptr> errors(n);
  auto run_one = [&](std::size_t k) {
    try {
      EnergyParams p = base;
      p.eps = eps_schedule[k];
      const double h = couple_resolution(p.eps, coupling);
      const Problem problem = Problem::build(domain, h, p, conv);
      runs[k] = evolve(problem, load, TimeGrid(grid_schedule[k]), strategy, options);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), 1, n);
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) run_one(k);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < n; k += workers) run_one(k);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SimultaneousResult out;
  for (std::size_t k = 0; k < n; ++k) {
    auto& traj = *runs[k];
    SimultaneousRow row;
    row.eps = eps_schedule[k];
    row.h = traj.problem.mesh->nominal_h();
    row.m = grid_schedule[k];
    row.rupture_time = traj.rupture_time();
    for (const auto& node : traj.nodes) row.lambda_series.push_back(node.energy.lambda);
    row.final_lambda = row.lambda_series.empty() ? 0.0 : row.lambda_series.back();
    out.rows.push_back(std::move(row));
    out.runs.push_back(std::move(traj));
  }
  return out;
}

}  // namespace ef
