// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "eigenfracture/minimizer.hpp"

namespace ef {

/// Dyadic grid t_i = i / 2^m, i = 0..2^m.
class TimeGrid {
 public:
  explicit TimeGrid(int m);

  int level() const { return m_; }
  std::size_t size() const { return (std::size_t{1} << m_) + 1; }
  double node(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(size() - 1); }
  double spacing() const { return 1.0 / static_cast<double>(size() - 1); }
  std::vector<double> nodes() const;
  /// True if every node of this grid is a node of `finer`.
  bool nested_in(const TimeGrid& finer) const { return finer.m_ >= m_; }

 private:
  int m_;
};

struct NodeRecord {
  std::size_t index = 0;
  double t = 0.0;
  EnergyBreakdown energy;
  double work_increment = 0.0;  // over [t_i, t_{i+1}]; 0 at the last node
  double cumulative_work = 0.0;  // over [0, t_i]
  double balance_defect = 0.0;  // |E(t_i) - E(0) - cumulative_work|
  bool rupture = false;
  StepTrace trace;
  CrackSet crack;
  std::optional<StepResult> state;  // kept when EvolveOptions::keep_states
};

struct EvolutionTrajectory {
  Problem problem;
  BoundaryLoad load;
  TimeGrid grid{0};
  std::vector<NodeRecord> nodes;
  std::optional<std::size_t> rupture_node;

  std::optional<double> rupture_time() const;
  double max_balance_defect() const;
};

struct EvolveOptions {
  bool keep_states = true;
  /// Nodes whose state is kept even when keep_states is off.
  std::vector<double> keep_at;
  /// Called after every node with the full step state.
  std::function<void(const NodeRecord&, const StepResult&)> on_node;
};

/// A failed step; carries the nodes completed so far and the original cause.
class EvolutionAborted : public std::runtime_error {
 public:
  EvolutionAborted(const std::string& what, EvolutionTrajectory partial, std::exception_ptr cause)
      : std::runtime_error(what), partial_(std::move(partial)), cause_(std::move(cause)) {}
  const EvolutionTrajectory& partial() const { return partial_; }
  const std::exception_ptr& cause() const { return cause_; }

 private:
  EvolutionTrajectory partial_;
  std::exception_ptr cause_;
};

/// Runs the incremental scheme over the grid: the first node from an empty
/// precrack, every later node from the accumulated crack of the previous one.
EvolutionTrajectory evolve(const Problem& problem, const BoundaryLoad& load, const TimeGrid& grid,
                           const MinimizeStrategy& strategy, const EvolveOptions& options = {});

/// int_{t_i}^{t_{i+1}} ||d_t grad g_h(s)||_{L2(body)} ds for every interval,
/// by 4-point Gauss-Legendre quadrature.
std::vector<double> interval_rate_integrals(const TriangulationMesh& mesh, const BoundaryLoad& load,
                                            const TimeGrid& grid);
/// Largest entry of interval_rate_integrals.
double e_of_m(const TriangulationMesh& mesh, const BoundaryLoad& load, const TimeGrid& grid);

struct EstimateReport {
  double e_m = 0.0;
  double lambda_max = 0.0;  // largest eigenvalue of C weighting the quadratic term
  std::size_t pairs_checked = 0;
  std::size_t violations = 0;
  double max_violation = 0.0;  // max of lhs - rhs over pairs (negative when slack)
  std::size_t worst_first = 0, worst_second = 0;
  bool ok() const { return violations == 0; }
};

/// Checks E(t_j) <= E(t_i) + sum of work increments + lambda_max * e(m) *
/// int_{t_i}^{t_j} ||d_t grad g_h|| + slack for every node pair i <= j.
EstimateReport verify_discrete_estimate(const EvolutionTrajectory& traj, double slack = 1e-9);

/// Max over nodes of |E(t) - E(0) - cumulative work(t)|.
double verify_energy_balance(const EvolutionTrajectory& traj);

struct InvariantReport {
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

/// Irreversibility, lambda monotonicity and, for kept states, the checks of
/// check_state_invariants.
InvariantReport check_trajectory_invariants(const EvolutionTrajectory& traj);

/// gamma = grad u on the crack and 0 elsewhere, bitwise, and the surface
/// proxy against a from-scratch neighborhood volume to 1e-12 relative.
InvariantReport check_state_invariants(const Problem& problem, const StepResult& state, std::size_t node = 0);

struct SimultaneousRow {
  double eps = 0.0;
  double h = 0.0;
  int m = 0;
  std::optional<double> rupture_time;
  double final_lambda = 0.0;
  std::vector<double> lambda_series;
};

struct SimultaneousResult {
  std::vector<EvolutionTrajectory> runs;
  std::vector<SimultaneousRow> rows;
};

/// One evolution per schedule entry at (eps_n, h(eps_n), m_n); entries run
/// concurrently up to `threads` at a time.  Throws std::invalid_argument on
/// empty or mismatched schedules and non-positive entries.
SimultaneousResult simultaneous_run(const DomainSpec& domain, const EnergyParams& base,
                                    const ResolutionCoupling& coupling, const std::vector<double>& eps_schedule,
                                    const std::vector<int>& grid_schedule,
                                    const BoundaryLoad& load, const MinimizeStrategy& strategy,
                                    VolumeConvention conv = VolumeConvention::all_simplices, int threads = 1,
                                    const EvolveOptions& options = {false, {}, {}});

}  // namespace ef
