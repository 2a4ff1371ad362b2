// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "eigenfracture/energy.hpp"
#include "eigenfracture/fem.hpp"
#include "eigenfracture/geometry.hpp"
#include "eigenfracture/mesh.hpp"

namespace ef {

/// Immutable discretization shared by every step of a run: mesh, distance
/// index, dof layout and energy parameters.
struct Problem {
  std::shared_ptr<const TriangulationMesh> mesh;
  std::shared_ptr<const SpatialIndex> index;
  std::shared_ptr<const FemContext> fem;
  EnergyParams params;
  VolumeConvention convention = VolumeConvention::all_simplices;

  /// Meshes `domain` at cell size h with a pad of eps + h around the
  /// reference configuration, so every simplex within eps of it exists.
  static Problem build(const DomainSpec& domain, double h, const EnergyParams& params,
                       VolumeConvention conv = VolumeConvention::all_simplices);
  /// Same with an explicit pad; throws std::invalid_argument if pad < eps + h.
  static Problem build(const DomainSpec& domain, double h, double pad, const EnergyParams& params,
                       VolumeConvention conv = VolumeConvention::all_simplices);

  NeighborhoodLedger ledger_for(const CrackSet& crack) const;
  CrackSet empty_crack() const { return CrackSet(mesh->num_simplices()); }
};

enum class StrategyVariant { greedy, greedy_nucleation, exhaustive };

StrategyVariant parse_strategy(const std::string& name);
std::string to_string(StrategyVariant v);

struct MinimizeStrategy {
  StrategyVariant variant = StrategyVariant::greedy_nucleation;
  int sweep_limit = 200;
  bool full_sweep = false;
  int exhaustive_cap = 16;
  int top_k = 32;
  double tie_tol = 1e-12;
  int threads = 1;
  bool nucleation_vertical = true;
  bool nucleation_horizontal = true;
};

struct StepTrace {
  int sweeps = 0;
  int flips_accepted = 0;
  int cuts_tried = 0;
  int cuts_accepted = 0;
  int solves = 0;
  int pruned = 0;  // broken simplices dropped for zero gradient
  double do_nothing_energy = 0.0;
  std::optional<double> translation_energy;
};

struct StepResult {
  DisplacementField u;
  EigenField gamma;
  CrackSet crack;
  EnergyBreakdown energy;
  StepTrace trace;
  std::optional<NeighborhoodLedger> ledger;  // holds exactly `crack`
};

/// A straight cut through the body: the interior simplices of one grid
/// column or row not yet broken, and the rectangle they tile.
struct NucleationCut {
  std::vector<int> simplices;
  Rect region;
};

/// Cut family and surface lower bounds, reused while the crack is unchanged.
struct NucleationCache {
  CrackSet key;
  std::vector<NucleationCut> family;
  std::vector<double> bounds;
};

/// Previous node handed to a step for warm starts, floating means and the
/// translation competitor (u_prev + g_h(t) - g_h(t_prev), gamma_prev).
struct PreviousNode {
  const StepResult* state = nullptr;
  double t = 0.0;
};

/// Incremental minimization of the augmented energy at time t with the
/// accumulated crack `precrack` (its ledger passed alongside).  The result
/// never exceeds the energy of keeping the crack and re-solving u, every
/// accepted move strictly lowers the energy, and gamma = grad u on the
/// returned crack.
StepResult minimize_step(const Problem& problem, const CrackSet& precrack,
                         const NeighborhoodLedger& precrack_ledger, const BoundaryLoad& load, double t,
                         const MinimizeStrategy& strategy, PreviousNode prev = {},
                         NucleationCache* cache = nullptr);

/// Candidate simplices for a greedy sweep: interior simplices not in the
/// crack that share an edge with the crack or the body boundary, plus the
/// `top_k` largest frozen-u releases (all interior simplices if full).
std::vector<int> greedy_candidates(const Problem& problem, const CrackSet& crack,
                                   const DisplacementField& u, const MinimizeStrategy& strategy);

/// Working state of one step (exposed for the greedy and nucleation tests).
struct StepState {
  CrackSet crack;
  NeighborhoodLedger ledger;
  DisplacementField u;
  double elastic = 0.0;
  double total() const;
  const Problem* problem = nullptr;
};

/// One pass of frozen-u flips: break T iff area*Q(grad u) > surface
/// increment + tie_tol, with the ledger preview refreshed after each
/// acceptance.  Returns the accepted simplices (u is not re-solved).
std::vector<int> greedy_flip_pass(StepState& state, const MinimizeStrategy& strategy,
                                  const std::vector<int>& candidates);

/// Column and row cuts of the structured grid inside the body.
std::vector<NucleationCut> nucleation_cut_family(const Problem& problem, const CrackSet& crack,
                                                 const MinimizeStrategy& strategy);

/// Lower bound on the area newly covered by breaking every simplex in
/// `region`: uncovered simplices within eps of the rectangle.
double cut_volume_bound(const Problem& problem, const NeighborhoodLedger& ledger, const Rect& region);

/// Tries the cuts of the family in order of their surface lower bound,
/// re-solving u for each until the bound alone exceeds the best total, and
/// applies the best strictly improving one.  Returns the applied cut
/// (empty if none).
std::vector<int> nucleation_cuts(StepState& state, const BoundaryLoad& load, double t,
                                 const MinimizeStrategy& strategy, const DisplacementField* prev,
                                 int* tried = nullptr, NucleationCache* cache = nullptr);

/// Exact minimum over all supersets of the precrack among interior
/// simplices.  Throws std::invalid_argument when the candidate count
/// exceeds `cap`.  Ties go to the smaller set, then lexicographic order.
StepResult exhaustive_minimize(const Problem& problem, const CrackSet& precrack, const BoundaryLoad& load,
                               double t, int cap = 16, const DisplacementField* prev = nullptr);

/// Solves u for a fixed crack and evaluates the augmented energy state.
StepState solve_state(const Problem& problem, CrackSet crack, NeighborhoodLedger ledger,
                      const BoundaryLoad& load, double t, const DisplacementField* prev,
                      const DisplacementField* guess);

}  // namespace ef
