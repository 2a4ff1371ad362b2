// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <thread>

#include "eigenfracture/error.hpp"

namespace ef {

Problem Problem::build(const DomainSpec& domain, double h, const EnergyParams& params,
                       VolumeConvention conv) {
  return build(domain, h, params.eps + h, params, conv);
}

Problem Problem::build(const DomainSpec& domain, double h, double pad, const EnergyParams& params,
                       VolumeConvention conv) {
  if (!(params.eps > 0.0)) throw std::invalid_argument("problem: eps must be positive");
  if (!(params.kappa > 0.0)) throw std::invalid_argument("problem: kappa must be positive");
  if (!params.c.spd()) throw std::invalid_argument("problem: stiffness tensor must be SPD");
  if (pad < params.eps + h) throw std::invalid_argument("problem: pad must be at least eps + h");
  Problem p;
  auto mesh = std::make_shared<TriangulationMesh>(build_structured_mesh(domain, h, pad));
  p.mesh = mesh;
  p.index = std::make_shared<SpatialIndex>(*mesh, params.eps);
  p.fem = std::make_shared<FemContext>(*mesh);
  p.params = params;
  p.convention = conv;
  return p;
}

NeighborhoodLedger Problem::ledger_for(const CrackSet& crack) const {
  NeighborhoodLedger ledger(*index, params.eps, convention);
  for (int s : crack.ids()) ledger.add(s);
  return ledger;
}

StrategyVariant parse_strategy(const std::string& name) {
  if (name == "greedy") return StrategyVariant::greedy;
  if (name == "greedy+nucleation") return StrategyVariant::greedy_nucleation;
  if (name == "exhaustive") return StrategyVariant::exhaustive;
  throw std::invalid_argument("unknown strategy '" + name + "'");
}

std::string to_string(StrategyVariant v) {
  switch (v) {
    case StrategyVariant::greedy: return "greedy";
    case StrategyVariant::greedy_nucleation: return "greedy+nucleation";
    case StrategyVariant::exhaustive: return "exhaustive";
  }
  return "greedy";
}

double StepState::total() const { return elastic + surface_energy(ledger.volume(), problem->params); }

StepState solve_state(const Problem& problem, CrackSet crack, NeighborhoodLedger ledger,
                      const BoundaryLoad& load, double t, const DisplacementField* prev,
                      const DisplacementField* guess) {
  const auto sys = assemble(*problem.fem, crack, problem.params.c);
  DisplacementField u = solve_displacement(sys, load, t, prev, guess);
  const double el = elastic_energy(*problem.mesh, u, crack, problem.params.c);
  return StepState{std::move(crack), std::move(ledger), std::move(u), el, &problem};
}

namespace {

double release(const TriangulationMesh& mesh, const DisplacementField& u, const Stiffness& c, int s) {
  return mesh.area(s) * c.q(mesh.gradient(s, u.values));
}

bool touches_body_boundary(const TriangulationMesh& mesh, int s) {
  for (int o : mesh.edge_neighbors(s))
    if (o < 0 || mesh.label(o) != Region::interior) return true;
  return false;
}

// Runs fn(k) for k in [0, n) on up to `threads` workers; fn must only
// write to its own slot.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int k = 0; k < n; ++k) fn(k);
    return;
  }
  const int workers = std::min(threads, n);
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (int k = w; k < n; k += workers) fn(k);
    });
}

}  // namespace

std::vector<int> greedy_candidates(const Problem& problem, const CrackSet& crack,
                                   const DisplacementField& u, const MinimizeStrategy& strategy) {
  const auto& mesh = *problem.mesh;
  const int ns = static_cast<int>(mesh.num_simplices());
  std::vector<std::uint8_t> pick(ns, 0);
  std::vector<std::pair<double, int>> ranked;
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior || crack.contains(s)) continue;
    if (strategy.full_sweep) {
      pick[s] = 1;
      continue;
    }
    if (touches_body_boundary(mesh, s)) pick[s] = 1;
    for (int o : mesh.edge_neighbors(s))
      if (o >= 0 && crack.contains(o)) pick[s] = 1;
    ranked.emplace_back(-release(mesh, u, problem.params.c, s), s);
  }
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::max(0, strategy.top_k)), ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + k, ranked.end());
  for (std::size_t q = 0; q < k; ++q) pick[ranked[q].second] = 1;
  std::vector<int> out;
  for (int s = 0; s < ns; ++s)
    if (pick[s]) out.push_back(s);
  return out;
}

std::vector<int> greedy_flip_pass(StepState& state, const MinimizeStrategy& strategy,
                                  const std::vector<int>& candidates) {
  const Problem& problem = *state.problem;
  const auto& mesh = *problem.mesh;
  struct Move {
    double net;
    int s;
  };
  std::vector<Move> moves;
  for (int s : candidates) {
    if (state.crack.contains(s) || mesh.label(s) != Region::interior) continue;
    const double gain = release(mesh, state.u, problem.params.c, s);
    if (!(gain > strategy.tie_tol)) continue;
    // An uncovered simplex at least pays for itself.
    if (!state.ledger.covered(s) && gain <= surface_energy(state.ledger.weight(s), problem.params) + strategy.tie_tol)
      continue;
    const double net = gain - surface_energy(state.ledger.preview(s), problem.params);
    if (net > strategy.tie_tol) moves.push_back({net, s});
  }
  // Steepest first; the surface increment is re-read after every acceptance.
  std::sort(moves.begin(), moves.end(),
            [](const Move& a, const Move& b) { return a.net != b.net ? a.net > b.net : a.s < b.s; });
  std::vector<int> accepted;
  for (const Move& mv : moves) {
    const double gain = release(mesh, state.u, problem.params.c, mv.s);
    const double cost = accepted.empty() ? gain - mv.net : surface_energy(state.ledger.preview(mv.s), problem.params);
    if (gain > cost + strategy.tie_tol) {
      state.ledger.add(mv.s);
      state.crack.insert(mv.s);
      accepted.push_back(mv.s);
    }
  }
  if (!accepted.empty())
    state.elastic = elastic_energy(mesh, state.u, state.crack, problem.params.c);
  return accepted;
}

std::vector<NucleationCut> nucleation_cut_family(const Problem& problem, const CrackSet& crack,
                                                 const MinimizeStrategy& strategy) {
  const auto& mesh = *problem.mesh;
  const Rect& omega = mesh.domain().omega;
  const auto xs = mesh.grid_x();
  const auto ys = mesh.grid_y();
  const int nx = mesh.cells_x(), ny = mesh.cells_y();
  std::vector<std::vector<int>> cols(nx), rows(ny);
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior || crack.contains(s)) continue;
    cols[mesh.cell_col(s)].push_back(s);
    rows[mesh.cell_row(s)].push_back(s);
  }
  std::vector<NucleationCut> family;
  if (strategy.nucleation_vertical)
    for (int c = 0; c < nx; ++c)
      if (!cols[c].empty()) family.push_back({std::move(cols[c]), {xs[c], omega.y0, xs[c + 1], omega.y1}});
  if (strategy.nucleation_horizontal)
    for (int r = 0; r < ny; ++r)
      if (!rows[r].empty()) family.push_back({std::move(rows[r]), {omega.x0, ys[r], omega.x1, ys[r + 1]}});
  return family;
}

double cut_volume_bound(const Problem& problem, const NeighborhoodLedger& ledger, const Rect& region) {
  const auto& mesh = *problem.mesh;
  // Half the tie slack: ties still count, and the result stays a bound.
  const double r = ledger.eps() + 0.5 * kDistanceTieTol;
  const auto xs = mesh.grid_x();
  const auto ys = mesh.grid_y();
  const auto lo_x = std::upper_bound(xs.begin(), xs.end(), region.x0 - r);
  const auto hi_x = std::lower_bound(xs.begin(), xs.end(), region.x1 + r);
  const auto lo_y = std::upper_bound(ys.begin(), ys.end(), region.y0 - r);
  const auto hi_y = std::lower_bound(ys.begin(), ys.end(), region.y1 + r);
  const int nx = mesh.cells_x(), ny = mesh.cells_y();
  const int i0 = std::max(0, static_cast<int>(lo_x - xs.begin()) - 1);
  const int i1 = std::min(nx - 1, static_cast<int>(hi_x - xs.begin()));
  const int j0 = std::max(0, static_cast<int>(lo_y - ys.begin()) - 1);
  const int j1 = std::min(ny - 1, static_cast<int>(hi_y - ys.begin()));
  double sum = 0.0;
  for (int j = j0; j <= j1; ++j)
    for (int i = i0; i <= i1; ++i)
      for (int k = 0; k < 2; ++k) {
        const int s = 2 * (j * nx + i) + k;
        if (ledger.covered(s)) continue;
        if (triangle_rect_distance(mesh.triangle(s), region) <= r) sum += ledger.weight(s);
      }
  return sum;
}

std::vector<int> nucleation_cuts(StepState& state, const BoundaryLoad& load, double t,
                                 const MinimizeStrategy& strategy, const DisplacementField* prev,
                                 int* tried, NucleationCache* cache) {
  const Problem& problem = *state.problem;
  NucleationCache local;
  NucleationCache& nc = cache ? *cache : local;
  if (nc.key.universe() != state.crack.universe() || !(nc.key == state.crack)) {
    nc.key = state.crack;
    nc.family = nucleation_cut_family(problem, state.crack, strategy);
    nc.bounds.resize(nc.family.size());
    for (std::size_t k = 0; k < nc.family.size(); ++k)
      nc.bounds[k] = cut_volume_bound(problem, state.ledger, nc.family[k].region);
  }
  const auto& family = nc.family;
  struct Candidate {
    double lower = 0.0;
    int index = 0;
  };
  std::vector<Candidate> order;
  order.reserve(family.size());
  const double base_volume = state.ledger.volume();
  for (std::size_t k = 0; k < family.size(); ++k)
    order.push_back({surface_energy(base_volume + nc.bounds[k], problem.params), static_cast<int>(k)});
  std::sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    return a.lower != b.lower ? a.lower < b.lower : a.index < b.index;
  });

  // Branch and bound: a cut is solved only while its surface bound
  // undercuts the best total so far.  Trials run in batches and are consumed
  // in order, so the outcome does not depend on the batch width.
  double best_total = state.total();
  int best = -1;
  std::optional<StepState> best_state;
  const int batch = std::max(1, strategy.threads);
  int evaluated = 0;
  std::size_t pos = 0;
  auto live = [&](std::size_t q) { return order[q].lower < best_total - strategy.tie_tol; };
  while (pos < order.size() && live(pos)) {
    std::vector<std::size_t> slots;
    for (std::size_t q = pos; q < order.size() && static_cast<int>(slots.size()) < batch && live(q); ++q)
      slots.push_back(q);
    std::vector<std::optional<StepState>> trials(slots.size());
    parallel_for(static_cast<int>(slots.size()), strategy.threads, [&](int k) {
      const auto& cut = family[order[slots[k]].index].simplices;
      CrackSet crack = state.crack;
      crack.insert_all(cut);
      NeighborhoodLedger ledger = state.ledger;
      for (int s : cut) ledger.add(s);
      trials[k] = solve_state(problem, std::move(crack), std::move(ledger), load, t, prev, &state.u);
    });
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (!live(slots[k])) break;
      ++evaluated;
      const double total = trials[k]->total();
      if (total < best_total - strategy.tie_tol) {
        best_total = total;
        best = order[slots[k]].index;
        best_state = std::move(trials[k]);
      }
    }
    pos = slots.back() + 1;
  }
  if (tried) *tried = evaluated;
  if (best < 0) return {};
  std::vector<int> applied = family[best].simplices;
  state = std::move(*best_state);
  return applied;
}

namespace {

void finalize(const Problem& problem, const CrackSet& precrack, StepState& st, StepResult& out) {
  const auto& mesh = *problem.mesh;
  EigenField gamma = optimal_gamma(mesh, st.u, st.crack);
  CrackSet kept = precrack;
  kept.insert_all(gamma.support());
  if (!(kept == st.crack)) {
    out.trace.pruned = static_cast<int>(st.crack.size() - kept.size());
    st.ledger = problem.ledger_for(kept);
    st.crack = std::move(kept);
    gamma = optimal_gamma(mesh, st.u, st.crack);
  }
  out.energy = total_energy(mesh, st.u, gamma, st.crack, problem.params, st.ledger);
  out.ledger = std::move(st.ledger);
  out.u = std::move(st.u);
  out.gamma = std::move(gamma);
  out.crack = std::move(st.crack);
}

}  // namespace

StepResult minimize_step(const Problem& problem, const CrackSet& precrack,
                         const NeighborhoodLedger& precrack_ledger, const BoundaryLoad& load, double t,
                         const MinimizeStrategy& strategy, PreviousNode prev, NucleationCache* cache) {
  if (!(precrack_ledger.broken() == precrack))
    throw ContractError("minimize_step: ledger does not match the precrack");
  const auto& mesh = *problem.mesh;
  for (int s : precrack.ids())
    if (mesh.label(s) != Region::interior)
      throw ContractError("minimize_step: precrack contains a non-interior simplex");

  const DisplacementField* prev_u = prev.state ? &prev.state->u : nullptr;

  if (strategy.variant == StrategyVariant::exhaustive)
    return exhaustive_minimize(problem, precrack, load, t, strategy.exhaustive_cap, prev_u);

  StepResult out;
  std::optional<DisplacementField> guess;
  if (prev.state) {
    // Translation competitor: shift the previous state by the load increment.
    const auto g0 = interpolate_boundary(load, mesh, prev.t);
    const auto g1 = interpolate_boundary(load, mesh, t);
    DisplacementField shifted = prev.state->u;
    for (std::size_t v = 0; v < g0.size(); ++v) shifted.values[v] += g1[v] - g0[v];
    double el = 0.0;
    const int ns = static_cast<int>(mesh.num_simplices());
    for (int s = 0; s < ns; ++s)
      if (mesh.label(s) == Region::interior)
        el += mesh.area(s) * problem.params.c.q(mesh.gradient(s, shifted.values) - prev.state->gamma.values[s]);
    out.trace.translation_energy = el + surface_energy(precrack_ledger.volume(), problem.params);
    guess = std::move(shifted);
  }

  StepState st = solve_state(problem, precrack, precrack_ledger, load, t, prev_u, guess ? &*guess : nullptr);
  out.trace.solves = 1;
  out.trace.do_nothing_energy = st.total();

  const bool nucleate = strategy.variant == StrategyVariant::greedy_nucleation;
  auto sweep = [&](StepState& cur) {
    for (int k = 0; k < strategy.sweep_limit; ++k) {
      ++out.trace.sweeps;
      const auto flips = greedy_flip_pass(cur, strategy, greedy_candidates(problem, cur.crack, cur.u, strategy));
      if (flips.empty()) return;
      out.trace.flips_accepted += static_cast<int>(flips.size());
      const DisplacementField warm = cur.u;
      cur = solve_state(problem, std::move(cur.crack), std::move(cur.ledger), load, t, prev_u, &warm);
      ++out.trace.solves;
    }
  };
  auto cut = [&](StepState& cur) {
    int tried = 0;
    const bool applied = !nucleation_cuts(cur, load, t, strategy, prev_u, &tried, cache).empty();
    out.trace.cuts_tried += tried;
    out.trace.solves += tried;
    out.trace.cuts_accepted += applied ? 1 : 0;
    return applied;
  };
  // Alternate flips and cuts until neither moves; a second descent that
  // opens with a cut guards against greedy flips walling off a cheaper cut.
  auto descend = [&](StepState& cur) {
    for (int round = 0; round < 64; ++round) {
      sweep(cur);
      if (!nucleate || !cut(cur)) return;
    }
  };

  if (nucleate) {
    StepState alt = st;
    descend(st);
    if (cut(alt)) {
      descend(alt);
      if (alt.total() < st.total() - strategy.tie_tol) st = std::move(alt);
    }
  } else {
    descend(st);
  }

  finalize(problem, precrack, st, out);
  return out;
}

StepResult exhaustive_minimize(const Problem& problem, const CrackSet& precrack, const BoundaryLoad& load,
                               double t, int cap, const DisplacementField* prev) {
  const auto& mesh = *problem.mesh;
  std::vector<int> cands;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s)
    if (mesh.label(s) == Region::interior && !precrack.contains(s)) cands.push_back(s);
  const int k = static_cast<int>(cands.size());
  if (k > cap) throw std::invalid_argument("exhaustive_minimize: candidate count exceeds cap");

  const NeighborhoodLedger base = problem.ledger_for(precrack);
  std::optional<StepState> best;
  double best_total = std::numeric_limits<double>::infinity();
  double do_nothing = 0.0;
  int evaluated = 0;
  // Subsets by cardinality, then lexicographically; only strict improvements
  // replace the incumbent.
  for (int size = 0; size <= k; ++size) {
    std::vector<std::uint8_t> sel(k, 0);
    std::fill(sel.begin(), sel.begin() + size, 1);
    do {
      CrackSet crack = precrack;
      NeighborhoodLedger ledger = base;
      for (int q = 0; q < k; ++q)
        if (sel[q]) {
          crack.insert(cands[q]);
          ledger.add(cands[q]);
        }
      StepState st = solve_state(problem, std::move(crack), std::move(ledger), load, t, prev, nullptr);
      ++evaluated;
      const double total = st.total();
      if (size == 0) do_nothing = total;
      const double tol = 1e-12 * std::max(1.0, std::abs(best_total));
      if (!best || total < best_total - tol) {
        best_total = total;
        best = std::move(st);
      }
    } while (std::prev_permutation(sel.begin(), sel.end()));
  }
  StepResult out;
  out.trace.solves = evaluated;
  out.trace.do_nothing_energy = do_nothing;
  finalize(problem, precrack, *best, out);
  return out;
}

}  // namespace ef
