// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

#include "eigenfracture/io.hpp"

namespace ef {

std::vector<OracleInstance> oracle_corpus(const OracleSettings& settings, std::uint64_t seed) {
  std::vector<OracleInstance> out;
  const int n_bar = static_cast<int>(std::lround(settings.bar_fraction * settings.instances));
  for (int k = 0; k < settings.instances; ++k) {
    OracleInstance in;
    in.seed = seed * 7919ULL + static_cast<std::uint64_t>(k);
    std::mt19937_64 rng(in.seed);
    auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
    in.kind = k < n_bar ? InstanceKind::bar : InstanceKind::random_load;
    in.h = 1.0 / settings.cells;
    in.domain.omega = {0.0, 0.0, 1.0, in.h};
    in.domain.collar_width = in.h;
    in.domain.dirichlet_sides = kLeft | kRight;
    in.params.eps = uni(0.08, 0.3);
    in.params.kappa = uni(0.02, 0.5);
    in.t = std::uniform_int_distribution<int>(1, 16)(rng) / 16.0;
    if (in.kind == InstanceKind::bar) {
      in.load = BoundaryLoad::stretch(uni(0.5, 4.0));
    } else {
      const double c11 = uni(0.5, 2.0), c22 = uni(0.5, 2.0);
      in.params.c = {c11, uni(-0.4, 0.4) * std::sqrt(c11 * c22), c22};
      in.load.kind = std::uniform_int_distribution<int>(0, 1)(rng) ? LoadKind::affine_ramp : LoadKind::quadratic;
      in.load.amplitude = uni(0.5, 4.0);
      in.load.c0 = uni(-1.0, 1.0);
      in.load.c1 = uni(-1.0, 1.0);
      in.load.c2 = uni(-4.0, 4.0);
      in.load.power = std::uniform_int_distribution<int>(1, 2)(rng);
      const int cells = 2 * settings.cells;
      for (int s = 0; s < cells; ++s)
        if (uni(0.0, 1.0) < 0.15) in.precrack.push_back(s);
    }
    out.push_back(std::move(in));
  }
  return out;
}

namespace {

OracleRow run_one(const OracleInstance& in, const MinimizeStrategy& strategy, double tol) {
  const Problem problem = Problem::build(in.domain, in.h, in.params);
  const auto& mesh = *problem.mesh;
  std::vector<int> interior;
  for (int s = 0; s < static_cast<int>(mesh.num_simplices()); ++s)
    if (mesh.label(s) == Region::interior) interior.push_back(s);
  CrackSet pre(mesh.num_simplices());
  for (int k : in.precrack)
    if (k < static_cast<int>(interior.size())) pre.insert(interior[k]);
  const NeighborhoodLedger ledger = problem.ledger_for(pre);

  OracleRow row;
  row.instance = in;
  row.candidates = interior.size() - pre.size();
  if (static_cast<int>(row.candidates) > strategy.exhaustive_cap)
    throw std::invalid_argument("oracle: instance exceeds the exhaustive cap");
  MinimizeStrategy plain = strategy;
  plain.threads = 1;
  const StepResult fast = minimize_step(problem, pre, ledger, in.load, in.t, plain);
  const StepResult exact = exhaustive_minimize(problem, pre, in.load, in.t, strategy.exhaustive_cap);
  row.strategy_energy = fast.energy.total;
  row.oracle_energy = exact.energy.total;
  row.strategy_crack = fast.crack.size();
  row.oracle_crack = exact.crack.size();
  row.below = row.strategy_energy < row.oracle_energy - tol;
  row.match = std::abs(row.strategy_energy - row.oracle_energy) <= tol;
  return row;
}

}  // namespace

OracleSummary run_oracle_corpus(const std::vector<OracleInstance>& corpus, const MinimizeStrategy& strategy,
                                double tolerance, int threads) {
  if (corpus.empty()) throw std::invalid_argument("oracle: empty corpus");
  std::vector<OracleRow> rows(corpus.size());
  std::vector<std::exception_ptr> errors(corpus.size());
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(corpus.size())));
  auto work = [&](int w) {
    for (std::size_t k = w; k < corpus.size(); k += workers) {
      try {
        rows[k] = run_one(corpus[k], strategy, tolerance);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  OracleSummary sum;
  for (auto& r : rows) {
    const bool bar = r.instance.kind == InstanceKind::bar;
    (bar ? sum.bar_total : sum.random_total)++;
    if (r.match) (bar ? sum.bar_matches : sum.random_matches)++;
    if (r.below) ++sum.below;
    sum.rows.push_back(std::move(r));
  }
  return sum;
}

void write_oracle_csv(std::ostream& out, const OracleSummary& summary, std::uint64_t config_hash) {
  out << "# schema: " << kStudySchema << " study: oracle config: " << hex64(config_hash) << '\n'
      << "instance,kind,seed,eps,kappa,t,candidates,strategy_energy,oracle_energy,difference,strategy_crack,"
         "oracle_crack,match,below\n";
  for (std::size_t k = 0; k < summary.rows.size(); ++k) {
    const auto& r = summary.rows[k];
    out << k << ',' << (r.instance.kind == InstanceKind::bar ? "bar" : "random_load") << ',' << r.instance.seed << ','
        << format_number(r.instance.params.eps) << ',' << format_number(r.instance.params.kappa) << ','
        << format_number(r.instance.t) << ',' << r.candidates << ',' << format_number(r.strategy_energy) << ','
        << format_number(r.oracle_energy) << ',' << format_number(r.strategy_energy - r.oracle_energy) << ','
        << r.strategy_crack << ',' << r.oracle_crack << ',' << (r.match ? 1 : 0) << ',' << (r.below ? 1 : 0) << '\n';
  }
}

}  // namespace ef
