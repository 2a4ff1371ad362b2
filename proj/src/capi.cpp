// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/eigenfracture.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "eigenfracture/config.hpp"
#include "eigenfracture/error.hpp"
#include "eigenfracture/evolution.hpp"
#include "eigenfracture/experiments.hpp"
#include "eigenfracture/io.hpp"
#include "eigenfracture/oracle.hpp"

struct ef_config {
  ef::RunConfig cfg;
};

struct ef_run {
  std::vector<ef_node_info> nodes;
  long rupture = -1;
};

namespace {

thread_local std::string g_last_error;

class IoError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

ef_status fail(ef_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

ef_status classify(std::exception_ptr e) {
  try {
    std::rethrow_exception(e);
  } catch (const ef::EvolutionAborted& a) {
    const ef_status inner = a.cause() ? classify(a.cause()) : EF_ERR_INTERNAL;
    g_last_error = a.what();
    return inner;
  } catch (const ef::ConfigError& x) {
    return fail(EF_ERR_CONFIG, x.what());
  } catch (const ef::SolverError& x) {
    return fail(EF_ERR_SOLVER, x.what());
  } catch (const ef::ContractError& x) {
    return fail(EF_ERR_INVARIANT, x.what());
  } catch (const IoError& x) {
    return fail(EF_ERR_IO, x.what());
  } catch (const std::filesystem::filesystem_error& x) {
    return fail(EF_ERR_IO, x.what());
  } catch (const std::invalid_argument& x) {
    return fail(EF_ERR_CONFIG, x.what());
  } catch (const std::exception& x) {
    return fail(EF_ERR_INTERNAL, x.what());
  } catch (...) {
    return fail(EF_ERR_INTERNAL, "unknown error");
  }
}

template <class F>
ef_status guarded(F&& f) {
  g_last_error.clear();
  try {
    return f();
  } catch (...) {
    return classify(std::current_exception());
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::filesystem::path out_dir(const ef::RunConfig& cfg) {
  std::filesystem::path dir(cfg.output.dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot write '" + p.string() + "'");
  return f;
}

void close_out(std::ofstream& f, const std::filesystem::path& p) {
  f.close();
  if (!f) throw IoError("failed writing '" + p.string() + "'");
}

ef::MinimizeStrategy strategy_of(const ef::RunConfig& cfg) {
  ef::MinimizeStrategy s = cfg.strategy;
  s.threads = resolve_threads(cfg.threads);
  return s;
}

ef_status simulate(const ef::RunConfig& cfg, ef_run** out) {
  const auto dir = out_dir(cfg);
  const std::uint64_t hash = cfg.hash();
  const ef::Problem problem = ef::Problem::build(cfg.domain, cfg.resolution(), cfg.params, cfg.convention);
  const ef::TimeGrid grid(cfg.m);

  const auto ledger_path = dir / cfg.output.ledger;
  auto csv = open_out(ledger_path);
  ef::LedgerWriter writer(csv, hash);
  std::vector<std::string> failures;
  ef::EvolveOptions opt;
  opt.keep_states = false;
  opt.on_node = [&](const ef::NodeRecord& rec, const ef::StepResult& state) {
    writer.write(rec);
    for (auto& f : ef::check_state_invariants(problem, state, rec.index).failures) failures.push_back(std::move(f));
    const bool last = rec.index + 1 == grid.size();
    if (cfg.output.vtk_every > 0 && (rec.index % cfg.output.vtk_every == 0 || last)) {
      char name[64];
      std::snprintf(name, sizeof name, "_%04zu.vtk", rec.index);
      const auto p = dir / (cfg.output.vtk_prefix + name);
      auto f = open_out(p);
      ef::write_vtk(f, problem, state, rec.t);
      close_out(f, p);
    }
  };
  const auto traj = ef::evolve(problem, cfg.load, grid, strategy_of(cfg), opt);
  close_out(csv, ledger_path);

  for (auto& f : ef::check_trajectory_invariants(traj).failures) failures.push_back(std::move(f));
  const auto est = ef::verify_discrete_estimate(traj);
  if (!est.ok()) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "discrete energy estimate violated on %zu of %zu pairs (worst %.3g at %zu..%zu)",
                  est.violations, est.pairs_checked, est.max_violation, est.worst_first, est.worst_second);
    failures.emplace_back(buf);
  }

  const auto summary_path = dir / "summary.txt";
  auto sum = open_out(summary_path);
  char line[200];
  sum << "config " << ef::hex64(hash) << "\n";
  std::snprintf(line, sizeof line, "eps %.6g  h %.6g  m %d  nodes %zu  simplices %zu\n", cfg.params.eps,
                problem.mesh->nominal_h(), cfg.m, traj.nodes.size(), problem.mesh->num_simplices());
  sum << line;
  if (traj.rupture_node) std::snprintf(line, sizeof line, "rupture at node %zu, t = %.6g\n", *traj.rupture_node, traj.nodes[*traj.rupture_node].t);
  else std::snprintf(line, sizeof line, "no rupture\n");
  sum << line;
  std::snprintf(line, sizeof line, "max balance defect %.6g\ne(m) %.6g  estimate pairs %zu  violations %zu  max excess %.3g\n",
                traj.max_balance_defect(), est.e_m, est.pairs_checked, est.violations, est.max_violation);
  sum << line;
  for (const auto& f : failures) sum << "invariant: " << f << '\n';
  close_out(sum, summary_path);

  if (out) {
    auto run = std::make_unique<ef_run>();
    for (const auto& n : traj.nodes)
      run->nodes.push_back({n.t, n.energy.elastic, n.energy.surface, n.energy.lambda, n.cumulative_work,
                            n.balance_defect, n.crack.size(), n.rupture ? 1 : 0});
    run->rupture = traj.rupture_node ? static_cast<long>(*traj.rupture_node) : -1;
    *out = run.release();
  }
  if (!failures.empty()) return fail(EF_ERR_INVARIANT, failures.front());
  return EF_OK;
}

template <class Writer>
void write_file(const std::filesystem::path& p, Writer&& w) {
  auto f = open_out(p);
  w(f);
  close_out(f, p);
}

ef_status study(const ef::RunConfig& cfg, const std::string& kind) {
  if (kind != "tube" && kind != "bar" && kind != "simultaneous" && kind != "growth")
    return fail(EF_ERR_CONFIG, "unknown study kind '" + kind + "' (expected tube, bar, simultaneous or growth)");
  const auto dir = out_dir(cfg);
  const std::uint64_t hash = cfg.hash();
  const auto& st = cfg.study;

  if (kind == "tube") {
    ef::TubeStudyConfig tc;
    tc.domain = cfg.domain;
    tc.a = st.segment_a;
    tc.b = st.segment_b;
    tc.eps = st.eps;
    tc.coupling = cfg.coupling;
    tc.convention = cfg.convention;
    auto rep = ef::tube_convergence_study(tc);
    rep.config_hash = hash;
    write_file(dir / "tube.csv", [&](std::ostream& o) { ef::write_study_csv(o, rep); });
    write_file(dir / "tube_summary.txt", [&](std::ostream& o) {
      ef::write_study_summary(o, rep, {"reference: stadium value L + pi eps / 2"});
    });
    return EF_OK;
  }
  if (kind == "bar") {
    ef::BarStudyConfig bc;
    bc.eps = st.eps;
    bc.kappa = st.kappa;
    bc.t_max = st.t_max;
    bc.m = st.m;
    bc.coupling = cfg.coupling;
    bc.strategy = strategy_of(cfg);
    bc.convention = cfg.convention;
    bc.threads = resolve_threads(cfg.threads);
    auto res = ef::bar_rupture_study(bc);
    res.report.config_hash = hash;
    write_file(dir / "bar.csv", [&](std::ostream& o) { ef::write_study_csv(o, res.report); });
    write_file(dir / "goodset.csv", [&](std::ostream& o) { ef::write_goodset_csv(o, res.goodset, hash); });
    write_file(dir / "bar_summary.txt", [&](std::ostream& o) {
      ef::write_study_summary(o, res.report, {"reference: normalized Griffith threshold sqrt(kappa) / t_max"});
    });
    return EF_OK;
  }
  if (kind == "simultaneous") {
    std::vector<int> grids = st.grids.empty() ? std::vector<int>(st.eps.size(), st.m) : st.grids;
    const auto res = ef::simultaneous_run(cfg.domain, cfg.params, cfg.coupling, st.eps, grids, cfg.load,
                                          strategy_of(cfg), cfg.convention, resolve_threads(cfg.threads));
    write_file(dir / "simultaneous.csv", [&](std::ostream& o) { ef::write_simultaneous_csv(o, res.rows, hash); });
    write_file(dir / "simultaneous_summary.txt", [&](std::ostream& o) {
      char line[160];
      o << "study simultaneous  config " << ef::hex64(hash) << '\n';
      for (const auto& r : res.rows) {
        std::snprintf(line, sizeof line, "eps %.4g  h %.4g  m %d  lambda(1) %.6f  rupture %s\n", r.eps, r.h, r.m,
                      r.final_lambda, r.rupture_time ? ef::format_number(*r.rupture_time).c_str() : "none");
        o << line;
      }
    });
    return EF_OK;
  }
  // growth
  ef::GrowthStudyConfig gc;
  gc.seed = cfg.seed;
  gc.clouds = st.clouds;
  gc.radii = st.radii;
  double constant = 0.0;
  if (st.growth_constant) {
    constant = *st.growth_constant;
  } else {
    ef::GrowthStudyConfig held = gc;
    held.seed = cfg.seed + 0x9e3779b97f4a7c15ULL;
    held.clouds = st.held_out;
    constant = ef::calibrate_growth_constant(held);
  }
  gc.constant = constant;
  const auto rows = ef::growth_study(gc);
  const auto violations = std::count_if(rows.begin(), rows.end(), [](const ef::GrowthRow& r) { return !r.check.satisfied(); });
  write_file(dir / "growth.csv", [&](std::ostream& o) { ef::write_growth_csv(o, rows, hash); });
  write_file(dir / "growth_summary.txt", [&](std::ostream& o) {
    char line[160];
    std::snprintf(line, sizeof line, "study growth  config %s\nconstant %.6f  rows %zu  violations %td\n",
                  ef::hex64(hash).c_str(), constant, rows.size(), violations);
    o << line;
  });
  return violations ? fail(EF_ERR_INVARIANT, "growth bound violated") : EF_OK;
}

ef_status oracle(const ef::RunConfig& cfg, ef_oracle_info* info) {
  const auto corpus = ef::oracle_corpus(cfg.oracle, cfg.seed);
  if (corpus.empty()) return fail(EF_ERR_CONFIG, "oracle: empty corpus");
  const auto dir = out_dir(cfg);
  const auto sum = ef::run_oracle_corpus(corpus, cfg.strategy, cfg.oracle.tolerance, resolve_threads(cfg.threads));
  write_file(dir / "oracle.csv", [&](std::ostream& o) { ef::write_oracle_csv(o, sum, cfg.hash()); });
  const bool ok = sum.passed(cfg.oracle.match_threshold);
  if (info) {
    *info = {static_cast<int>(sum.rows.size()), sum.bar_total, sum.bar_matches, sum.random_total, sum.random_matches,
             sum.below, ok ? 1 : 0};
  }
  if (!ok) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "oracle: %d below the enumeration, bar %d/%d, random %d/%d", sum.below,
                  sum.bar_matches, sum.bar_total, sum.random_matches, sum.random_total);
    return fail(EF_ERR_INVARIANT, buf);
  }
  return EF_OK;
}

}  // namespace

extern "C" {

const char* ef_version(void) { return "0.1.0"; }

const char* ef_last_error(void) { return g_last_error.c_str(); }

ef_status ef_config_load(const char* path, ef_config** out) {
  if (!path || !out) return fail(EF_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ef_config{ef::load_config(path)};
    return EF_OK;
  });
}

ef_status ef_config_parse(const char* json_text, ef_config** out) {
  if (!json_text || !out) return fail(EF_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new ef_config{ef::parse_config(json_text)};
    return EF_OK;
  });
}

ef_status ef_config_set_seed(ef_config* cfg, uint64_t seed) {
  if (!cfg) return fail(EF_ERR_ARGUMENT, "null config");
  cfg->cfg.seed = seed;
  return EF_OK;
}

ef_status ef_config_set_threads(ef_config* cfg, int threads) {
  if (!cfg) return fail(EF_ERR_ARGUMENT, "null config");
  if (threads < 0) return fail(EF_ERR_ARGUMENT, "thread count must be non-negative");
  cfg->cfg.threads = threads;
  return EF_OK;
}

ef_status ef_config_set_output_dir(ef_config* cfg, const char* dir) {
  if (!cfg || !dir) return fail(EF_ERR_ARGUMENT, "null argument");
  cfg->cfg.output.dir = dir;
  return EF_OK;
}

ef_status ef_config_hash(const ef_config* cfg, uint64_t* out) {
  if (!cfg || !out) return fail(EF_ERR_ARGUMENT, "null argument");
  *out = cfg->cfg.hash();
  return EF_OK;
}

void ef_config_free(ef_config* cfg) { delete cfg; }

ef_status ef_simulate(const ef_config* cfg, ef_run** out) {
  if (!cfg) return fail(EF_ERR_ARGUMENT, "null config");
  if (out) *out = nullptr;
  return guarded([&] { return simulate(cfg->cfg, out); });
}

size_t ef_run_node_count(const ef_run* run) { return run ? run->nodes.size() : 0; }

ef_status ef_run_node(const ef_run* run, size_t index, ef_node_info* out) {
  if (!run || !out) return fail(EF_ERR_ARGUMENT, "null argument");
  if (index >= run->nodes.size()) return fail(EF_ERR_ARGUMENT, "node index out of range");
  *out = run->nodes[index];
  return EF_OK;
}

long ef_run_rupture_node(const ef_run* run) { return run ? run->rupture : -1; }

void ef_run_free(ef_run* run) { delete run; }

ef_status ef_study(const ef_config* cfg, const char* kind) {
  if (!cfg || !kind) return fail(EF_ERR_ARGUMENT, "null argument");
  return guarded([&] { return study(cfg->cfg, kind); });
}

ef_status ef_oracle(const ef_config* cfg, ef_oracle_info* out) {
  if (!cfg) return fail(EF_ERR_ARGUMENT, "null config");
  return guarded([&] { return oracle(cfg->cfg, out); });
}

}  // extern "C"
