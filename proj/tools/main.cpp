// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "eigenfracture/eigenfracture.h"

namespace {

// 1: bad input or output, 2: invariant or oracle failure, 3: solver failure.
int exit_code(ef_status s) {
  switch (s) {
    case EF_OK: return 0;
    case EF_ERR_INVARIANT: return 2;
    case EF_ERR_SOLVER: return 3;
    default: return 1;
  }
}

int report(ef_status s, const char* what) {
  if (s != EF_OK) std::fprintf(stderr, "eigenfracture %s: %s\n", what, ef_last_error());
  return exit_code(s);
}

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--threads", c.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", c.seed, "RNG seed, overrides the config");
}

ef_config* load(const Common& c, int& code) {
  ef_config* cfg = nullptr;
  ef_status s = ef_config_load(c.config.c_str(), &cfg);
  if (s == EF_OK && c.out) s = ef_config_set_output_dir(cfg, c.out->c_str());
  if (s == EF_OK && c.threads) s = ef_config_set_threads(cfg, *c.threads);
  if (s == EF_OK && c.seed) s = ef_config_set_seed(cfg, *c.seed);
  if (s != EF_OK) {
    code = report(s, "config");
    ef_config_free(cfg);
    return nullptr;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-static brittle fracture by eigendeformation"};
  app.set_version_flag("--version", ef_version());
  app.require_subcommand(1);

  Common sim, stu, orc;
  std::string kind;
  auto* simulate = app.add_subcommand("simulate", "run the incremental evolution");
  add_common(simulate, sim);
  auto* study = app.add_subcommand("study", "run a convergence study");
  study->add_option("kind", kind, "tube, bar, simultaneous or growth")->required();
  add_common(study, stu);
  auto* oracle = app.add_subcommand("oracle", "compare the strategy against exhaustive enumeration");
  add_common(oracle, orc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  int code = 0;
  if (*simulate) {
    ef_config* cfg = load(sim, code);
    if (!cfg) return code;
    ef_run* run = nullptr;
    code = report(ef_simulate(cfg, &run), "simulate");
    if (run) {
      const long r = ef_run_rupture_node(run);
      ef_node_info last{};
      ef_run_node(run, ef_run_node_count(run) - 1, &last);
      if (r >= 0) std::printf("nodes %zu  rupture at node %ld  final lambda %.6f\n", ef_run_node_count(run), r, last.lambda);
      else std::printf("nodes %zu  no rupture  final lambda %.6f\n", ef_run_node_count(run), last.lambda);
    }
    ef_run_free(run);
    ef_config_free(cfg);
  } else if (*study) {
    ef_config* cfg = load(stu, code);
    if (!cfg) return code;
    code = report(ef_study(cfg, kind.c_str()), "study");
    ef_config_free(cfg);
  } else {
    ef_config* cfg = load(orc, code);
    if (!cfg) return code;
    ef_oracle_info info{};
    const ef_status s = ef_oracle(cfg, &info);
    if (info.instances > 0)
      std::printf("instances %d  bar %d/%d  random %d/%d  below %d\n", info.instances, info.bar_matches,
                  info.bar_total, info.random_matches, info.random_total, info.below);
    code = report(s, "oracle");
    ef_config_free(cfg);
  }
  return code;
}
