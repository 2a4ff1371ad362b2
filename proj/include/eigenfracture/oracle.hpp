// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "eigenfracture/config.hpp"

namespace ef {

enum class InstanceKind { bar, random_load };

/// One seeded micro-problem: a single row of cells, so that every subset of
/// the interior simplices can be enumerated.
struct OracleInstance {
  InstanceKind kind = InstanceKind::bar;
  std::uint64_t seed = 0;
  DomainSpec domain;
  double h = 0.2;
  EnergyParams params;
  BoundaryLoad load;
  double t = 1.0;
  std::vector<int> precrack;
};

struct OracleRow {
  OracleInstance instance;
  std::size_t candidates = 0;
  double strategy_energy = 0.0;
  double oracle_energy = 0.0;
  std::size_t strategy_crack = 0, oracle_crack = 0;
  bool below = false;  // strategy beat the enumeration by more than tolerance
  bool match = false;
};

struct OracleSummary {
  std::vector<OracleRow> rows;
  int bar_total = 0, bar_matches = 0;
  int random_total = 0, random_matches = 0;
  int below = 0;
  double bar_rate() const { return bar_total ? double(bar_matches) / bar_total : 1.0; }
  double random_rate() const { return random_total ? double(random_matches) / random_total : 1.0; }
  bool passed(double threshold) const { return below == 0 && bar_matches == bar_total && random_rate() >= threshold; }
};

std::vector<OracleInstance> oracle_corpus(const OracleSettings& settings, std::uint64_t seed);

/// Runs the strategy and exhaustive_minimize on every instance.  Throws
/// std::invalid_argument on an empty corpus or when an instance exceeds the
/// strategy's exhaustive cap.
OracleSummary run_oracle_corpus(const std::vector<OracleInstance>& corpus, const MinimizeStrategy& strategy,
                                double tolerance, int threads = 1);

void write_oracle_csv(std::ostream& out, const OracleSummary& summary, std::uint64_t config_hash);

}  // namespace ef
