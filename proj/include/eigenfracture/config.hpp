// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eigenfracture/energy.hpp"
#include "eigenfracture/minimizer.hpp"

namespace ef {

struct OutputSettings {
  std::string dir = "out";
  std::string ledger = "ledger.csv";
  int vtk_every = 0;  // 0 disables snapshots
  std::string vtk_prefix = "snapshot";
};

struct StudySettings {
  std::vector<double> eps{0.08, 0.04, 0.02};
  Vec2 segment_a{0.25, 0.5};
  Vec2 segment_b{0.75, 0.5};
  double kappa = 1.0;
  double t_max = 2.0;
  int m = 6;
  std::vector<int> grids;  // simultaneous study; empty means m for every eps
  int clouds = 100;
  int held_out = 100;
  std::vector<std::pair<double, double>> radii{{0.01, 0.02}, {0.02, 0.02}};
  std::optional<double> growth_constant;  // calibrated on held-out clouds if unset
};

struct OracleSettings {
  int instances = 50;
  double bar_fraction = 0.5;
  double match_threshold = 0.9;
  double tolerance = 1e-9;
  int cells = 5;
};

struct RunConfig {
  DomainSpec domain;
  EnergyParams params;
  ResolutionCoupling coupling;
  std::optional<double> h;  // overrides the coupling
  int m = 4;
  BoundaryLoad load = BoundaryLoad::stretch(1.0);
  MinimizeStrategy strategy;
  VolumeConvention convention = VolumeConvention::all_simplices;
  OutputSettings output;
  StudySettings study;
  OracleSettings oracle;
  std::uint64_t seed = 0;
  int threads = 0;  // 0: available cores

  double resolution() const;
  /// FNV-1a of the canonical JSON form, without output paths or threads.
  std::uint64_t hash() const;
  std::string canonical_json() const;
};

/// Parses and validates a JSON document.  Unknown keys, wrong types and
/// out-of-range values throw ConfigError naming the line or field.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

}  // namespace ef
