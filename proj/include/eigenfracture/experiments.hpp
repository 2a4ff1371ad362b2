// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eigenfracture/evolution.hpp"

namespace ef {

struct StudyRow {
  double eps = 0.0;
  double h = 0.0;
  int m = 0;
  double lambda = 0.0;
  double reference = 0.0;
  double rel_error = 0.0;
  std::optional<double> rupture_time;
  bool censored = false;
  double runtime_s = 0.0;
  // tube study: lambda against the bare crack length
  double length = 0.0;
  double rel_error_length = 0.0;
};

struct StudyReport {
  std::string study_id;
  std::uint64_t config_hash = 0;
  std::vector<StudyRow> rows;  // eps descending
};

struct TubeStudyConfig {
  DomainSpec domain;
  Vec2 a{0.25, 0.5};
  Vec2 b{0.75, 0.5};
  std::vector<double> eps{0.08, 0.04, 0.02};
  ResolutionCoupling coupling;
  VolumeConvention convention = VolumeConvention::all_simplices;
};

/// Interior simplices meeting the closed segment [a, b].
CrackSet segment_crack(const TriangulationMesh& mesh, Vec2 a, Vec2 b);

/// lambda of the discrete neighborhood of the simplices cut by a prescribed
/// segment, against the stadium value L + pi eps / 2, per eps.  Throws
/// std::invalid_argument if the segment leaves the body or the eps list is
/// not strictly decreasing.
StudyReport tube_convergence_study(const TubeStudyConfig& cfg);

struct BarStudyConfig {
  std::vector<double> eps{0.08, 0.04, 0.02};
  double kappa = 1.0;
  double t_max = 2.0;
  int m = 6;
  ResolutionCoupling coupling;
  MinimizeStrategy strategy;
  VolumeConvention convention = VolumeConvention::all_simplices;
  int threads = 1;
  std::vector<double> goodset_times{0.25, 1.0};
};

struct GoodSetRow {
  double eps = 0.0;
  double t = 0.0;
  bool post_rupture = false;
  double l1_difference = 0.0;
  double good_area = 0.0;
  double excluded_area = 0.0;
};

struct BarStudyResult {
  StudyReport report;
  std::vector<EvolutionTrajectory> runs;  // states kept at the good-set times
  std::vector<GoodSetRow> goodset;
};

/// Uniform bar on the unit square, collar left and right, g = t_max t x.
/// Rows carry the rupture node time against sqrt(kappa) / t_max; runs
/// without rupture are censored.
BarStudyResult bar_rupture_study(const BarStudyConfig& cfg);

/// L1 distance on the good set (intersected with the body) between each
/// bar run and its limit: t_max t x before rupture, the boundary trace of
/// the side each component is clamped to afterwards.  `times` must be grid
/// nodes of every run; runs need kept states.
std::vector<GoodSetRow> goodset_convergence_check(const std::vector<EvolutionTrajectory>& runs,
                                                  const std::vector<double>& times);

struct GrowthRow {
  std::uint64_t seed = 0;
  std::size_t points = 0;
  GrowthCheck check;
};

struct GrowthStudyConfig {
  std::uint64_t seed = 1;
  int clouds = 100;
  std::vector<std::pair<double, double>> radii{{0.01, 0.02}, {0.02, 0.02}};
  double constant = 1.0;
  int max_points = 40;
  double spread = 0.1;  // side of the square the points are drawn from
};

/// Random point clouds seeded from cfg.seed; one row per (cloud, radii).
std::vector<GrowthRow> growth_study(const GrowthStudyConfig& cfg);

/// Smallest constant making every ratio of a held-out cloud set satisfy the
/// growth bound, ratio / ((r + r') / r)^2 maximized over the rows.
double calibrate_growth_constant(const GrowthStudyConfig& held_out);

}  // namespace ef
