// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "eigenfracture/evolution.hpp"
#include "eigenfracture/experiments.hpp"

namespace ef {

inline constexpr const char* kLedgerSchema = "eigenfracture.ledger v1";
inline constexpr const char* kStudySchema = "eigenfracture.study v1";

/// %.17g, so values round-trip.
std::string format_number(double v);

/// Streaming ledger: one schema line, the column header, then one row per
/// node as it completes.
class LedgerWriter {
 public:
  LedgerWriter(std::ostream& out, std::uint64_t config_hash);
  void write(const NodeRecord& node);

 private:
  std::ostream* out_;
};

void write_ledger(std::ostream& out, const EvolutionTrajectory& traj, std::uint64_t config_hash);

/// Legacy ASCII VTK 3.0 unstructured grid of the whole mesh: point data u,
/// cell data broken, |gamma|, neighborhood membership and good-set flag.
void write_vtk(std::ostream& out, const Problem& problem, const StepResult& state, double t);

void write_study_csv(std::ostream& out, const StudyReport& report);
void write_study_summary(std::ostream& out, const StudyReport& report, const std::vector<std::string>& notes);
void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows, std::uint64_t config_hash);
void write_goodset_csv(std::ostream& out, const std::vector<GoodSetRow>& rows, std::uint64_t config_hash);
void write_simultaneous_csv(std::ostream& out, const std::vector<SimultaneousRow>& rows, std::uint64_t config_hash);

}  // namespace ef
