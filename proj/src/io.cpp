// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/io.hpp"

#include <cmath>
#include <cstdio>

#include "eigenfracture/config.hpp"

namespace ef {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

LedgerWriter::LedgerWriter(std::ostream& out, std::uint64_t config_hash) : out_(&out) {
  *out_ << "# schema: " << kLedgerSchema << " config: " << hex64(config_hash) << '\n'
        << "node,t,elastic,surface,lambda,cumulative_work,balance_defect,crack_size,rupture\n";
}

void LedgerWriter::write(const NodeRecord& n) {
  *out_ << n.index << ',' << format_number(n.t) << ',' << format_number(n.energy.elastic) << ','
        << format_number(n.energy.surface) << ',' << format_number(n.energy.lambda) << ','
        << format_number(n.cumulative_work) << ',' << format_number(n.balance_defect) << ',' << n.crack.size()
        << ',' << (n.rupture ? 1 : 0) << '\n';
}

void write_ledger(std::ostream& out, const EvolutionTrajectory& traj, std::uint64_t config_hash) {
  LedgerWriter w(out, config_hash);
  for (const auto& n : traj.nodes) w.write(n);
}

void write_vtk(std::ostream& out, const Problem& problem, const StepResult& state, double t) {
  const auto& mesh = *problem.mesh;
  const std::size_t nv = mesh.num_vertices(), ns = mesh.num_simplices();
  out << "# vtk DataFile Version 3.0\n"
      << "eigenfracture t=" << format_number(t) << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (std::size_t v = 0; v < nv; ++v) {
    const Vec2 p = mesh.vertex(static_cast<int>(v));
    out << format_number(p.x) << ' ' << format_number(p.y) << " 0\n";
  }
  out << "CELLS " << ns << ' ' << 4 * ns << '\n';
  for (std::size_t s = 0; s < ns; ++s) {
    const auto& tri = mesh.simplex(static_cast<int>(s));
    out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  out << "CELL_TYPES " << ns << '\n';
  for (std::size_t s = 0; s < ns; ++s) out << "5\n";

  out << "POINT_DATA " << nv << "\nSCALARS u double 1\nLOOKUP_TABLE default\n";
  for (double u : state.u.values) out << format_number(u) << '\n';

  std::vector<std::uint8_t> covered(ns, 0), good(ns, 0);
  if (state.ledger) {
    for (std::size_t s = 0; s < ns; ++s) covered[s] = state.ledger->covered(static_cast<int>(s));
  } else {
    for (int s : discrete_neighborhood(*problem.index, state.crack, problem.params.eps)) covered[s] = 1;
  }
  for (int s : good_set(*problem.index, state.crack, problem.params.eps)) good[s] = 1;

  out << "CELL_DATA " << ns << "\nSCALARS broken int 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < ns; ++s) out << (state.crack.contains(static_cast<int>(s)) ? 1 : 0) << '\n';
  out << "SCALARS gamma_norm double 1\nLOOKUP_TABLE default\n";
  for (const Vec2& g : state.gamma.values) out << format_number(std::hypot(g.x, g.y)) << '\n';
  out << "SCALARS neighborhood int 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < ns; ++s) out << int(covered[s]) << '\n';
  out << "SCALARS goodset int 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < ns; ++s) out << int(good[s]) << '\n';
  out << "SCALARS region int 1\nLOOKUP_TABLE default\n";
  for (std::size_t s = 0; s < ns; ++s) out << static_cast<int>(mesh.label(static_cast<int>(s))) << '\n';
}

namespace {

std::string optional_number(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace

void write_study_csv(std::ostream& out, const StudyReport& report) {
  out << "# schema: " << kStudySchema << " study: " << report.study_id << " config: " << hex64(report.config_hash)
      << '\n'
      << "eps,h,m,lambda,reference,rel_error,length,rel_error_length,rupture_time,censored\n";
  for (const auto& r : report.rows)
    out << format_number(r.eps) << ',' << format_number(r.h) << ',' << r.m << ',' << format_number(r.lambda) << ','
        << format_number(r.reference) << ',' << format_number(r.rel_error) << ',' << format_number(r.length) << ','
        << format_number(r.rel_error_length) << ',' << optional_number(r.rupture_time) << ','
        << (r.censored ? 1 : 0) << '\n';
}

void write_study_summary(std::ostream& out, const StudyReport& report, const std::vector<std::string>& notes) {
  char line[256];
  out << "study " << report.study_id << "  config " << hex64(report.config_hash) << '\n';
  std::snprintf(line, sizeof line, "%10s %10s %4s %12s %12s %10s %12s %9s\n", "eps", "h", "m", "lambda", "reference",
                "rel_err", "rupture", "time[s]");
  out << line;
  for (const auto& r : report.rows) {
    char rup[32] = "-";
    if (r.rupture_time) std::snprintf(rup, sizeof rup, "%.6f", *r.rupture_time);
    else if (r.censored) std::snprintf(rup, sizeof rup, "censored");
    std::snprintf(line, sizeof line, "%10.4g %10.4g %4d %12.6f %12.6f %10.4f %12s %9.2f\n", r.eps, r.h, r.m, r.lambda,
                  r.reference, r.rel_error, rup, r.runtime_s);
    out << line;
  }
  for (const auto& n : notes) out << n << '\n';
}

void write_growth_csv(std::ostream& out, const std::vector<GrowthRow>& rows, std::uint64_t config_hash) {
  out << "# schema: " << kStudySchema << " study: growth config: " << hex64(config_hash) << '\n'
      << "seed,points,r,r_prime,vol_r,vol_grown,ratio,constant,bound,satisfied\n";
  for (const auto& r : rows) {
    const auto& c = r.check;
    out << r.seed << ',' << r.points << ',' << format_number(c.r) << ',' << format_number(c.r_prime) << ','
        << format_number(c.vol_r) << ',' << format_number(c.vol_grown) << ',' << format_number(c.ratio) << ','
        << format_number(c.constant) << ',' << format_number(c.bound) << ',' << (c.satisfied() ? 1 : 0) << '\n';
  }
}

void write_goodset_csv(std::ostream& out, const std::vector<GoodSetRow>& rows, std::uint64_t config_hash) {
  out << "# schema: " << kStudySchema << " study: goodset config: " << hex64(config_hash) << '\n'
      << "eps,t,post_rupture,l1_difference,good_area,excluded_area\n";
  for (const auto& r : rows)
    out << format_number(r.eps) << ',' << format_number(r.t) << ',' << (r.post_rupture ? 1 : 0) << ','
        << format_number(r.l1_difference) << ',' << format_number(r.good_area) << ','
        << format_number(r.excluded_area) << '\n';
}

void write_simultaneous_csv(std::ostream& out, const std::vector<SimultaneousRow>& rows, std::uint64_t config_hash) {
  out << "# schema: " << kStudySchema << " study: simultaneous config: " << hex64(config_hash) << '\n'
      << "eps,h,m,node,t,lambda,rupture_time\n";
  for (const auto& r : rows) {
    const std::size_t n = r.lambda_series.size();
    for (std::size_t i = 0; i < n; ++i)
      out << format_number(r.eps) << ',' << format_number(r.h) << ',' << r.m << ',' << i << ','
          << format_number(n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0) << ','
          << format_number(r.lambda_series[i]) << ',' << optional_number(r.rupture_time) << '\n';
  }
}

}  // namespace ef
