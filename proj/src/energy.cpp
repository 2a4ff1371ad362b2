// SPDX-License-Identifier: Apache-2.0

#include "eigenfracture/energy.hpp"

#include "eigenfracture/error.hpp"

namespace ef {

EnergyBreakdown total_energy(const TriangulationMesh& mesh, const DisplacementField& u,
                             const EigenField& gamma, const CrackSet& precrack,
                             const EnergyParams& params, const NeighborhoodLedger& ledger) {
  CrackSet expected = precrack;
  expected.insert_all(gamma.support());
  if (!(expected == ledger.broken()))
    throw ContractError("total_energy: ledger does not match precrack and eigenstrain support");

  EnergyBreakdown e;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior) continue;
    e.elastic += mesh.area(s) * params.c.q(mesh.gradient(s, u.values) - gamma.values[s]);
  }
  const double vol = ledger.volume();
  e.surface = surface_energy(vol, params);
  e.lambda = vol / (2.0 * params.eps);
  e.total = e.elastic + e.surface;
  return e;
}

double work_increment(const TriangulationMesh& mesh, const DisplacementField& u, const EigenField& gamma,
                      const BoundaryLoad& load, double t0, double t1, const Stiffness& c) {
  const auto g0 = interpolate_boundary(load, mesh, t0);
  auto dg = interpolate_boundary(load, mesh, t1);
  for (std::size_t v = 0; v < dg.size(); ++v) dg[v] -= g0[v];
  double w = 0.0;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior) continue;
    const Vec2 strain = mesh.gradient(s, u.values) - gamma.values[s];
    w += mesh.area(s) * dot(strain, c.apply(mesh.gradient(s, dg)));
  }
  return 2.0 * w;
}

double work_increment_left(const TriangulationMesh& mesh, const DisplacementField& u,
                           const EigenField& gamma, const BoundaryLoad& load, double t0, double t1,
                           const Stiffness& c) {
  const auto rate = interpolate_rate(load, mesh, t0);
  double w = 0.0;
  const int ns = static_cast<int>(mesh.num_simplices());
  for (int s = 0; s < ns; ++s) {
    if (mesh.label(s) != Region::interior) continue;
    const Vec2 strain = mesh.gradient(s, u.values) - gamma.values[s];
    w += mesh.area(s) * dot(strain, c.apply(mesh.gradient(s, rate)));
  }
  return 2.0 * (t1 - t0) * w;
}

double griffith_reference(const TriangulationMesh& mesh, const DisplacementField& u, double crack_length,
                          double kappa, const Stiffness& c) {
  CrackSet none(mesh.num_simplices());
  return elastic_energy(mesh, u, none, c) + kappa * crack_length;
}

}  // namespace ef
