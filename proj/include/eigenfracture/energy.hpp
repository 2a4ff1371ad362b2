// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "eigenfracture/fem.hpp"
#include "eigenfracture/geometry.hpp"

namespace ef {

/// Material and regularization parameters of the eigenfracture energy.
struct EnergyParams {
  double eps = 0.08;
  double kappa = 1.0;
  Stiffness c;
};

struct EnergyBreakdown {
  double elastic = 0.0;
  double surface = 0.0;  // kappa / (2 eps) * volume
  double total = 0.0;
  double lambda = 0.0;  // volume / (2 eps)
};

/// Elastic part over interior simplices of Q(grad u - gamma) plus the
/// surface part from the ledger.  The ledger must hold exactly
/// precrack U support(gamma); ContractError otherwise.
EnergyBreakdown total_energy(const TriangulationMesh& mesh, const DisplacementField& u,
                             const EigenField& gamma, const CrackSet& precrack,
                             const EnergyParams& params, const NeighborhoodLedger& ledger);

/// Surface part for a given neighborhood volume.
inline double surface_energy(double volume, const EnergyParams& p) {
  return p.kappa / (2.0 * p.eps) * volume;
}

/// 2 * sum_T area * (grad u - gamma) . C (grad g_h(t1) - grad g_h(t0)) over
/// interior simplices: the state at t0 held fixed across [t0, t1] and the
/// time integral of the boundary rate taken exactly.
double work_increment(const TriangulationMesh& mesh, const DisplacementField& u, const EigenField& gamma,
                      const BoundaryLoad& load, double t0, double t1, const Stiffness& c);

/// Left-endpoint rule 2 (t1 - t0) sum_T area (grad u - gamma) . C grad(d_t g_h)(t0).
double work_increment_left(const TriangulationMesh& mesh, const DisplacementField& u,
                           const EigenField& gamma, const BoundaryLoad& load, double t0, double t1,
                           const Stiffness& c);

/// int_Omega Q(grad u) + kappa * crack_length.
double griffith_reference(const TriangulationMesh& mesh, const DisplacementField& u, double crack_length,
                          double kappa, const Stiffness& c);

}  // namespace ef
