// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "eigenfracture/geometry.hpp"
#include "eigenfracture/mesh.hpp"

namespace ef {

/// Symmetric 2x2 elasticity tensor of the antiplane model, Q(F) = F.C F.
struct Stiffness {
  double c11 = 1.0, c12 = 0.0, c22 = 1.0;

  bool spd() const { return c11 > 0.0 && c11 * c22 - c12 * c12 > 0.0; }
  Vec2 apply(Vec2 f) const { return {c11 * f.x + c12 * f.y, c12 * f.x + c22 * f.y}; }
  double q(Vec2 f) const { return dot(f, apply(f)); }
  double max_eigenvalue() const;
};

/// Nodal P1 displacement over all mesh vertices.
struct DisplacementField {
  std::vector<double> values;
};

/// One constant vector per simplex.
struct EigenField {
  std::vector<Vec2> values;

  std::vector<int> support() const;
};

enum class LoadKind : std::uint8_t { zero, uniform_stretch, shear_ramp, affine_ramp, quadratic };

/// Analytic boundary displacement g(t, x) with closed-form time derivative.
///   uniform_stretch  g = a t x
///   shear_ramp       g = a t y
///   affine_ramp      g = (c0 + c1 x + c2 y) t^p
///   quadratic        g = a t x^2
struct BoundaryLoad {
  LoadKind kind = LoadKind::zero;
  double amplitude = 1.0;
  double c0 = 0.0, c1 = 1.0, c2 = 0.0;
  double power = 1.0;

  double value(double t, Vec2 x) const;
  double rate(double t, Vec2 x) const;

  static BoundaryLoad zero() { return {}; }
  static BoundaryLoad stretch(double a) { return {LoadKind::uniform_stretch, a}; }
};

LoadKind parse_load_kind(const std::string& name);
std::string to_string(LoadKind kind);

/// Nodal values g(t, x_v) at every vertex.
std::vector<double> interpolate_boundary(const BoundaryLoad& load, const TriangulationMesh& mesh,
                                         double t);
/// Nodal values of the time derivative of g at every vertex.
std::vector<double> interpolate_rate(const BoundaryLoad& load, const TriangulationMesh& mesh,
                                     double t);

class ElasticSystem;
struct SolveReport;

/// Degree-of-freedom layout and sparsity pattern over one mesh.  Free
/// nodes are body vertices that do not touch the collar; collar vertices
/// carry the boundary trace.  Built once and shared by every assembly.
class FemContext {
 public:
  explicit FemContext(const TriangulationMesh& mesh);

  const TriangulationMesh& mesh() const { return *mesh_; }
  std::size_t num_free() const { return free_vertex_.size(); }
  int dof(int vertex) const { return dof_[vertex]; }
  int free_vertex(int dof) const { return free_vertex_[dof]; }

 private:
  friend class ElasticSystem;
  friend ElasticSystem assemble(const FemContext&, const CrackSet&, const Stiffness&);
  friend DisplacementField solve_displacement(const ElasticSystem&, const BoundaryLoad&, double,
                                              const DisplacementField*, const DisplacementField*,
                                              SolveReport*);

  const TriangulationMesh* mesh_;
  std::vector<int> dof_;          // vertex -> free dof or -1
  std::vector<int> free_vertex_;  // free dof -> vertex
  std::vector<int> ff_rows_, ff_cols_;
  std::vector<int> fc_rows_, fc_cols_;  // fc columns are vertex ids
  // Per interior simplex and local pair (a, b): slot in ff (>= 0), slot in
  // fc encoded as -(slot + 2), or -1 when row a is not free.
  std::vector<std::array<int, 9>> scatter_;
};

struct SolveReport {
  int iterations = 0;
  double relative_residual = 0.0;
  bool preconditioned = false;
};

/// Stiffness over free nodes from unbroken interior simplices, plus the
/// free-to-collar coupling and the floating components of the free graph.
class ElasticSystem {
 public:
  const FemContext& context() const { return *ctx_; }
  const CrackSet& crack() const { return crack_; }
  const Stiffness& stiffness() const { return c_; }
  const std::vector<std::vector<int>>& floating() const { return floating_; }
  bool active(int dof) const { return active_[dof] != 0; }

  /// y = K x over active free dofs (inactive entries of x are ignored).
  void multiply(std::span<const double> x, std::span<double> y) const;
  /// Entry (i, j) of the free-free block, for tests.
  double entry(int i, int j) const;

  friend ElasticSystem assemble(const FemContext&, const CrackSet&, const Stiffness&);

 private:
  const FemContext* ctx_ = nullptr;
  CrackSet crack_;
  Stiffness c_;
  std::vector<double> ff_vals_, fc_vals_, diag_;
  std::vector<std::vector<int>> floating_;  // lists of free dofs
  std::vector<std::uint8_t> active_;

  friend DisplacementField solve_displacement(const ElasticSystem&, const BoundaryLoad&, double,
                                              const DisplacementField*, const DisplacementField*,
                                              SolveReport*);
};

/// Throws std::invalid_argument if C is not SPD and ContractError if the
/// crack contains a non-interior simplex.
ElasticSystem assemble(const FemContext& ctx, const CrackSet& crack, const Stiffness& c);

/// Minimizes the elastic energy off the crack subject to u = g_h(t) on the
/// collar.  Conjugate gradients to relative residual 1e-10, retried with
/// Jacobi preconditioning; floating components get the mean of `prev` (or
/// 0).  `guess` seeds the iteration.  Throws SolverError on failure.
DisplacementField solve_displacement(const ElasticSystem& system, const BoundaryLoad& load, double t,
                                     const DisplacementField* prev = nullptr,
                                     const DisplacementField* guess = nullptr,
                                     SolveReport* report = nullptr);

/// gamma = grad u on crack simplices, 0 elsewhere.
EigenField optimal_gamma(const TriangulationMesh& mesh, const DisplacementField& u,
                         const CrackSet& crack);

/// Sum over interior simplices outside the crack of area * Q(grad u).
double elastic_energy(const TriangulationMesh& mesh, const DisplacementField& u, const CrackSet& crack,
                      const Stiffness& c);

}  // namespace ef
