#pragma once

#include "porofick/convex_solvers.hpp"
#include "porofick/materials.hpp"
#include "porofick/mesh_fem.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace porofick {

/// Poisson operator -div(eps grad .) on the padding box with phi = 0 on the
/// box boundary, together with the linear maps that build the weak charge
///   q = Q c + P u - d,   (Q c)_j = int z.c psi_j (lumped),
///   (P u)_j = int z_DOP u.grad psi_j,  d_j = int z_DOP psi_j,
/// so that A phi = q is the discrete form of
/// div(eps grad phi) + z.c = z_DOP + div(z_DOP u).
class BoxPoisson {
 public:
  BoxPoisson(const Mesh& mesh, const ChargeModel& charges, int components);

  const Mesh& box() const { return *box_; }
  const Mesh& inner() const { return *inner_; }
  Index num_free() const { return static_cast<Index>(free_nodes_.size()); }
  /// Box node of free index j.
  Index free_node(Index j) const { return free_nodes_[static_cast<size_t>(j)]; }

  const SpMat& stiffness() const { return A_; }
  const SpMat& charge_matrix() const { return Q_; }        // free x (N nodes), component-major
  const SpMat& displacement_matrix() const { return P_; }  // free x (d nodes), node-major
  const Vec& dopand_vector() const { return d_; }

  Vec charge(const Vec& c, const Vec& u) const;
  /// Free-node values of A^{-1} q.
  Vec solve(const Vec& q) const;
  /// Free-node values to all box nodes.
  Vec extend(const Vec& free) const;
  /// All-box-node values restricted to the inner mesh.
  Vec restrict_inner(const Vec& box_values) const;
  /// Permittivity on box element e.
  double permittivity(Index e) const { return eps_[static_cast<size_t>(e)]; }

 private:
  std::shared_ptr<const Mesh> box_;
  const Mesh* inner_;
  const PaddingBox* pad_;
  std::vector<Index> free_nodes_;
  std::vector<Index> box_to_free_;
  std::vector<double> eps_;
  SpMat A_, Q_, P_;
  Vec d_;
  std::shared_ptr<const NewtonSystem> factor_;
};

struct ElectrostaticField {
  Vec phi_box;                 // all box nodes
  Vec phi;                     // inner mesh nodes
  std::vector<Point> d_vec;    // eps grad phi per box element
  double d_norm = 0.0;         // L2 norm of d_vec over the box
  double charge_residual = 0.0;
};

/// Solves the truncated whole-space Poisson problem for given (c,u).
/// Throws MeshError when the mesh carries no padding box.
ElectrostaticField solve_truncated_poisson(const Mesh& mesh, const ChargeModel& charges,
                                           int components, const Vec& c, const Vec& u);

/// sqrt(q^T G^{-1} q) with q the weak net charge z.c - z_DOP - div(z_DOP u)
/// and G the unit-coefficient H1 Gram matrix (stiffness + mass) on the free
/// box nodes.
double charge_residual_norm(const BoxPoisson& poisson, const Vec& c, const Vec& u);
double charge_residual_norm(const Mesh& mesh, const ChargeModel& charges, int components,
                            const Vec& c, const Vec& u);

struct ScanMember {
  double epsilon_hat = 0.0;
  double d_norm = 0.0;
  double charge_residual = 0.0;
};

struct ScanReport {
  std::vector<ScanMember> members;
  bool neutral = false;  // z == 0: slopes undefined
  double slope_d = 0.0;
  double slope_residual = 0.0;
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Runs one solve per scale and fits the slopes. `solve` receives the scaled
/// charge model and returns the member record; members may run concurrently
/// on up to `threads` workers, results keep the order of `epsilon_hats`.
ScanReport electroneutrality_scan(
    const ChargeModel& base, const std::vector<double>& epsilon_hats,
    const std::function<ScanMember(const ChargeModel&)>& solve, int threads = 1);

}  // namespace porofick
