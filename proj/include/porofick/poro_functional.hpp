#pragma once

#include "porofick/convex_solvers.hpp"
#include "porofick/electrostatics.hpp"
#include "porofick/materials.hpp"
#include "porofick/problem.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace porofick {

/// Unknown layout x = [free displacement dofs; c component-major].
class DofMap {
 public:
  DofMap(const Mesh& mesh, int components);

  Index size() const { return num_u_ + components_ * nodes_; }
  Index num_u() const { return num_u_; }
  Index nodes() const { return nodes_; }
  int components() const { return components_; }
  int dim() const { return dim_; }
  /// Free dof of displacement component a at node i, or -1 on Dirichlet nodes.
  Index u_dof(Index node, int a) const { return u_dof_[static_cast<size_t>(dim_ * node + a)]; }
  Index c_dof(int k, Index node) const { return num_u_ + k * nodes_ + node; }

  Vec pack(const Vec& u, const Vec& c) const;
  Vec unpack_u(const Vec& x) const;  // node-major, zeros on Dirichlet nodes
  Vec unpack_c(const Vec& x) const { return x.tail(components_ * nodes_); }

 private:
  int dim_, components_;
  Index nodes_, num_u_ = 0;
  std::vector<Index> u_dof_;
};

/// Small-strain Voigt strain of a P1 displacement on element e.
Voigt element_strain(const Mesh& mesh, Index e, const Vec& u);
/// Lumped-mass weighted average of the element strains around each node.
std::vector<Voigt> nodal_strain(const Mesh& mesh, const Vec& u);

/// Discrete functional
///   sum_K sum_{i in K} |K|/(d+1) phi(e(u)|_K, c_i, theta_i) - sum_i m_i mu~_i.c_i
///   - f.u - g.u  [+ 1/2 q^T A_eps^{-1} q]
/// over (u,c). The c-dependent terms use vertex quadrature so that the
/// optimality conditions are nodal. The bracketed term is the eliminated
/// electrostatic energy with q = Q c + P u - d.
class PoroFunctional : public ConvexObjective {
 public:
  PoroFunctional(const Mesh& mesh, const FreeEnergy& model, const Loads& loads,
                 const ChargeModel* charges = nullptr);

  const DofMap& dofs() const { return dofs_; }
  const Mesh& mesh() const { return *mesh_; }
  const FreeEnergy& model() const { return *model_; }
  bool charged() const { return poisson_ != nullptr; }
  const BoxPoisson* poisson() const { return poisson_.get(); }

  /// mu~ component-major (N nodes entries); zero by default.
  void set_mu_tilde(const Vec& mu);
  /// Nodal temperature; zero by default.
  void set_theta(const Vec& theta);
  const Vec& theta() const { return theta_; }
  const Vec& mu_tilde() const { return mu_tilde_; }
  /// Work vector of f and g on the free displacement dofs.
  const Vec& load_vector() const { return load_u_; }

  Index size() const override { return dofs_.size(); }
  double value(const Vec& x) const override;
  Vec gradient(const Vec& x) const override;
  NewtonModel hessian(const Vec& x) const override;
  double max_step(const Vec& x, const Vec& dx) const override;

  /// Nodal lumped-mass weights, the content map row for component k.
  Mat content_matrix() const;
  /// Feasible point with u = 0 and the given per-component nodal value.
  Vec uniform_point(const Conc& c) const;

  /// Free-node potential on the padding box for state x (charged only).
  Vec potential(const Vec& x) const;

  /// Nodal d_c phi(e_bar_i, c_i) with e_bar the nodal average strain.
  Vec nodal_chemical_potential(const Vec& x) const;

 private:
  const Mesh* mesh_;
  const FreeEnergy* model_;
  Loads loads_;
  DofMap dofs_;
  Vec mu_tilde_, theta_;
  Vec load_u_;  // f and g assembled on free dofs
  std::shared_ptr<const BoxPoisson> poisson_;
  SpMat coupling_;  // q = coupling x - d

  Voigt strain(Index e, const Vec& u) const;
  Conc nodal_c(const Vec& c, Index i) const;
};

}  // namespace porofick
