#pragma once

#include "porofick/convex_solvers.hpp"
#include "porofick/materials.hpp"
#include "porofick/poro_functional.hpp"
#include "porofick/problem.hpp"

#include <optional>

namespace porofick {

struct StaticSolution {
  Vec u;         // node-major
  Vec c;         // component-major
  Conc mu_bar;   // one multiplier per component
  Vec phi;       // inner nodes (charged only)
  Vec phi_box;   // all box nodes (charged only)
  double objective = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  double feasibility = 0.0;
  std::vector<double> history;
};

/// Tighter default than SolverOptions for the domain solves: the gradient
/// entries carry the lumped nodal masses.
SolverOptions default_domain_options();

/// Minimizes the discrete free energy minus work of the loads under
/// int c_k = C_total_k. The multiplier is the constant chemical potential.
/// `initial` must be strictly feasible for the barrier; by default the
/// uniform state C_total / |Omega| is used.
StaticSolution solve_static_isolated(const Mesh& mesh, const FreeEnergy& model, const Loads& loads,
                                     const Conc& c_total,
                                     const SolverOptions& opts = default_domain_options(),
                                     const std::optional<Vec>& initial = std::nullopt);

/// mu = mu_bar everywhere: minimizes the functional with the constant
/// potential, which eliminates c through the conjugate relation node by node.
StaticSolution solve_static_equilibrated(const Mesh& mesh, const FreeEnergy& model,
                                         const Loads& loads, const Conc& mu_bar,
                                         const SolverOptions& opts = default_domain_options());

/// Charged isolated body. The potential is eliminated by a box Poisson solve
/// inside every objective evaluation; mu_bar is then the constant
/// electrochemical potential d_c phi + z phi.
StaticSolution solve_static_charged(const Mesh& mesh, const FreeEnergy& model,
                                    const ChargeModel& charges, const Loads& loads,
                                    const Conc& c_total,
                                    const SolverOptions& opts = default_domain_options(),
                                    const std::optional<Vec>& initial = std::nullopt);

/// Value of the electrostatic saddle Lagrangian
///   int phi(e,c) - mu~.c - f.u + (z.c - z_DOP) phi + z_DOP grad phi.u - eps/2 |grad phi|^2 - g.u
/// at (u, c, phi) with phi given on the free box nodes.
double saddle_lagrangian(const PoroFunctional& functional, const Vec& x, const Vec& phi_free);

}  // namespace porofick
