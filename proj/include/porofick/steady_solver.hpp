#pragma once

#include "porofick/convex_solvers.hpp"
#include "porofick/materials.hpp"
#include "porofick/poro_functional.hpp"
#include "porofick/problem.hpp"

#include <deque>
#include <optional>
#include <vector>

namespace porofick {

struct SteadyOptions {
  double damping = 0.7;  // omega in mu~ <- (1 - omega) mu~ + omega mu
  double fp_tol = 1e-8;
  int max_outer = 200;
  bool anderson = false;
  int anderson_window = 3;
  SolverOptions inner;

  SteadyOptions();
  void validate() const;
};

struct SteadyState {
  FieldState fields;
  Vec mu_tilde;            // last input of the (u,c) problem
  int outer_iterations = 0;
  double fp_residual = 0.0;
  bool converged = false;
  std::vector<double> history;            // fp residual per outer iteration
  std::vector<double> objective_history;  // inner objective per outer iteration
};

/// Discrete H1 norm v^T (K + M) v with unit coefficients.
class H1Norm {
 public:
  explicit H1Norm(const Mesh& mesh);
  double operator()(const Vec& v) const;  // v may stack several nodal fields

 private:
  SpMat gram_;
};

/// Damped Picard update with an optional type-II Anderson acceleration.
class FixedPointMixer {
 public:
  FixedPointMixer(double damping, bool anderson, int window);
  /// Next input from the current input x and the map value g = G(x).
  Vec update(const Vec& x, const Vec& g);

 private:
  double damping_;
  bool anderson_;
  int window_;
  std::optional<Vec> last_x_, last_f_;
  std::deque<Vec> dx_, df_;
};

struct InnerResult {
  Vec x;  // packed (u, c)
  Vec u, c;
  Vec phi_free;  // charged only
  double objective = 0.0;
  int iterations = 0;
};

/// Minimizer of the (u,c) functional at the given mu~ (and temperature set
/// on the functional). `warm` must be strictly feasible when given.
InnerResult inner_minimize_uc(PoroFunctional& functional, const Vec& mu_tilde,
                              const SolverOptions& opts, const std::optional<Vec>& warm = std::nullopt);
InnerResult inner_minimize_uc(const Mesh& mesh, const FreeEnergy& model, const Vec& mu_tilde,
                              const Loads& loads, const SolverOptions& opts);

/// Weak solution of div(M(c,theta) grad mu) + r = 0 with the Robin condition
/// M grad mu.n + alpha mu = alpha mu_ext, one solve per component. Element
/// mobilities use the element mean of c and theta; the Robin and reaction
/// terms are lumped.
Vec inner_solve_mu(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                   const BoundaryData& boundary, bool with_reaction = true,
                   const Vec* theta = nullptr);

/// Element-wise mobility stiffness of component k.
SpMat mobility_stiffness(const Mesh& mesh, const TransportModel& transport, int k, const Vec& c,
                         const Vec* theta = nullptr);

struct EnergyBalance {
  double dissipation = 0.0;  // int M grad mu.grad mu + int alpha mu^2
  double power = 0.0;        // int alpha mu_ext mu + int r.mu
  double relative_residual() const;
};

EnergyBalance steady_energy_balance(const Mesh& mesh, const TransportModel& transport,
                                    const BoundaryData& boundary, const Vec& c, const Vec& mu,
                                    bool with_reaction = true, const Vec* theta = nullptr);

/// Fixed point mu~ -> (u,c) -> mu. The initial mu~ solves the mu problem at
/// c = c_eq.
SteadyState solve_steady(const Mesh& mesh, const FreeEnergy& model, const TransportModel& transport,
                         const BoundaryData& boundary, const Loads& loads,
                         const SteadyOptions& opts = {},
                         const std::optional<Vec>& initial_mu = std::nullopt);

/// Charged multi-component variant: the inner saddle problem is solved with
/// the potential eliminated and the mu problem carries the reaction source.
SteadyState solve_steady_charged(const Mesh& mesh, const FreeEnergy& model,
                                 const TransportModel& transport, const ChargeModel& charges,
                                 const BoundaryData& boundary, const Loads& loads,
                                 const SteadyOptions& opts = {},
                                 const std::optional<Vec>& initial_mu = std::nullopt);

struct UniquenessIdentity {
  double lhs = 0.0;  // monotone part + int eps |grad phi_12|^2
  double rhs = 0.0;  // int mu~_12 . c_12
};

/// Energy identity obtained by subtracting the optimality systems of two
/// inner solutions x1, x2 (with their mu~) and testing with the differences.
UniquenessIdentity uniqueness_identity(const PoroFunctional& functional, const Vec& x1,
                                       const Vec& mu_tilde1, const Vec& x2, const Vec& mu_tilde2);

}  // namespace porofick
