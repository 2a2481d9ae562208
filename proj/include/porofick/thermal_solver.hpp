#pragma once

#include "porofick/steady_solver.hpp"

namespace porofick {

struct ThermalState : SteadyState {
  Vec theta_tilde;            // last frozen temperature
  double heat_residual = 0.0;  // relative global heat balance residual
};

/// Heat conduction matrix with Robin part: stiffness of K(c_mean, theta~_mean)
/// per element plus the lumped gamma boundary mass.
SpMat heat_matrix(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                  const Vec& theta_tilde, const BoundaryData& boundary);

/// Nodal dissipation load sum_K (mu_j - mean_K mu) (K_M^K mu)_j summed over
/// components. Its total equals int M grad mu.grad mu exactly.
Vec dissipation_load(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                     const Vec& theta_tilde, const Vec& mu);

/// Transformed heat problem div(K grad theta + mu M grad mu) + h = 0 with the
/// Robin data of theta and the chemical boundary flux carried by the
/// mu M grad mu term. Requires r = 0.
Vec solve_min_theta(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                    const Vec& theta_tilde, const Vec& mu, const BoundaryData& boundary);

/// div(K grad theta) + M grad mu : grad mu + h = mu.r with Robin data, all
/// coefficients frozen at (c, theta~).
Vec solve_heat_linear(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                      const Vec& theta_tilde, const Vec& mu, const BoundaryData& boundary);

struct HeatBalance {
  double sources = 0.0;        // int M grad mu:grad mu + h - mu.r
  double boundary_loss = 0.0;  // int gamma (theta - theta_ext)
  double relative_residual() const;
};

HeatBalance heat_balance(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                         const Vec& theta_tilde, const Vec& mu, const Vec& theta,
                         const BoundaryData& boundary);

/// Fixed point (mu~, theta~) -> (u,c) -> mu -> theta for one uncharged
/// component, theta from the transformed problem.
ThermalState solve_steady_thermal(const Mesh& mesh, const FreeEnergy& model,
                                  const TransportModel& transport, const BoundaryData& boundary,
                                  const Loads& loads, const SteadyOptions& opts = {});

/// Charged multi-component variant with the linear heat solve.
ThermalState solve_steady_charged_thermal(const Mesh& mesh, const FreeEnergy& model,
                                          const TransportModel& transport,
                                          const ChargeModel& charges, const BoundaryData& boundary,
                                          const Loads& loads, const SteadyOptions& opts = {});

struct MaximumPrincipleReport {
  bool pass = false;
  double lower = 0.0, upper = 0.0;  // Robin-data bounds
  double margin = 0.0;              // largest violation, <= 0 when inside
};

/// min mu_ext - tol <= mu <= max mu_ext + tol over the nodes, the data range
/// taken over the nodes carrying Robin weight. Scalar case only.
MaximumPrincipleReport check_maximum_principle(const Mesh& mesh, const Vec& mu,
                                               const BoundaryData& boundary, int components,
                                               double tol = 1e-9);

}  // namespace porofick
