#include "porofick/thermal_solver.hpp"

#include <cmath>

namespace porofick {

namespace {

SolverError precondition(const std::string& what) {
  return SolverError(SolverError::Kind::Precondition, "thermal_solver", what);
}

double element_mean(const Mesh& mesh, Index e, const Vec& v, Index offset = 0) {
  double s = 0.0;
  for (Index n : mesh.element(e)) s += v(offset + n);
  return s / mesh.nodes_per_element();
}

Conc element_mean_conc(const Mesh& mesh, Index e, const Vec& c, int n) {
  Conc out(n);
  for (int k = 0; k < n; ++k) out(k) = element_mean(mesh, e, c, k * mesh.num_nodes());
  return out;
}

void check_fields(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                  const Vec& mu) {
  const Index nn = mesh.num_nodes();
  const int n = transport.components();
  if (c.size() != n * nn || mu.size() != n * nn || theta_tilde.size() != nn)
    throw precondition("field sizes do not match the mesh");
  if (!mu.allFinite()) throw precondition("chemical potential is not bounded");
  if (transport.K0.size() == 0) throw precondition("heat conductivity is not set");
}

// Lumped per-node heat source h - mu.r.
Vec nodal_source(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                 const Vec& mu) {
  const Index nn = mesh.num_nodes();
  const int n = transport.components();
  Vec s(nn);
  for (Index i = 0; i < nn; ++i) {
    Conc ci(n), mi(n);
    for (int k = 0; k < n; ++k) {
      ci(k) = c(k * nn + i);
      mi(k) = mu(k * nn + i);
    }
    s(i) = transport.heat(ci, theta_tilde(i)) - mi.dot(transport.reaction(ci, theta_tilde(i)));
  }
  return mesh.lumped_mass().cwiseProduct(s);
}

}  // namespace

SpMat heat_matrix(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                  const BoundaryData& boundary) {
  const int n = transport.components();
  SpMat A = assemble_stiffness(mesh, [&](Index e) {
    return transport.conductivity(element_mean_conc(mesh, e, c, n), element_mean(mesh, e, theta_tilde));
  });
  const Vec g = boundary.gamma_weights(mesh);
  if (!(g.minCoeff() >= 0.0) || !(g.sum() > 0.0))
    throw precondition("gamma must be non-negative and positive on a part of the boundary");
  for (Index i = 0; i < mesh.num_nodes(); ++i) A.coeffRef(i, i) += g(i);
  return A;
}

Vec dissipation_load(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                     const Vec& mu) {
  const Index nn = mesh.num_nodes();
  const int d = mesh.dim();
  Vec D = Vec::Zero(nn);
  for (int k = 0; k < transport.components(); ++k) {
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const DMatrix M = transport.mobility(k, element_mean(mesh, e, c, k * nn), element_mean(mesh, e, theta_tilde));
      const auto& g = mesh.basis_gradients(e);
      auto nodes = mesh.element(e);
      Point grad = Point::Zero(d);
      double mean = 0.0;
      for (int a = 0; a < d + 1; ++a) {
        const double v = mu(k * nn + nodes[a]);
        grad += v * g.row(a).head(d).transpose();
        mean += v;
      }
      mean /= d + 1;
      const Point flux = mesh.measure(e) * (M * grad);
      for (int a = 0; a < d + 1; ++a) {
        const double km = g.row(a).head(d).dot(flux);  // (K_M^K mu)_a
        D(nodes[a]) += (mu(k * nn + nodes[a]) - mean) * km;
      }
    }
  }
  return D;
}

Vec solve_min_theta(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                    const Vec& mu, const BoundaryData& boundary) {
  check_fields(mesh, transport, c, theta_tilde, mu);
  if (transport.has_reaction()) throw precondition("the transformed heat problem requires r = 0");
  const Index nn = mesh.num_nodes();
  const int d = mesh.dim();
  const Vec a = boundary.alpha_weights(mesh);
  const Vec gw = boundary.gamma_weights(mesh);
  Vec rhs = gw.cwiseProduct(boundary.theta_ext_nodal(mesh)) + nodal_source(mesh, transport, c, theta_tilde, mu);
  for (int k = 0; k < transport.components(); ++k) {
    const Vec muk = mu.segment(k * nn, nn);
    // - int mu M grad mu . grad psi_j, exact for P1 mu and element-constant M
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      const DMatrix M = transport.mobility(k, element_mean(mesh, e, c, k * nn), element_mean(mesh, e, theta_tilde));
      const auto& g = mesh.basis_gradients(e);
      auto nodes = mesh.element(e);
      Point grad = Point::Zero(d);
      double mean = 0.0;
      for (int q = 0; q < d + 1; ++q) {
        grad += muk(nodes[q]) * g.row(q).head(d).transpose();
        mean += muk(nodes[q]);
      }
      mean /= d + 1;
      const Point flux = mesh.measure(e) * (M * grad);
      for (int q = 0; q < d + 1; ++q) rhs(nodes[q]) -= mean * g.row(q).head(d).dot(flux);
    }
    // boundary flux of mu M grad mu through the Robin condition of mu
    const Vec ext = boundary.mu_ext_nodal(mesh, k);
    for (Index i = 0; i < nn; ++i) rhs(i) += a(i) * muk(i) * (ext(i) - muk(i));
  }
  return solve_spd(heat_matrix(mesh, transport, c, theta_tilde, boundary), rhs);
}

Vec solve_heat_linear(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                      const Vec& mu, const BoundaryData& boundary) {
  check_fields(mesh, transport, c, theta_tilde, mu);
  const Vec rhs = boundary.gamma_weights(mesh).cwiseProduct(boundary.theta_ext_nodal(mesh)) +
                  dissipation_load(mesh, transport, c, theta_tilde, mu) +
                  nodal_source(mesh, transport, c, theta_tilde, mu);
  return solve_spd(heat_matrix(mesh, transport, c, theta_tilde, boundary), rhs);
}

double HeatBalance::relative_residual() const {
  const double scale = std::max({std::abs(sources), std::abs(boundary_loss), 1e-300});
  return std::abs(sources - boundary_loss) / scale;
}

HeatBalance heat_balance(const Mesh& mesh, const TransportModel& transport, const Vec& c, const Vec& theta_tilde,
                         const Vec& mu, const Vec& theta, const BoundaryData& boundary) {
  HeatBalance hb;
  hb.sources = dissipation_load(mesh, transport, c, theta_tilde, mu).sum() +
               nodal_source(mesh, transport, c, theta_tilde, mu).sum();
  hb.boundary_loss = boundary.gamma_weights(mesh).dot(theta - boundary.theta_ext_nodal(mesh));
  return hb;
}

namespace {

ThermalState run_thermal(PoroFunctional& functional, const TransportModel& transport, const BoundaryData& boundary,
                         const SteadyOptions& opts, bool transformed) {
  opts.validate();
  const Mesh& mesh = functional.mesh();
  const FreeEnergy& model = functional.model();
  const int n = model.components();
  const Index nn = mesh.num_nodes();
  if (transport.components() != n) throw precondition("transport and material disagree on the number of components");
  transport.validate(mesh.dim());
  if (static_cast<int>(boundary.mu_ext.size()) != n) throw precondition("mu_ext needs one entry per component");
  if (!mesh.has_tag(BoundaryTag::Dirichlet)) throw precondition("elasticity needs a Dirichlet boundary part");

  Vec theta_tilde = boundary.theta_ext_nodal(mesh);
  Vec ceq(n * nn);
  for (int k = 0; k < n; ++k) ceq.segment(k * nn, nn).setConstant(model.c_eq(k));
  Vec mu_tilde = inner_solve_mu(mesh, transport, ceq, boundary, true, &theta_tilde);

  const H1Norm norm(mesh);
  FixedPointMixer mixer(opts.damping, opts.anderson, opts.anderson_window);
  ThermalState st;
  std::optional<Vec> warm;
  for (int it = 1; it <= opts.max_outer; ++it) {
    functional.set_theta(theta_tilde);
    const InnerResult inner = inner_minimize_uc(functional, mu_tilde, opts.inner, warm);
    warm = inner.x;
    const Vec mu = inner_solve_mu(mesh, transport, inner.c, boundary, true, &theta_tilde);
    const Vec theta = transformed ? solve_min_theta(mesh, transport, inner.c, theta_tilde, mu, boundary)
                                  : solve_heat_linear(mesh, transport, inner.c, theta_tilde, mu, boundary);
    const double rm = norm(mu - mu_tilde), rt = norm(theta - theta_tilde);
    const double res = std::sqrt(rm * rm + rt * rt);
    st.history.push_back(res);
    st.objective_history.push_back(inner.objective);
    st.outer_iterations = it;
    st.fp_residual = res;
    st.fields.u = inner.u;
    st.fields.c = inner.c;
    st.fields.mu = mu;
    st.fields.theta = theta;
    st.mu_tilde = mu_tilde;
    st.theta_tilde = theta_tilde;
    st.heat_residual = heat_balance(mesh, transport, inner.c, theta_tilde, mu, theta, boundary).relative_residual();
    if (functional.charged()) {
      st.fields.phi_box = functional.poisson()->extend(inner.phi_free);
      st.fields.phi = functional.poisson()->restrict_inner(st.fields.phi_box);
    }
    if (res <= opts.fp_tol) {
      st.converged = true;
      break;
    }
    Vec stacked(mu.size() + nn), stacked_in(mu.size() + nn);
    stacked << mu, theta;
    stacked_in << mu_tilde, theta_tilde;
    const Vec next = mixer.update(stacked_in, stacked);
    mu_tilde = next.head(mu.size());
    theta_tilde = next.tail(nn);
  }
  return st;
}

}  // namespace

ThermalState solve_steady_thermal(const Mesh& mesh, const FreeEnergy& model, const TransportModel& transport,
                                  const BoundaryData& boundary, const Loads& loads, const SteadyOptions& opts) {
  if (model.components() != 1) throw precondition("the scalar thermal problem has one component");
  PoroFunctional f(mesh, model, loads);
  return run_thermal(f, transport, boundary, opts, true);
}

ThermalState solve_steady_charged_thermal(const Mesh& mesh, const FreeEnergy& model,
                                          const TransportModel& transport, const ChargeModel& charges,
                                          const BoundaryData& boundary, const Loads& loads,
                                          const SteadyOptions& opts) {
  if (!charges.neutral() && !mesh.padding()) throw MeshError("charged problems need a mesh with a padding box");
  PoroFunctional f(mesh, model, loads, &charges);
  ThermalState st = run_thermal(f, transport, boundary, opts, false);
  if (!f.charged()) {
    st.fields.phi = Vec::Zero(mesh.num_nodes());
    if (mesh.padding()) st.fields.phi_box = Vec::Zero(mesh.padding()->mesh->num_nodes());
  }
  return st;
}

MaximumPrincipleReport check_maximum_principle(const Mesh& mesh, const Vec& mu, const BoundaryData& boundary,
                                               int components, double tol) {
  if (components != 1) throw precondition("the maximum principle check is defined for one component");
  if (mu.size() != mesh.num_nodes()) throw precondition("mu has wrong size");
  const Vec a = boundary.alpha_weights(mesh);
  const Vec ext = boundary.mu_ext_nodal(mesh, 0);
  MaximumPrincipleReport r;
  r.lower = std::numeric_limits<double>::infinity();
  r.upper = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < mesh.num_nodes(); ++i)
    if (a(i) > 0.0) {
      r.lower = std::min(r.lower, ext(i));
      r.upper = std::max(r.upper, ext(i));
    }
  if (!std::isfinite(r.lower)) throw precondition("no Robin boundary nodes");
  r.margin = std::max(r.lower - mu.minCoeff(), mu.maxCoeff() - r.upper);
  r.pass = r.margin <= tol;
  return r;
}

}  // namespace porofick
