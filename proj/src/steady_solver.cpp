#include "porofick/steady_solver.hpp"

#include "porofick/static_solver.hpp"

#include <Eigen/QR>

#include <cmath>

namespace porofick {

namespace {

SolverError precondition(const std::string& what) {
  return SolverError(SolverError::Kind::Precondition, "steady_solver", what);
}

Conc node_conc(const Vec& c, int n, Index nodes, Index i) {
  Conc out(n);
  for (int k = 0; k < n; ++k) out(k) = c(k * nodes + i);
  return out;
}

double element_mean(const Mesh& mesh, Index e, const Vec& field, Index offset = 0) {
  double s = 0.0;
  for (Index n : mesh.element(e)) s += field(offset + n);
  return s / mesh.nodes_per_element();
}

}  // namespace

SteadyOptions::SteadyOptions() { inner = default_domain_options(); }

void SteadyOptions::validate() const {
  if (!(damping > 0.0 && damping <= 1.0)) throw precondition("damping must lie in (0,1]");
  if (!(fp_tol > 0.0)) throw precondition("fp_tol must be positive");
  if (max_outer < 1) throw precondition("max_outer must be >= 1");
  if (anderson_window < 1) throw precondition("Anderson window must be >= 1");
  inner.validate();
}

H1Norm::H1Norm(const Mesh& mesh) : gram_(assemble_stiffness(mesh, 1.0) + assemble_mass(mesh)) {}

double H1Norm::operator()(const Vec& v) const {
  const Index n = gram_.rows();
  if (n == 0 || v.size() % n != 0) throw precondition("H1 norm: field size does not match the mesh");
  double s = 0.0;
  for (Index k = 0; k < v.size() / n; ++k) {
    const Vec seg = v.segment(k * n, n);
    s += seg.dot(gram_ * seg);
  }
  return std::sqrt(std::max(0.0, s));
}

FixedPointMixer::FixedPointMixer(double damping, bool anderson, int window)
    : damping_(damping), anderson_(anderson), window_(window) {}

Vec FixedPointMixer::update(const Vec& x, const Vec& g) {
  const Vec f = g - x;
  Vec next = x + damping_ * f;
  if (anderson_) {
    if (last_x_) {
      dx_.push_back(x - *last_x_);
      df_.push_back(f - *last_f_);
      if (static_cast<int>(dx_.size()) > window_) {
        dx_.pop_front();
        df_.pop_front();
      }
    }
    last_x_ = x;
    last_f_ = f;
    if (!dx_.empty()) {
      const Index m = static_cast<Index>(dx_.size());
      Mat dX(x.size(), m), dF(x.size(), m);
      for (Index j = 0; j < m; ++j) {
        dX.col(j) = dx_[static_cast<size_t>(j)];
        dF.col(j) = df_[static_cast<size_t>(j)];
      }
      Eigen::ColPivHouseholderQR<Mat> qr(dF);
      qr.setThreshold(1e-10);
      const Vec gamma = qr.solve(f);
      if (gamma.allFinite()) next = x + damping_ * f - (dX + damping_ * dF) * gamma;
    }
  }
  return next;
}

InnerResult inner_minimize_uc(PoroFunctional& functional, const Vec& mu_tilde, const SolverOptions& opts,
                              const std::optional<Vec>& warm) {
  functional.set_mu_tilde(mu_tilde);
  Vec x0;
  if (warm) {
    x0 = *warm;
  } else {
    const FreeEnergy& model = functional.model();
    Conc ceq(model.components());
    for (int k = 0; k < model.components(); ++k) ceq(k) = model.c_eq(k);
    x0 = functional.uniform_point(ceq);
  }
  const MinimizeResult r = minimize_convex(functional, x0, opts);
  InnerResult out;
  out.x = r.x;
  out.u = functional.dofs().unpack_u(r.x);
  out.c = functional.dofs().unpack_c(r.x);
  if (functional.charged()) out.phi_free = functional.potential(r.x);
  out.objective = r.value;
  out.iterations = r.iterations;
  return out;
}

InnerResult inner_minimize_uc(const Mesh& mesh, const FreeEnergy& model, const Vec& mu_tilde,
                              const Loads& loads, const SolverOptions& opts) {
  PoroFunctional f(mesh, model, loads);
  return inner_minimize_uc(f, mu_tilde, opts);
}

SpMat mobility_stiffness(const Mesh& mesh, const TransportModel& transport, int k, const Vec& c,
                         const Vec* theta) {
  const Index nn = mesh.num_nodes();
  return assemble_stiffness(mesh, [&](Index e) {
    const double cm = element_mean(mesh, e, c, k * nn);
    const double tm = theta ? element_mean(mesh, e, *theta) : 0.0;
    return transport.mobility(k, cm, tm);
  });
}

namespace {

Vec reaction_nodal(const Mesh& mesh, const TransportModel& transport, const Vec& c, int n, int k,
                   const Vec* theta) {
  const Index nn = mesh.num_nodes();
  Vec r(nn);
  for (Index i = 0; i < nn; ++i) r(i) = transport.reaction(node_conc(c, n, nn, i), theta ? (*theta)(i) : 0.0)(k);
  return r;
}

}  // namespace

Vec inner_solve_mu(const Mesh& mesh, const TransportModel& transport, const Vec& c,
                   const BoundaryData& boundary, bool with_reaction, const Vec* theta) {
  const int n = transport.components();
  const Index nn = mesh.num_nodes();
  if (c.size() != n * nn) throw precondition("concentration field has wrong size");
  const Vec a = boundary.alpha_weights(mesh);
  if (!(a.minCoeff() >= 0.0) || !(a.sum() > 0.0))
    throw precondition("alpha must be non-negative and positive on a part of the boundary");
  Vec mu(n * nn);
  for (int k = 0; k < n; ++k) {
    SpMat A = mobility_stiffness(mesh, transport, k, c, theta);
    for (Index i = 0; i < nn; ++i) A.coeffRef(i, i) += a(i);
    Vec rhs = a.cwiseProduct(boundary.mu_ext_nodal(mesh, k));
    if (with_reaction && transport.has_reaction())
      rhs += mesh.lumped_mass().cwiseProduct(reaction_nodal(mesh, transport, c, n, k, theta));
    mu.segment(k * nn, nn) = solve_spd(A, rhs);
  }
  return mu;
}

double EnergyBalance::relative_residual() const {
  const double scale = std::max({std::abs(dissipation), std::abs(power), 1e-300});
  return std::abs(dissipation - power) / scale;
}

EnergyBalance steady_energy_balance(const Mesh& mesh, const TransportModel& transport,
                                    const BoundaryData& boundary, const Vec& c, const Vec& mu,
                                    bool with_reaction, const Vec* theta) {
  const int n = transport.components();
  const Index nn = mesh.num_nodes();
  const Vec a = boundary.alpha_weights(mesh);
  EnergyBalance b;
  for (int k = 0; k < n; ++k) {
    const Vec mk = mu.segment(k * nn, nn);
    const SpMat K = mobility_stiffness(mesh, transport, k, c, theta);
    b.dissipation += mk.dot(K * mk) + (a.array() * mk.array().square()).sum();
    b.power += (a.array() * boundary.mu_ext_nodal(mesh, k).array() * mk.array()).sum();
    if (with_reaction && transport.has_reaction())
      b.power += (mesh.lumped_mass().array() * reaction_nodal(mesh, transport, c, n, k, theta).array() *
                  mk.array()).sum();
  }
  return b;
}

namespace {

SteadyState run_fixed_point(PoroFunctional& functional, const TransportModel& transport,
                            const BoundaryData& boundary, const SteadyOptions& opts,
                            const std::optional<Vec>& initial_mu) {
  opts.validate();
  const Mesh& mesh = functional.mesh();
  const FreeEnergy& model = functional.model();
  const int n = model.components();
  const Index nn = mesh.num_nodes();
  if (transport.components() != n) throw precondition("transport and material disagree on the number of components");
  transport.validate(mesh.dim());
  if (static_cast<int>(boundary.mu_ext.size()) != n) throw precondition("mu_ext needs one entry per component");
  if (!mesh.has_tag(BoundaryTag::Dirichlet)) throw precondition("elasticity needs a Dirichlet boundary part");

  Vec ceq(n * nn);
  for (int k = 0; k < n; ++k) ceq.segment(k * nn, nn).setConstant(model.c_eq(k));
  Vec mu_tilde = initial_mu ? *initial_mu : inner_solve_mu(mesh, transport, ceq, boundary);
  if (mu_tilde.size() != n * nn) throw precondition("initial mu has wrong size");

  const H1Norm norm(mesh);
  FixedPointMixer mixer(opts.damping, opts.anderson, opts.anderson_window);
  SteadyState st;
  std::optional<Vec> warm;
  for (int it = 1; it <= opts.max_outer; ++it) {
    const InnerResult inner = inner_minimize_uc(functional, mu_tilde, opts.inner, warm);
    warm = inner.x;
    const Vec mu = inner_solve_mu(mesh, transport, inner.c, boundary);
    const double res = norm(mu - mu_tilde);
    st.history.push_back(res);
    st.objective_history.push_back(inner.objective);
    st.outer_iterations = it;
    st.fp_residual = res;
    st.fields.u = inner.u;
    st.fields.c = inner.c;
    st.fields.mu = mu;
    st.mu_tilde = mu_tilde;
    if (functional.charged()) {
      st.fields.phi_box = functional.poisson()->extend(inner.phi_free);
      st.fields.phi = functional.poisson()->restrict_inner(st.fields.phi_box);
    }
    if (res <= opts.fp_tol) {
      st.converged = true;
      break;
    }
    mu_tilde = mixer.update(mu_tilde, mu);
  }
  return st;
}

}  // namespace

SteadyState solve_steady(const Mesh& mesh, const FreeEnergy& model, const TransportModel& transport,
                         const BoundaryData& boundary, const Loads& loads, const SteadyOptions& opts,
                         const std::optional<Vec>& initial_mu) {
  PoroFunctional f(mesh, model, loads);
  return run_fixed_point(f, transport, boundary, opts, initial_mu);
}

SteadyState solve_steady_charged(const Mesh& mesh, const FreeEnergy& model, const TransportModel& transport,
                                 const ChargeModel& charges, const BoundaryData& boundary, const Loads& loads,
                                 const SteadyOptions& opts, const std::optional<Vec>& initial_mu) {
  if (!charges.neutral() && !mesh.padding()) throw MeshError("charged problems need a mesh with a padding box");
  PoroFunctional f(mesh, model, loads, &charges);
  SteadyState st = run_fixed_point(f, transport, boundary, opts, initial_mu);
  if (!f.charged()) {
    st.fields.phi = Vec::Zero(mesh.num_nodes());
    if (mesh.padding()) st.fields.phi_box = Vec::Zero(mesh.padding()->mesh->num_nodes());
  }
  return st;
}

UniquenessIdentity uniqueness_identity(const PoroFunctional& functional, const Vec& x1, const Vec& mu_tilde1,
                                       const Vec& x2, const Vec& mu_tilde2) {
  PoroFunctional plain(functional.mesh(), functional.model(), Loads{}, nullptr);
  plain.set_theta(functional.theta());
  const Vec dx = x1 - x2;
  UniquenessIdentity id;
  id.lhs = (plain.gradient(x1) - plain.gradient(x2)).dot(dx);
  if (functional.charged()) {
    const Vec dphi = functional.potential(x1) - functional.potential(x2);
    id.lhs += dphi.dot(functional.poisson()->stiffness() * dphi);
  }
  const DofMap& dofs = functional.dofs();
  const Vec dc = dofs.unpack_c(x1) - dofs.unpack_c(x2);
  const Vec dmu = mu_tilde1 - mu_tilde2;
  const Vec& m = functional.mesh().lumped_mass();
  const Index nn = dofs.nodes();
  for (int k = 0; k < dofs.components(); ++k)
    id.rhs += (m.array() * dmu.segment(k * nn, nn).array() * dc.segment(k * nn, nn).array()).sum();
  return id;
}

}  // namespace porofick
