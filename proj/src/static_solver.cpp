#include "porofick/static_solver.hpp"

#include <cmath>

namespace porofick {

SolverOptions default_domain_options() {
  SolverOptions o;
  o.tol_grad = 1e-12;
  o.max_newton = 200;
  return o;
}

namespace {

Vec uniform_start(const PoroFunctional& f, const Mesh& mesh, const FreeEnergy& model, const Conc& c_total) {
  if (c_total.size() != model.components())
    throw SolverError(SolverError::Kind::Precondition, "static_solver", "C_total needs one entry per component");
  const Conc avg = c_total / mesh.volume();
  for (int k = 0; k < model.components(); ++k)
    if (model.has_barrier(k) && !(avg(k) > 0.0))
      throw SolverError(SolverError::Kind::Infeasible, "static_solver",
                        "C_total gives infinite energy at the uniform state");
  return f.uniform_point(avg);
}

StaticSolution from_kkt(const PoroFunctional& f, const KktResult& r) {
  StaticSolution s;
  s.u = f.dofs().unpack_u(r.x);
  s.c = f.dofs().unpack_c(r.x);
  s.mu_bar = r.multiplier;
  s.objective = r.value;
  s.iterations = r.iterations;
  s.stationarity = r.stationarity;
  s.feasibility = r.feasibility;
  s.history = r.history;
  if (f.charged()) {
    const Vec pf = f.potential(r.x);
    s.phi_box = f.poisson()->extend(pf);
    s.phi = f.poisson()->restrict_inner(s.phi_box);
  }
  return s;
}

void require_dirichlet(const Mesh& mesh) {
  if (!mesh.has_tag(BoundaryTag::Dirichlet))
    throw SolverError(SolverError::Kind::Precondition, "static_solver", "elasticity needs a Dirichlet boundary part");
}

}  // namespace

StaticSolution solve_static_isolated(const Mesh& mesh, const FreeEnergy& model, const Loads& loads,
                                     const Conc& c_total, const SolverOptions& opts,
                                     const std::optional<Vec>& initial) {
  require_dirichlet(mesh);
  PoroFunctional f(mesh, model, loads);
  const Vec uniform = uniform_start(f, mesh, model, c_total);
  const Vec x0 = initial ? *initial : uniform;
  return from_kkt(f, solve_equality_kkt(f, f.content_matrix(), c_total, x0, opts));
}

StaticSolution solve_static_equilibrated(const Mesh& mesh, const FreeEnergy& model, const Loads& loads,
                                         const Conc& mu_bar, const SolverOptions& opts) {
  require_dirichlet(mesh);
  if (mu_bar.size() != model.components())
    throw SolverError(SolverError::Kind::Precondition, "static_solver", "mu_bar needs one entry per component");
  PoroFunctional f(mesh, model, loads);
  const Index nn = mesh.num_nodes();
  Vec mu(model.components() * nn);
  for (int k = 0; k < model.components(); ++k) mu.segment(k * nn, nn).setConstant(mu_bar(k));
  f.set_mu_tilde(mu);
  const Conc c0 = conjugate_concentration(model, Voigt::Zero(model.voigt()), mu_bar);
  const MinimizeResult r = minimize_convex(f, f.uniform_point(c0), opts);
  StaticSolution s;
  s.u = f.dofs().unpack_u(r.x);
  s.c = f.dofs().unpack_c(r.x);
  s.mu_bar = mu_bar;
  s.objective = r.value;
  s.iterations = r.iterations;
  s.stationarity = r.residual;
  s.history = r.history;
  return s;
}

StaticSolution solve_static_charged(const Mesh& mesh, const FreeEnergy& model, const ChargeModel& charges,
                                    const Loads& loads, const Conc& c_total, const SolverOptions& opts,
                                    const std::optional<Vec>& initial) {
  require_dirichlet(mesh);
  if (!charges.neutral() && !mesh.padding())
    throw MeshError("charged problems need a mesh with a padding box");
  PoroFunctional f(mesh, model, loads, &charges);
  const Vec uniform = uniform_start(f, mesh, model, c_total);
  const Vec x0 = initial ? *initial : uniform;
  StaticSolution s = from_kkt(f, solve_equality_kkt(f, f.content_matrix(), c_total, x0, opts));
  if (!f.charged()) {
    s.phi = Vec::Zero(mesh.num_nodes());
    if (mesh.padding()) s.phi_box = Vec::Zero(mesh.padding()->mesh->num_nodes());
  }
  return s;
}

double saddle_lagrangian(const PoroFunctional& functional, const Vec& x, const Vec& phi_free) {
  const Mesh& mesh = functional.mesh();
  const FreeEnergy& model = functional.model();
  const DofMap& dofs = functional.dofs();
  const Vec u = dofs.unpack_u(x);
  const Vec c = dofs.unpack_c(x);
  const int d = mesh.dim();
  const Vec& theta = functional.theta();
  double v = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Voigt s = element_strain(mesh, e, u);
    const double w = mesh.measure(e) / (d + 1);
    for (Index i : mesh.element(e)) {
      Conc ci(dofs.components());
      for (int k = 0; k < dofs.components(); ++k) ci(k) = c(k * dofs.nodes() + i);
      v += w * model.energy(s, ci, theta(i));
    }
  }
  const Vec& m = mesh.lumped_mass();
  const Vec& mu = functional.mu_tilde();
  for (int k = 0; k < dofs.components(); ++k)
    for (Index i = 0; i < dofs.nodes(); ++i) v -= m(i) * mu(k * dofs.nodes() + i) * c(k * dofs.nodes() + i);
  v -= functional.load_vector().dot(x.head(dofs.num_u()));
  const BoxPoisson* p = functional.poisson();
  if (!p) return v;
  const Vec q = p->charge(c, u);
  v += q.dot(phi_free) - 0.5 * phi_free.dot(p->stiffness() * phi_free);
  return v;
}

}  // namespace porofick
