#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "biot_oracle.hpp"
#include "helpers.hpp"
#include "poisson_oracle.hpp"

#include "porofick/static_solver.hpp"

using namespace porofick;
using namespace fixtures;

namespace {

Conc one(double v) { return Conc::Constant(1, v); }

Loads traction(int d, double gx, double gy = 0.0) {
  Loads l;
  l.g = Point::Zero(d);
  l.g(0) = gx;
  if (d == 2) l.g(1) = gy;
  return l;
}

FreeEnergy decoupled_strain(int dim, double kappa, double c_eq) {
  SwellingStrainModel m;
  m.C = isotropic_stiffness(dim, 1.0, 1.0);
  m.E = {Voigt::Zero(voigt_size(dim))};
  m.kappa = {kappa};
  m.c_eq = {c_eq};
  return FreeEnergy(m);
}

FreeEnergy biot(int dim, double beta, double M, double c_eq) {
  SwellingStressModel m;
  m.C = isotropic_stiffness(dim, 1.0, 1.0);
  m.beta = {beta};
  m.biot_M = {M};
  m.kappa = {0.0};
  m.c_eq = {c_eq};
  return FreeEnergy(m);
}

// max_i |d_c phi(e_bar_i, c_i) + z phi_i - mu_bar|
double potential_spread(const Mesh& mesh, const FreeEnergy& model, const StaticSolution& s,
                        const ChargeModel* ch = nullptr) {
  PoroFunctional f(mesh, model, Loads{});
  const Vec mu = f.nodal_chemical_potential(f.dofs().pack(s.u, s.c));
  const Index nn = mesh.num_nodes();
  double worst = 0.0;
  for (int k = 0; k < model.components(); ++k)
    for (Index i = 0; i < nn; ++i) {
      double v = mu(k * nn + i) - s.mu_bar(k);
      if (ch) v += ch->z[static_cast<size_t>(k)] * s.phi(i);
      worst = std::max(worst, std::abs(v));
    }
  return worst;
}

}  // namespace

TEST_CASE("uniform state without loads") {
  struct Case {
    Mesh mesh;
    FreeEnergy model;
    double c_total;
  };
  std::vector<Case> cases = {
      {interval(6), decoupled_strain(1, 1.0, 0.5), 1.7},
      {square(4, {Side::Left, Side::Bottom}), decoupled_strain(2, 0.8, 1.0), 0.3},
      {square(4, {Side::Left}), stress_model(2, 1, 1.0, 0.9), 0.9},
      {square(3, {Side::Bottom}), strain_model(2, 1, 1.0, 1.4), 1.4},
  };
  for (const auto& cs : cases) {
    const StaticSolution s = solve_static_isolated(cs.mesh, cs.model, Loads{}, one(cs.c_total));
    const double cbar = cs.c_total / cs.mesh.volume();
    CHECK(max_abs(s.u) < 1e-10);
    CHECK(max_abs(s.c.array() - cbar) < 1e-10);
    const double mu = (*cs.model.chemical_potential(Voigt::Zero(cs.model.voigt()), one(cbar)))(0);
    CHECK(s.mu_bar(0) == doctest::Approx(mu).epsilon(1e-10));
    CHECK(potential_spread(cs.mesh, cs.model, s) <= 1e-8);
    CHECK(std::abs(cs.mesh.lumped_mass().dot(s.c) - cs.c_total) <= 1e-10);
  }
}

TEST_CASE("doubling the content raises mu_bar by kappa ln 2") {
  const Mesh m = square(3);
  const FreeEnergy model = decoupled_strain(2, 0.7, 1.0);
  const auto a = solve_static_isolated(m, model, Loads{}, one(0.6));
  const auto b = solve_static_isolated(m, model, Loads{}, one(1.2));
  CHECK(b.mu_bar(0) - a.mu_bar(0) == doctest::Approx(0.7 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("kappa = 0 isolated body matches the linear Biot saddle system") {
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? interval(5) : square(3, {Side::Left});
    const FreeEnergy model = biot(dim, 0.6, 2.5, 0.8);
    const Loads loads = traction(dim, 0.05, -0.02);
    const auto sys = oracle::assemble_biot(m, isotropic_stiffness(dim, 1.0, 1.0), 0.6, 2.5, 0.8, loads.f, loads.g);
    const auto [x, lambda] = oracle::solve_isolated(sys, 0.75);
    const StaticSolution s = solve_static_isolated(m, model, loads, one(0.75));
    CHECK(max_abs(s.u - sys.full_u(x)) < 1e-10);
    CHECK(max_abs(s.c - sys.c(x)) < 1e-10);
    CHECK(s.mu_bar(0) == doctest::Approx(lambda).epsilon(1e-10));
  }
}

TEST_CASE("KKT multiplier equals the nodal chemical potential on a 3-element mesh") {
  const Mesh m = interval(3);
  const FreeEnergy model = stress_model(1, 1, 1.0, 1.0, 0.5, 2.0);
  Loads loads;
  loads.f = Point::Constant(1, 0.3);
  loads.g = Point::Constant(1, -0.2);
  const StaticSolution s = solve_static_isolated(m, model, loads, one(1.3));
  CHECK(max_abs(s.u) > 1e-3);  // genuinely loaded
  CHECK(potential_spread(m, model, s) <= 1e-8);
  CHECK(s.feasibility <= 1e-10);
}

TEST_CASE("constant potential on a loaded nonlinear 2D case") {
  const Mesh m = square(5, {Side::Left});
  const FreeEnergy model = stress_model(2, 2, 0.7, 1.0, 0.4, 3.0);
  Loads loads = traction(2, 0.1, 0.05);
  loads.f = Point::Constant(2, -0.1);
  Conc total(2);
  total << 1.1, 0.6;
  const StaticSolution s = solve_static_isolated(m, model, loads, total);
  CHECK(potential_spread(m, model, s) <= 1e-6 * (1.0 + s.mu_bar.cwiseAbs().maxCoeff()));
  for (int k = 0; k < 2; ++k)
    CHECK(std::abs(m.lumped_mass().dot(s.c.segment(k * m.num_nodes(), m.num_nodes())) - total(k)) <= 1e-10);
  CHECK(s.c.minCoeff() > 0.0);
  for (Index i = 0; i < m.num_nodes(); ++i)
    if (m.is_dirichlet_node(i)) CHECK(s.u.segment(2 * i, 2).norm() == 0.0);
}

TEST_CASE("different feasible starts give the same solution") {
  const Mesh m = square(4, {Side::Left});
  const FreeEnergy model = strain_model(2, 1, 1.0, 1.0, 0.2);
  const Loads loads = traction(2, 0.2);
  const StaticSolution a = solve_static_isolated(m, model, loads, one(0.8));
  PoroFunctional f(m, model, loads);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> pert(0.5, 1.5);
  Vec c0(m.num_nodes());
  for (Index i = 0; i < c0.size(); ++i) c0(i) = pert(rng);
  c0 *= 0.8 / m.lumped_mass().dot(c0);
  Vec u0 = Vec::Constant(2 * m.num_nodes(), 0.05);
  const StaticSolution b = solve_static_isolated(m, model, loads, one(0.8), default_domain_options(),
                                                 f.dofs().pack(u0, c0));
  CHECK(max_abs(a.u - b.u) <= 1e-6);
  CHECK(max_abs(a.c - b.c) <= 1e-6);
  CHECK(std::abs(a.mu_bar(0) - b.mu_bar(0)) <= 1e-6);
}

TEST_CASE("zero loads return the uniform state from any start") {
  const Mesh m = interval(6);
  const FreeEnergy model = decoupled_strain(1, 1.0, 1.0);
  PoroFunctional f(m, model, Loads{});
  Vec c0 = Vec::LinSpaced(m.num_nodes(), 0.2, 2.0);
  c0 *= 1.0 / m.lumped_mass().dot(c0);
  const StaticSolution s = solve_static_isolated(m, model, Loads{}, one(1.0), default_domain_options(),
                                                 f.dofs().pack(Vec::Constant(m.num_nodes(), 0.3), c0));
  CHECK(max_abs(s.u) < 1e-10);
  CHECK(max_abs(s.c.array() - 1.0) < 1e-10);
}

TEST_CASE("isolated solver errors") {
  const FreeEnergy model = stress_model(1);
  CHECK_THROWS_AS(solve_static_isolated(interval(3), model, Loads{}, one(-1.0)), SolverError);
  CHECK_THROWS_AS(solve_static_isolated(interval(3, {}), model, Loads{}, one(1.0)), SolverError);
}

TEST_CASE("equilibrated: equilibrium potential gives the rest state") {
  const Mesh m = square(3);
  const FreeEnergy model = stress_model(2, 1, 1.0, 0.7);
  const double mu = (*model.chemical_potential(Voigt::Zero(3), one(0.7)))(0);
  const StaticSolution s = solve_static_equilibrated(m, model, Loads{}, one(mu));
  CHECK(max_abs(s.u) < 1e-10);
  CHECK(max_abs(s.c.array() - 0.7) < 1e-10);
}

TEST_CASE("equilibrated: E = 0 decouples u from mu_bar") {
  const Mesh m = square(3);
  const FreeEnergy model = decoupled_strain(2, 1.0, 1.0);
  const Loads loads = traction(2, 0.1, 0.2);
  const auto a = solve_static_equilibrated(m, model, loads, one(-0.5));
  const auto b = solve_static_equilibrated(m, model, loads, one(1.5));
  CHECK(max_abs(a.u - b.u) < 1e-10);
  CHECK(max_abs(a.c.array() - std::exp(-0.5)) < 1e-10);
}

TEST_CASE("equilibrated: kappa = 0 matches a direct linear solve") {
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? interval(4) : square(3, {Side::Left, Side::Bottom});
    const FreeEnergy model = biot(dim, 0.8, 1.5, 1.0);
    const Loads loads = traction(dim, -0.1, 0.1);
    const auto sys = oracle::assemble_biot(m, isotropic_stiffness(dim, 1.0, 1.0), 0.8, 1.5, 1.0, loads.f, loads.g);
    const Vec x = oracle::solve_equilibrated(sys, 0.4);
    const StaticSolution s = solve_static_equilibrated(m, model, loads, one(0.4));
    CHECK(max_abs(s.u - sys.full_u(x)) < 1e-10);
    CHECK(max_abs(s.c - sys.c(x)) < 1e-10);
  }
}

TEST_CASE("equilibrated: c reproduces the conjugate relation nodewise") {
  const Mesh m = square(4, {Side::Left});
  const FreeEnergy model = stress_model(2, 1, 1.0, 1.0, 0.5, 2.0);
  const Loads loads = traction(2, 0.3);
  const StaticSolution s = solve_static_equilibrated(m, model, loads, one(0.2));
  const auto eb = nodal_strain(m, s.u);
  for (Index i = 0; i < m.num_nodes(); ++i)
    CHECK(std::abs(conjugate_concentration(model, eb[static_cast<size_t>(i)], one(0.2))(0) - s.c(i)) < 1e-10);
}

TEST_CASE("charged: neutral charges reduce to the isolated solve") {
  const Mesh m = with_padding(square(3, {Side::Left}), 2.0);
  const FreeEnergy model = stress_model(2);
  ChargeModel ch;
  ch.z = {0.0};
  const Loads loads = traction(2, 0.1);
  const auto a = solve_static_charged(m, model, ch, loads, one(1.2));
  const auto b = solve_static_isolated(m, model, loads, one(1.2));
  CHECK(max_abs(a.u - b.u) == 0.0);
  CHECK(max_abs(a.c - b.c) == 0.0);
  CHECK(max_abs(a.phi) == 0.0);
}

TEST_CASE("charged: potential agrees with an independent Poisson solve") {
  const Mesh m = with_padding(square(4, {Side::Left}), 2.0);
  const FreeEnergy model = stress_model(2, 2, 1.0, 1.0, 0.5, 2.0);
  ChargeModel ch;
  ch.z = {1.0, -1.0};
  ch.epsilon = 0.5;
  ch.epsilon_outside = 2.0;
  Conc total(2);
  total << 1.2, 0.9;
  const StaticSolution s = solve_static_charged(m, model, ch, Loads{}, total);
  const Vec phi = oracle::box_potential(m, ch, s.c, s.u);
  CHECK(max_abs(s.phi_box - phi) <= 1e-10 * (1.0 + max_abs(phi)));
  CHECK(max_abs(phi) > 1e-3);
  CHECK(potential_spread(m, model, s, &ch) <= 1e-6 * (1.0 + s.mu_bar.cwiseAbs().maxCoeff()));
}

TEST_CASE("charged: one species with uniform z under zero loads") {
  // Uniform z, no dopands: the charge pushes c towards the boundary.
  const Mesh m = with_padding(interval(12), 2.0);
  const FreeEnergy model = decoupled_strain(1, 1.0, 1.0);
  ChargeModel ch;
  ch.z = {1.0};
  const StaticSolution s = solve_static_charged(m, model, ch, Loads{}, one(1.0));
  const Vec phi = oracle::box_potential(m, ch, s.c, s.u);
  CHECK(max_abs(s.phi_box - phi) <= 1e-10 * (1.0 + max_abs(phi)));
  CHECK(s.c(0) > s.c(6));
  CHECK(s.c(12) > s.c(6));
  CHECK(potential_spread(m, model, s, &ch) <= 1e-8);
}

TEST_CASE("charged: saddle value equals the eliminated objective") {
  const Mesh m = with_padding(square(3, {Side::Left}), 2.0);
  const FreeEnergy model = stress_model(2, 2, 1.0, 1.0, 0.5, 2.0);
  ChargeModel ch;
  ch.z = {1.0, -2.0};
  ch.z_dop = 0.3;
  const Loads loads = traction(2, 0.1, 0.0);
  Conc total(2);
  total << 1.0, 0.4;
  const StaticSolution s = solve_static_charged(m, model, ch, loads, total);
  PoroFunctional f(m, model, loads, &ch);
  const Vec x = f.dofs().pack(s.u, s.c);
  const Vec phi_free = f.potential(x);
  CHECK(saddle_lagrangian(f, x, phi_free) == doctest::Approx(s.objective).epsilon(1e-12));
  CHECK(f.value(x) == doctest::Approx(s.objective).epsilon(1e-12));
  // phi maximizes the Lagrangian: perturbations lower it
  const Vec dphi = Vec::Constant(phi_free.size(), 1e-3);
  CHECK(saddle_lagrangian(f, x, phi_free + dphi) < saddle_lagrangian(f, x, phi_free));
  CHECK(saddle_lagrangian(f, x, phi_free - dphi) < saddle_lagrangian(f, x, phi_free));
}

TEST_CASE("charged problems need the padding box") {
  ChargeModel ch;
  ch.z = {1.0};
  CHECK_THROWS_AS(solve_static_charged(square(2), stress_model(2), ch, Loads{}, one(1.0)), MeshError);
}
