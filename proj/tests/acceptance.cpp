// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.
#include "biot_oracle.hpp"
#include "grid_oracle.hpp"
#include "helpers.hpp"

#include "porofick/run.hpp"
#include "porofick/static_solver.hpp"
#include "porofick/thermal_solver.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

using namespace porofick;
using namespace fixtures;
namespace fs = std::filesystem;

namespace {

const std::string kRegression = POROFICK_REGRESSION_DIR;
const std::vector<std::string> kRegressionSpecs = {
    "static_uniform_1d", "static_loaded_2d",   "static_equilibrated_2d", "static_charged_2d",
    "steady_constant_1d", "steady_linear_2d",  "steady_charged_2d",      "thermal_1d",
    "thermal_charged_2d", "scan_canonical_2d", "scan_neutral_1d"};

std::string command_for(const std::string& name) { return name.substr(0, name.find('_')); }
ProblemSpec regression(const std::string& name) {
  return load_config(kRegression + "/" + name + ".ini", command_for(name));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.3e", v);
  return b;
}

Conc one(double v) { return Conc::Constant(1, v); }
AffineField ramp(double a, double bx, double by = 0.0) { return {a, bx, by}; }

std::vector<FreeEnergy> models() {
  return {stress_model(1),
          stress_model(2),
          stress_model(2, 2, 0.7, 0.8),
          stress_model(2, 1, 1.0, 1.0, 0.5, 2.0, 0.3),
          strain_model(1),
          strain_model(2),
          strain_model(2, 2, 1.0, 1.2)};
}

// ---------------------------------------------------------------------------

Outcome constitutive_consistency() {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> de(-0.2, 0.2), dc(0.3, 2.5), dt(-1.0, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  int points = 0;
  for (const auto& m : models()) {
    for (int trial = 0; trial < 100; ++trial, ++points) {
      Voigt e(m.voigt());
      for (Index i = 0; i < e.size(); ++i) e(i) = de(rng);
      Conc c(m.components());
      for (Index k = 0; k < c.size(); ++k) c(k) = dc(rng);
      const double th = dt(rng);
      const Voigt s = m.stress(e, c, th);
      const Conc mu = *m.chemical_potential(e, c, th);
      Vec an(e.size() + c.size()), fd(e.size() + c.size());
      for (Index i = 0; i < e.size(); ++i) {
        Voigt ep = e, em = e;
        ep(i) += h;
        em(i) -= h;
        fd(i) = (m.energy(ep, c, th) - m.energy(em, c, th)) / (2 * h);
        an(i) = s(i);
      }
      for (Index k = 0; k < c.size(); ++k) {
        Conc cp = c, cm = c;
        cp(k) += h;
        cm(k) -= h;
        fd(e.size() + k) = (m.energy(e, cp, th) - m.energy(e, cm, th)) / (2 * h);
        an(e.size() + k) = mu(k);
      }
      worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff() / std::max(1.0, an.cwiseAbs().maxCoeff()));
    }
  }
  return {worst <= 1e-6, std::to_string(points) + " points, max rel err " + fmt(worst) + " (<= 1e-6)"};
}

// Golden-section maximization of a concave scalar function on [a, b].
double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 300 && b - a > 1e-15 * (1.0 + std::abs(a)); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  return f(0.5 * (a + b));
}

Outcome fenchel_young() {
  std::mt19937 rng(202);
  std::uniform_real_distribution<double> de(-0.2, 0.2), dmu(-2.0, 2.0);
  double worst = 0.0;
  int points = 0;
  for (const auto& m : {stress_model(2), strain_model(2), stress_model(1, 1, 0.5, 0.7, 0.8, 3.0, 0.3)}) {
    for (int trial = 0; trial < 50; ++trial, ++points) {
      Voigt e(m.voigt());
      for (Index i = 0; i < e.size(); ++i) e(i) = de(rng);
      const Conc mu = one(dmu(rng));
      const double th = 0.4;
      const Conc c = conjugate_concentration(m, e, mu, th);
      // phi*(e, mu) = sup_c mu c - phi(e, c), computed independently
      const double star = golden_max(
          [&](double x) { return x <= 0.0 ? -1e300 : mu(0) * x - m.energy(e, one(x), th); }, 1e-12, 80.0);
      worst = std::max(worst, std::abs(m.energy(e, c, th) + star - mu(0) * c(0)));
    }
  }
  return {worst <= 1e-8, std::to_string(points) + " points, max |phi + phi* - mu c| " + fmt(worst) + " (<= 1e-8)"};
}

Outcome flux_identity() {
  // 2D swelling stress, linear mobility M(c) = c M0 with anisotropic M0,
  // manufactured c(x) = c0 + a.x and tr e(x) with gradient b:
  //   grad mu = Mb (grad c - beta b) + kappa grad c / c
  //   p = Mb (c - beta tr e - c_eq)
  //   j_darcy = -c M0 Mb (grad c - beta b),  j_fick = -kappa M0 grad c.
  const double Mb = 2.0, beta = 0.6, kap = 0.7, ceq = 1.1;
  SwellingStressModel sm;
  sm.C = isotropic_stiffness(2, 1.0, 1.0);
  sm.beta = {beta};
  sm.biot_M = {Mb};
  sm.kappa = {kap};
  sm.c_eq = {ceq};
  const FreeEnergy model(sm);
  TransportModel t = transport(2, 1, MobilityKind::Linear);
  t.M0[0] << 1.3, 0.2, 0.2, 0.7;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxDim> gc(1, 2);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVoigt, kMaxDim> ge(3, 2);
  gc << 0.3, -0.4;
  ge << 0.2, 0.1, -0.05, 0.3, 0.7, -0.2;  // rows e_xx, e_yy, gamma_xy
  Point gtr(2);
  gtr << ge(0, 0) + ge(1, 0), ge(0, 1) + ge(1, 1);
  Point grad_c(2);
  grad_c << gc(0, 0), gc(0, 1);
  double worst = 0.0;
  std::mt19937 rng(303);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double c = 1.0 + 0.5 * U(rng);
    Voigt e(3);
    e << 0.1 * U(rng), 0.1 * U(rng), 0.1 * U(rng);
    const Point gmu = Mb * (grad_c - beta * gtr) + kap * grad_c / c;
    const auto f = flux_decomposition(model, t, 0, e, one(c), gmu, gc, ge);
    const Point darcy = -c * t.M0[0] * (Mb * (grad_c - beta * gtr));
    const Point fick = -kap * t.M0[0] * grad_c;
    const Point total = -c * t.M0[0] * gmu;
    const double p = Mb * (c - beta * (e(0) + e(1)) - ceq);
    const double scale = 1.0 + total.norm();
    worst = std::max({worst, (f.j_darcy - darcy).norm() / scale, (f.j_fick - fick).norm() / scale,
                      (f.j_total - total).norm() / scale, (f.j_total - f.j_darcy - f.j_fick).norm() / scale,
                      std::abs(f.p - p) / (1.0 + std::abs(p))});
  }
  return {worst <= 1e-12, "20 manufactured points, max rel err " + fmt(worst) + " (<= 1e-12)"};
}

Outcome static_uniform() {
  // Stress-free configurations: uniform c with zero strain is an equilibrium
  // only when the uniform state carries no swelling stress.
  struct Case {
    std::string label;
    Mesh mesh;
    FreeEnergy model;
    Conc total;
  };
  SwellingStrainModel free2;
  free2.C = isotropic_stiffness(2, 1.0, 1.0);
  free2.E = {Voigt::Zero(3), Voigt::Zero(3)};
  free2.kappa = {1.0, 0.6};
  free2.c_eq = {1.0, 0.5};
  SwellingStrainModel free1;
  free1.C = isotropic_stiffness(1, 1.0, 1.0);
  free1.E = {Voigt::Zero(1)};
  free1.kappa = {0.8};
  free1.c_eq = {0.5};
  Conc t2(2);
  t2 << 2.3, 0.3;
  std::vector<Case> cases = {
      {"strain E=0 1D", interval(16), FreeEnergy(free1), one(1.7)},
      {"strain E=0 2D", square(8, {Side::Left, Side::Bottom}), FreeEnergy(free2), t2},
      {"stress at c_eq 2D", square(8, {Side::Left}), stress_model(2, 1, 1.0, 0.9), one(0.9)},
      {"strain at c_eq 2D", square(8, {Side::Bottom}), strain_model(2, 1, 1.0, 1.4), one(1.4)},
      {"stress at c_eq 1D", interval(16), stress_model(1, 1, 0.5, 1.2), one(1.2)},
  };
  double worst_u = 0, worst_c = 0, worst_mu = 0, worst_content = 0;
  for (const auto& cs : cases) {
    const StaticSolution s = solve_static_isolated(cs.mesh, cs.model, Loads{}, cs.total);
    const Index nn = cs.mesh.num_nodes();
    PoroFunctional f(cs.mesh, cs.model, Loads{});
    const Vec mu = f.nodal_chemical_potential(f.dofs().pack(s.u, s.c));
    worst_u = std::max(worst_u, max_abs(s.u));
    for (int k = 0; k < cs.model.components(); ++k) {
      const Vec ck = s.c.segment(k * nn, nn);
      worst_c = std::max(worst_c, max_abs(ck.array() - cs.total(k) / cs.mesh.volume()));
      worst_mu = std::max(worst_mu, max_abs(mu.segment(k * nn, nn).array() - s.mu_bar(k)));
      worst_content = std::max(worst_content, std::abs(cs.mesh.lumped_mass().dot(ck) - cs.total(k)));
    }
  }
  const bool pass = worst_u <= 1e-10 && worst_c <= 1e-10 && worst_mu <= 1e-8 && worst_content <= 1e-10;
  return {pass, std::to_string(cases.size()) + " stress-free cases, |u| " + fmt(worst_u) + ", |c - C/|Omega|| " +
                    fmt(worst_c) + ", |d_c phi - mu_bar| " + fmt(worst_mu) + " (<= 1e-8), content " +
                    fmt(worst_content) + " (<= 1e-10)"};
}

SteadyOptions tight() {
  SteadyOptions o;
  o.fp_tol = 1e-10;
  o.max_outer = 500;
  return o;
}

Outcome static_limit() {
  double worst = 0.0;
  bool converged = true;
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? interval(16) : square(8, {Side::Left});
    const FreeEnergy model = dim == 1 ? stress_model(1, 1, 1.0, 1.0, 0.6, 2.0) : strain_model(2, 1, 1.0, 1.0, 0.2);
    Loads loads;
    loads.g = Point::Constant(dim, 0.1);
    for (double mubar : {-0.4, 0.35}) {
      const SteadyState st =
          solve_steady(m, model, transport(dim, 1, MobilityKind::Linear), robin(1.0, {ramp(mubar, 0.0)}), loads, tight());
      const StaticSolution s = solve_static_equilibrated(m, model, loads, one(mubar));
      converged = converged && st.converged;
      worst = std::max({worst, max_abs(st.fields.u - s.u), max_abs(st.fields.c - s.c),
                        max_abs(st.fields.mu.array() - mubar)});
    }
  }
  return {converged && worst <= 1e-6, "4 cases, max field difference " + fmt(worst) + " (<= 1e-6)"};
}

Outcome constant_mobility() {
  std::vector<std::string> notes;
  bool pass = true;
  auto check = [&](const std::string& label, const SteadyState& st, double tol) {
    pass = pass && st.converged && st.outer_iterations == 1 && st.fp_residual <= tol;
    notes.push_back(label + " " + std::to_string(st.outer_iterations) + " it");
  };
  {
    const ProblemSpec s = regression("steady_constant_1d");
    const SteadyState st = solve_steady(build_mesh(s), build_free_energy(s), build_transport(s), build_boundary(s),
                                        build_loads(s), build_steady_options(s));
    check("1D", st, s.fp_tol);
  }
  {
    const Mesh m = square(8, {Side::Left});
    Loads loads;
    loads.g = Point::Constant(2, 0.1);
    check("2D", solve_steady(m, stress_model(2), transport(2), robin(1.0, {ramp(0.0, 0.5, -0.3)}), loads, tight()),
          1e-10);
  }
  {
    const Mesh m = with_padding(square(6, {Side::Left}), 2.0);
    ChargeModel ch;
    ch.z = {1.0, -1.0};
    ch.z_dop = 0.2;
    check("charged 2D",
          solve_steady_charged(m, stress_model(2, 2), transport(2, 2), ch,
                               robin(1.0, {ramp(0.1, 0.4), ramp(-0.2, 0.0, 0.3)}), Loads{}, tight()),
          1e-10);
  }
  std::string d;
  for (const auto& n : notes) d += (d.empty() ? "" : ", ") + n;
  return {pass, d + " (exactly 1, fp_residual <= fp_tol)"};
}

Outcome dissipation_power() {
  double worst_balance = 0.0, worst_static = 0.0;
  int nonstatic = 0, statics = 0;
  bool ok = true;
  for (const auto& name : kRegressionSpecs) {
    const ProblemSpec s = regression(name);
    const RunResult r = run(s);
    if (!r.converged) {
      ok = false;
      continue;
    }
    if (is_static(s.kind) || s.kind == ProblemKind::Scan) {
      ++statics;
      worst_static = std::max({worst_static, std::abs(std::stod(r.get("dissipation")))});
    } else {
      ++nonstatic;
      worst_balance = std::max(worst_balance, std::stod(r.get("balance_residual")));
    }
  }
  return {ok && worst_balance <= 1e-8 && worst_static <= 1e-12,
          std::to_string(nonstatic) + " non-static runs, max rel residual " + fmt(worst_balance) + " (<= 1e-8); " +
              std::to_string(statics) + " static runs, max dissipation " + fmt(worst_static) + " (<= 1e-12)"};
}

Outcome maximum_principle() {
  double worst = -1e300;
  int cases = 0;
  bool pass = true;
  auto check = [&](const Mesh& m, const Vec& mu, const BoundaryData& b) {
    const auto r = check_maximum_principle(m, mu, b, 1, 1e-9);
    pass = pass && r.pass;
    worst = std::max(worst, r.margin);
    ++cases;
  };
  for (const auto& name : {"steady_constant_1d", "steady_linear_2d", "thermal_1d"}) {
    const ProblemSpec s = regression(name);
    const RunResult r = run(s);
    pass = pass && r.converged;
    check(*r.mesh, r.fields.mu, build_boundary(s));
  }
  for (int dim : {1, 2}) {
    const Mesh m = dim == 1 ? interval(32) : square(12, {Side::Bottom});
    const BoundaryData b = robin(2.0, {ramp(0.0, 1.0)});
    const SteadyState st = solve_steady(m, stress_model(dim, 1, 1.0, 1.0, 0.6, 2.0),
                                        transport(dim, 1, MobilityKind::Linear), b, Loads{}, tight());
    pass = pass && st.converged;
    check(m, st.fields.mu, b);
  }
  return {pass, std::to_string(cases) + " scalar cases, largest margin " + fmt(worst) + " (<= 1e-9)"};
}

Outcome heat_equivalence() {
  double worst = 0.0;
  bool converged = true;
  {
    const ProblemSpec s = regression("thermal_1d");
    const Mesh m = build_mesh(s);
    const TransportModel t = build_transport(s);
    const BoundaryData b = build_boundary(s);
    const ThermalState th =
        solve_steady_thermal(m, build_free_energy(s), t, b, build_loads(s), build_steady_options(s));
    converged = converged && th.converged;
    const Vec a = solve_min_theta(m, t, th.fields.c, th.theta_tilde, th.fields.mu, b);
    const Vec d = solve_heat_linear(m, t, th.fields.c, th.theta_tilde, th.fields.mu, b);
    worst = std::max(worst, max_abs(a - d));
  }
  {
    const Mesh m = square(10, {Side::Left});
    TransportModel t = transport(2, 1, MobilityKind::Linear);
    t.K0 = 0.8 * DMatrix::Identity(2, 2);
    t.conductivity_theta = 0.1;
    t.mobility_theta = 0.1;
    t.heat_source = 0.3;
    BoundaryData b = robin(1.0, {ramp(-0.3, 1.0, 0.6)}, 0.7, ramp(1.0, -0.5, 0.2));
    b.alpha_sides = {Side::Right, Side::Top};
    SteadyOptions o = tight();
    o.damping = 0.5;
    const ThermalState th =
        solve_steady_thermal(m, stress_model(2, 1, 1.0, 1.0, 0.5, 2.0, 0.1), t, b, Loads{}, o);
    converged = converged && th.converged;
    const Vec a = solve_min_theta(m, t, th.fields.c, th.theta_tilde, th.fields.mu, b);
    const Vec d = solve_heat_linear(m, t, th.fields.c, th.theta_tilde, th.fields.mu, b);
    worst = std::max(worst, max_abs(a - d));
  }
  return {converged && worst <= 1e-8, "2 converged thermal states, max |theta_min - theta_direct| " + fmt(worst) +
                                          " (<= 1e-8)"};
}

Outcome charged_uniqueness() {
  const ProblemSpec s = regression("steady_charged_2d");
  const Mesh m = build_mesh(s);
  const FreeEnergy model = build_free_energy(s);
  const ChargeModel ch = build_charges(s);
  const SteadyOptions o = build_steady_options(s);
  const SteadyState a = solve_steady_charged(m, model, build_transport(s), ch, build_boundary(s), build_loads(s), o);
  const SteadyState b = solve_steady_charged(m, model, build_transport(s), ch, build_boundary(s), build_loads(s), o,
                                             Vec::Constant(2 * m.num_nodes(), 1.5));
  PoroFunctional f(m, model, build_loads(s), &ch);
  const UniquenessIdentity id = uniqueness_identity(f, f.dofs().pack(a.fields.u, a.fields.c), a.mu_tilde,
                                                    f.dofs().pack(b.fields.u, b.fields.c), b.mu_tilde);
  const double diff = std::max({max_abs(a.fields.u - b.fields.u), max_abs(a.fields.c - b.fields.c),
                                max_abs(a.fields.mu - b.fields.mu), max_abs(a.fields.phi - b.fields.phi)});
  const double gap = std::max(std::abs(id.lhs), std::abs(id.lhs - id.rhs));
  return {a.converged && b.converged && gap <= 1e-8 && diff <= 1e-6,
          "identity " + fmt(gap) + " (<= 1e-8), field difference " + fmt(diff) + " (<= 1e-6)"};
}

ScanReport canonical_scan(double padding) {
  ProblemSpec s = regression("scan_canonical_2d");
  s.padding = padding;
  RunOptions opt;
  opt.threads = 3;
  return *run(s, opt).scan;
}

Outcome electroneutrality() {
  const ScanReport a = canonical_scan(2.0);
  const ScanReport b = canonical_scan(4.0);
  auto in_band = [](double v) { return std::abs(v - 0.5) <= 0.15; };
  const bool pass = in_band(a.slope_d) && in_band(a.slope_residual) && std::abs(a.slope_d - b.slope_d) <= 0.05 &&
                    std::abs(a.slope_residual - b.slope_residual) <= 0.05;
  return {pass, "slopes d " + fmt(a.slope_d) + ", residual " + fmt(a.slope_residual) +
                    " (0.5 +- 0.15); padding 4: d " + fmt(b.slope_d) + ", residual " + fmt(b.slope_residual) +
                    " (+- 0.05)"};
}

Outcome grid_search() {
  const Mesh m = interval(2, {Side::Left, Side::Right});
  double worst = 0.0;
  const std::vector<std::pair<FreeEnergy, std::array<double, 3>>> cases = {
      {stress_model(1, 1, 0.5, 1.0, 0.8, 1.5), {0.2, -0.3, 0.4}},
      {stress_model(1, 1, 1.0, 0.7, 0.5, 2.0), {0.0, 0.5, -0.5}},
      {strain_model(1, 1, 1.0, 1.0, 0.3), {-0.2, 0.1, 0.3}},
  };
  for (const auto& [model, mu] : cases) {
    oracle::TwoElementProblem p;
    p.model = &model;
    p.mu = mu;
    p.f = 0.6;
    Loads loads;
    loads.f = Point::Constant(1, 0.6);
    const InnerResult r = inner_minimize_uc(m, model, Vec::Map(mu.data(), 3), loads, SolverOptions{});
    const auto g = oracle::grid_search(p, {-1.0, 1e-6, 1e-6, 1e-6}, {1.0, 4.0, 4.0, 4.0});
    worst = std::max({worst, std::abs(r.u(1) - g[0]), std::abs(r.c(0) - g[1]), std::abs(r.c(1) - g[2]),
                      std::abs(r.c(2) - g[3])});
  }
  return {worst <= 1e-4, "3 instances, max |x_newton - x_grid| " + fmt(worst) + " (<= 1e-4)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("porofick_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  int identical = 0;
  std::string differing;
  for (const auto& name : kRegressionSpecs) {
    std::string out[2];
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / (name + std::to_string(rep));
      const std::string cmd = "\"" POROFICK_CLI "\" " + command_for(name) + " --config " + kRegression + "/" + name +
                              ".ini --out " + dir.string() +
                              (command_for(name) == "scan" ? " --electroneutrality" : "") + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) out[rep] = "exit " + std::to_string(status);
      else out[rep] = slurp(dir / "fields.csv");
    }
    if (!out[0].empty() && out[0] == out[1] && out[0].rfind("exit", 0) != 0) ++identical;
    else differing += " " + name;
  }
  fs::remove_all(root);
  return {identical == static_cast<int>(kRegressionSpecs.size()),
          std::to_string(identical) + "/" + std::to_string(kRegressionSpecs.size()) +
              " regression specs byte-identical" + (differing.empty() ? "" : "; differing:" + differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"constitutive consistency", constitutive_consistency},
      {"Fenchel-Young equality", fenchel_young},
      {"flux decomposition identity", flux_identity},
      {"static uniform case", static_uniform},
      {"static limit of the steady solver", static_limit},
      {"constant-mobility exactness", constant_mobility},
      {"dissipation/power identity", dissipation_power},
      {"scalar maximum principle", maximum_principle},
      {"transformed-heat equivalence", heat_equivalence},
      {"charged uniqueness certificate", charged_uniqueness},
      {"electroneutrality scaling", electroneutrality},
      {"brute-force oracle equivalence", grid_search},
      {"determinism", determinism},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("%s  %2zu %s: %s [%.2fs]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
