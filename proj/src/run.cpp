#include "porofick/run.hpp"

#include "porofick/static_solver.hpp"
#include "porofick/steady_solver.hpp"
#include "porofick/thermal_solver.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>

namespace porofick {

std::string RunResult::get(const std::string& key) const {
  for (const auto& [k, v] : report)
    if (k == key) return v;
  return "";
}

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17e", v);
  return buf;
}

std::string short_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

Conc to_conc(const std::vector<double>& v) {
  Conc c(static_cast<Index>(v.size()));
  for (size_t k = 0; k < v.size(); ++k) c(static_cast<Index>(k)) = v[k];
  return c;
}

Vec constant_mu(const Conc& mu_bar, Index nodes) {
  Vec mu(mu_bar.size() * nodes);
  for (Index k = 0; k < mu_bar.size(); ++k) mu.segment(k * nodes, nodes).setConstant(mu_bar(k));
  return mu;
}

void add(Report& r, const std::string& key, const std::string& value) { r.emplace_back(key, value); }

void report_static(RunResult& out, const StaticSolution& s) {
  const Index nn = out.mesh->num_nodes();
  out.fields.u = s.u;
  out.fields.c = s.c;
  out.fields.mu = constant_mu(s.mu_bar, nn);
  if (out.has_phi) out.fields.phi = s.phi.size() ? s.phi : Vec::Zero(nn);
  out.converged = true;
  out.solved = true;
  add(out.report, "converged", "true");
  add(out.report, "newton_iterations", std::to_string(s.iterations));
  for (Index k = 0; k < s.mu_bar.size(); ++k) add(out.report, "mu_bar_" + std::to_string(k + 1), num(s.mu_bar(k)));
  add(out.report, "objective", num(s.objective));
  add(out.report, "residual_stationarity", short_num(s.stationarity));
  add(out.report, "residual_content", short_num(s.feasibility));
  // mu is constant at a static state, so both rates vanish identically.
  add(out.report, "dissipation", num(0.0));
  add(out.report, "power", num(0.0));
  for (size_t i = 0; i < s.history.size(); ++i)
    out.history.push_back({static_cast<int>(i + 1), s.history[i], 0.0});
}

void report_steady(RunResult& out, const SteadyState& st, const ProblemSpec& spec, const TransportModel& transport,
                   const BoundaryData& boundary, const Vec* theta) {
  out.fields.u = st.fields.u;
  out.fields.c = st.fields.c;
  out.fields.mu = st.fields.mu;
  if (out.has_phi) out.fields.phi = st.fields.phi.size() ? st.fields.phi : Vec::Zero(out.mesh->num_nodes());
  out.converged = st.converged;
  out.solved = true;
  add(out.report, "converged", st.converged ? "true" : "false");
  add(out.report, "outer_iterations", std::to_string(st.outer_iterations));
  add(out.report, "fp_residual", short_num(st.fp_residual));
  if (!st.objective_history.empty()) add(out.report, "objective", num(st.objective_history.back()));
  const EnergyBalance b = steady_energy_balance(*out.mesh, transport, boundary, st.fields.c, st.fields.mu, true, theta);
  add(out.report, "dissipation", num(b.dissipation));
  add(out.report, "power", num(b.power));
  add(out.report, "balance_residual", short_num(b.relative_residual()));
  if (spec.components() == 1 && !transport.has_reaction()) {
    const auto mp = check_maximum_principle(*out.mesh, st.fields.mu, boundary, 1);
    add(out.report, "max_principle", mp.pass ? "pass" : "fail");
    add(out.report, "max_principle_margin", short_num(mp.margin));
  }
  for (size_t i = 0; i < st.history.size(); ++i)
    out.history.push_back({static_cast<int>(i + 1), st.history[i], st.objective_history[i]});
}

void run_scan(RunResult& out, const ProblemSpec& spec, const FreeEnergy& model, const Loads& loads,
              const RunOptions& options) {
  const Mesh& mesh = *out.mesh;
  const int n = spec.components();
  const Conc total = to_conc(spec.C_total);
  const SolverOptions opts = [&] {
    SolverOptions o = default_domain_options();
    o.tol_grad = spec.newton_tol;
    o.max_newton = spec.max_newton;
    return o;
  }();
  std::mutex lock;
  std::map<double, StaticSolution> solutions;
  const ScanReport rep = electroneutrality_scan(
      build_charges(spec), spec.epsilon_hats,
      [&](const ChargeModel& charges) {
        const StaticSolution s = solve_static_charged(mesh, model, charges, loads, total, opts);
        const ElectrostaticField ef = solve_truncated_poisson(mesh, charges, n, s.c, s.u);
        ScanMember m;
        m.d_norm = ef.d_norm;
        m.charge_residual = ef.charge_residual;
        std::lock_guard<std::mutex> g(lock);
        solutions.emplace(charges.epsilon_scale, s);
        return m;
      },
      options.threads);
  out.scan = rep;
  // Fields of the first scale in the list; the key repeats the scan's own product.
  const StaticSolution& first = solutions.at(spec.epsilon_scale * spec.epsilon_hats.front());
  report_static(out, first);
  out.history.clear();
  add(out.report, "members", std::to_string(rep.members.size()));
  if (rep.neutral) {
    add(out.report, "slope_d", "NEUTRAL");
    add(out.report, "slope_residual", "NEUTRAL");
  } else {
    add(out.report, "slope_d", num(rep.slope_d));
    add(out.report, "slope_residual", num(rep.slope_residual));
  }
}

}  // namespace

RunResult run(const ProblemSpec& spec, const RunOptions& options) {
  validate(spec);
  const auto start = std::chrono::steady_clock::now();
  RunResult out;
  out.kind = spec.kind;
  out.components = spec.components();
  out.mesh = std::make_shared<const Mesh>(build_mesh(spec));
  out.has_phi = is_charged(spec.kind);
  out.has_theta = spec.kind == ProblemKind::Thermal || spec.kind == ProblemKind::ThermalCharged;
  add(out.report, "kind", to_string(spec.kind));

  const Mesh& mesh = *out.mesh;
  const FreeEnergy model = build_free_energy(spec);
  const Loads loads = build_loads(spec);
  SolverOptions domain = default_domain_options();
  domain.tol_grad = spec.newton_tol;
  domain.max_newton = spec.max_newton;

  try {
    switch (spec.kind) {
      case ProblemKind::StaticIsolated:
        report_static(out, solve_static_isolated(mesh, model, loads, to_conc(spec.C_total), domain));
        break;
      case ProblemKind::StaticEquilibrated:
        report_static(out, solve_static_equilibrated(mesh, model, loads, to_conc(spec.mu_bar), domain));
        break;
      case ProblemKind::StaticCharged:
        report_static(out, solve_static_charged(mesh, model, build_charges(spec), loads, to_conc(spec.C_total), domain));
        break;
      case ProblemKind::Steady: {
        const TransportModel transport = build_transport(spec);
        const BoundaryData boundary = build_boundary(spec);
        report_steady(out, solve_steady(mesh, model, transport, boundary, loads, build_steady_options(spec)), spec,
                      transport, boundary, nullptr);
        break;
      }
      case ProblemKind::SteadyCharged: {
        const TransportModel transport = build_transport(spec);
        const BoundaryData boundary = build_boundary(spec);
        report_steady(out,
                      solve_steady_charged(mesh, model, transport, build_charges(spec), boundary, loads,
                                           build_steady_options(spec)),
                      spec, transport, boundary, nullptr);
        break;
      }
      case ProblemKind::Thermal:
      case ProblemKind::ThermalCharged: {
        const TransportModel transport = build_transport(spec);
        const BoundaryData boundary = build_boundary(spec);
        const ThermalState st =
            spec.kind == ProblemKind::Thermal
                ? solve_steady_thermal(mesh, model, transport, boundary, loads, build_steady_options(spec))
                : solve_steady_charged_thermal(mesh, model, transport, build_charges(spec), boundary, loads,
                                               build_steady_options(spec));
        report_steady(out, st, spec, transport, boundary, &st.theta_tilde);
        out.fields.theta = st.fields.theta;
        add(out.report, "heat_residual", short_num(st.heat_residual));
        break;
      }
      case ProblemKind::Scan:
        run_scan(out, spec, model, loads, options);
        break;
    }
  } catch (const SolverError& e) {
    out.converged = false;
    add(out.report, "converged", "false");
    add(out.report, "error_module", e.module());
    add(out.report, "error", e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  add(out.report, "wall_clock", short_num(secs));
  return out;
}

std::string fields_csv(const RunResult& r) {
  const Mesh& mesh = *r.mesh;
  const int d = mesh.dim();
  const Index nn = mesh.num_nodes();
  const int n = r.components;
  std::string s = d == 2 ? "node,x,y,u_x,u_y" : "node,x,u_x";
  for (int k = 1; k <= n; ++k) s += ",c_" + std::to_string(k);
  for (int k = 1; k <= n; ++k) s += ",mu_" + std::to_string(k);
  if (r.has_theta) s += ",theta";
  if (r.has_phi) s += ",phi";
  s += "\n";
  for (Index i = 0; i < nn; ++i) {
    s += std::to_string(i);
    for (int a = 0; a < d; ++a) s += "," + num(mesh.node(i)(a));
    for (int a = 0; a < d; ++a) s += "," + num(r.fields.u(d * i + a));
    for (int k = 0; k < n; ++k) s += "," + num(r.fields.c(k * nn + i));
    for (int k = 0; k < n; ++k) s += "," + num(r.fields.mu(k * nn + i));
    if (r.has_theta) s += "," + num(r.fields.theta(i));
    if (r.has_phi) s += "," + num(r.fields.phi(i));
    s += "\n";
  }
  return s;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cli_io", "cannot write " + path.string());
  f << text;
  if (!f) throw Error("cli_io", "write failed for " + path.string());
}

}  // namespace

void write_fields(const RunResult& result, const std::filesystem::path& path) {
  write_text(path, fields_csv(result));
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (result.solved) write_fields(result, dir / "fields.csv");
  std::string rep;
  for (const auto& [k, v] : result.report) rep += k + ": " + v + "\n";
  write_text(dir / "report.txt", rep);
  if (!is_static(result.kind) && result.kind != ProblemKind::Scan) {
    std::string h = "iteration,fp_residual,objective\n";
    for (const auto& row : result.history)
      h += std::to_string(row.iteration) + "," + num(row.residual) + "," + num(row.objective) + "\n";
    write_text(dir / "history.csv", h);
  }
  if (result.scan) {
    std::string s = "epsilon_hat,d_norm,charge_residual,slope\n";
    for (const auto& m : result.scan->members)
      s += num(m.epsilon_hat) + "," + num(m.d_norm) + "," + num(m.charge_residual) + ",\n";
    if (result.scan->neutral)
      s += "slope,NEUTRAL,NEUTRAL,\n";
    else
      s += "slope," + num(result.scan->slope_d) + "," + num(result.scan->slope_residual) + ",\n";
    write_text(dir / "scan.csv", s);
  }
}

}  // namespace porofick
