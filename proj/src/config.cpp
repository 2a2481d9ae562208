#include "porofick/config.hpp"

#include "porofick/static_solver.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace porofick {

std::string to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::StaticIsolated: return "static_isolated";
    case ProblemKind::StaticEquilibrated: return "static_equilibrated";
    case ProblemKind::StaticCharged: return "static_charged";
    case ProblemKind::Steady: return "steady";
    case ProblemKind::SteadyCharged: return "steady_charged";
    case ProblemKind::Thermal: return "thermal";
    case ProblemKind::ThermalCharged: return "thermal_charged";
    case ProblemKind::Scan: return "scan";
  }
  return "unknown";
}

std::optional<ProblemKind> kind_from_string(const std::string& s) {
  for (ProblemKind k : {ProblemKind::StaticIsolated, ProblemKind::StaticEquilibrated, ProblemKind::StaticCharged,
                        ProblemKind::Steady, ProblemKind::SteadyCharged, ProblemKind::Thermal,
                        ProblemKind::ThermalCharged, ProblemKind::Scan})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string command_of(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::StaticIsolated:
    case ProblemKind::StaticEquilibrated:
    case ProblemKind::StaticCharged: return "static";
    case ProblemKind::Steady:
    case ProblemKind::SteadyCharged: return "steady";
    case ProblemKind::Thermal:
    case ProblemKind::ThermalCharged: return "thermal";
    case ProblemKind::Scan: return "scan";
  }
  return "";
}

bool is_static(ProblemKind kind) { return command_of(kind) == "static"; }

bool is_charged(ProblemKind kind) {
  return kind == ProblemKind::StaticCharged || kind == ProblemKind::SteadyCharged ||
         kind == ProblemKind::ThermalCharged || kind == ProblemKind::Scan;
}

int ProblemSpec::components() const { return static_cast<int>(kappa.size()); }

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::string s = "invalid configuration:";
  for (const auto& i : issues) s += "\n  " + i;
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : Error("cli_io", join_issues(issues)), issues_(std::move(issues)) {}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

bool to_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

bool to_int(const std::string& s, int& out) {
  double d;
  if (!to_double(s, d) || d != static_cast<double>(static_cast<int>(d))) return false;
  out = static_cast<int>(d);
  return true;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

std::string fmt_list(const std::vector<std::string>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

// One key of the format: how to read it into a spec and how to write it back.
struct Field {
  std::string section, key;
  bool indexed = false;  // key, key_2, key_3, key_4 address components
  std::function<bool(ProblemSpec&, const std::string&, int)> read;
  std::function<std::vector<std::string>(const ProblemSpec&)> write;  // one value per index
};

Field real(const std::string& sec, const std::string& key, double ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) { return to_double(v, s.*m); },
          [m](const ProblemSpec& s) { return std::vector<std::string>{fmt(s.*m)}; }};
}

Field integer(const std::string& sec, const std::string& key, int ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) { return to_int(v, s.*m); },
          [m](const ProblemSpec& s) { return std::vector<std::string>{std::to_string(s.*m)}; }};
}

Field boolean(const std::string& sec, const std::string& key, bool ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) {
            if (v == "true" || v == "1" || v == "yes") return (s.*m = true), true;
            if (v == "false" || v == "0" || v == "no") return (s.*m = false), true;
            return false;
          },
          [m](const ProblemSpec& s) { return std::vector<std::string>{s.*m ? "true" : "false"}; }};
}

Field text(const std::string& sec, const std::string& key, std::string ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) { return (s.*m = v), !v.empty(); },
          [m](const ProblemSpec& s) { return std::vector<std::string>{s.*m}; }};
}

bool read_reals(const std::string& v, std::vector<double>& out) {
  out.clear();
  for (const auto& item : split_list(v)) {
    double d;
    if (!to_double(item, d)) return false;
    out.push_back(d);
  }
  return true;
}

Field reals(const std::string& sec, const std::string& key, std::vector<double> ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) { return read_reals(v, s.*m); },
          [m](const ProblemSpec& s) { return std::vector<std::string>{fmt_list(s.*m)}; }};
}

Field words(const std::string& sec, const std::string& key, std::vector<std::string> ProblemSpec::*m) {
  return {sec, key, false,
          [m](ProblemSpec& s, const std::string& v, int) { return (s.*m = split_list(v)), true; },
          [m](const ProblemSpec& s) { return std::vector<std::string>{fmt_list(s.*m)}; }};
}

Field per_component(const std::string& sec, const std::string& key,
                    std::vector<std::vector<double>> ProblemSpec::*m) {
  return {sec, key, true,
          [m](ProblemSpec& s, const std::string& v, int idx) {
            auto& list = s.*m;
            if (static_cast<int>(list.size()) <= idx) list.resize(static_cast<size_t>(idx + 1));
            return read_reals(v, list[static_cast<size_t>(idx)]);
          },
          [m](const ProblemSpec& s) {
            std::vector<std::string> out;
            for (const auto& row : s.*m) out.push_back(fmt_list(row));
            return out;
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> t;
    t.push_back(integer("domain", "dim", &ProblemSpec::dim));
    t.push_back({"domain", "x", false,
                 [](ProblemSpec& s, const std::string& v, int) {
                   std::vector<double> r;
                   if (!read_reals(v, r) || r.size() != 2) return false;
                   s.x0 = r[0];
                   s.x1 = r[1];
                   return true;
                 },
                 [](const ProblemSpec& s) { return std::vector<std::string>{fmt_list({s.x0, s.x1})}; }});
    t.push_back({"domain", "y", false,
                 [](ProblemSpec& s, const std::string& v, int) {
                   std::vector<double> r;
                   if (!read_reals(v, r) || r.size() != 2) return false;
                   s.y0 = r[0];
                   s.y1 = r[1];
                   return true;
                 },
                 [](const ProblemSpec& s) { return std::vector<std::string>{fmt_list({s.y0, s.y1})}; }});
    t.push_back({"domain", "n", false,
                 [](ProblemSpec& s, const std::string& v, int) {
                   const auto items = split_list(v);
                   if (items.empty() || items.size() > 2) return false;
                   if (!to_int(items[0], s.nx)) return false;
                   s.ny = s.nx;
                   return items.size() == 1 || to_int(items[1], s.ny);
                 },
                 [](const ProblemSpec& s) {
                   return std::vector<std::string>{std::to_string(s.nx) + ", " + std::to_string(s.ny)};
                 }});
    t.push_back(words("domain", "dirichlet", &ProblemSpec::dirichlet));
    t.push_back(real("domain", "padding", &ProblemSpec::padding));

    t.push_back(text("material", "model", &ProblemSpec::model));
    t.push_back(real("material", "lambda", &ProblemSpec::lambda));
    t.push_back(real("material", "shear", &ProblemSpec::shear));
    t.push_back(reals("material", "C", &ProblemSpec::C));
    t.push_back(reals("material", "beta", &ProblemSpec::beta));
    t.push_back(reals("material", "biot_M", &ProblemSpec::biot_M));
    t.push_back(per_component("material", "E", &ProblemSpec::E));
    t.push_back(reals("material", "kappa", &ProblemSpec::kappa));
    t.push_back(reals("material", "c_eq", &ProblemSpec::c_eq));
    t.push_back(real("material", "kappa_theta", &ProblemSpec::kappa_theta));

    t.push_back(text("transport", "mobility", &ProblemSpec::mobility));
    t.push_back(per_component("transport", "M0", &ProblemSpec::M0));
    t.push_back(real("transport", "mobility_floor", &ProblemSpec::mobility_floor));
    t.push_back(real("transport", "mobility_theta", &ProblemSpec::mobility_theta));
    t.push_back(reals("transport", "K0", &ProblemSpec::K0));
    t.push_back(real("transport", "conductivity_theta", &ProblemSpec::conductivity_theta));
    t.push_back(real("transport", "conductivity_c", &ProblemSpec::conductivity_c));
    t.push_back(real("transport", "reaction_rate", &ProblemSpec::reaction_rate));
    t.push_back(reals("transport", "reaction_ref", &ProblemSpec::reaction_ref));
    t.push_back(real("transport", "reaction_max", &ProblemSpec::reaction_max));
    t.push_back(real("transport", "reaction_theta", &ProblemSpec::reaction_theta));
    t.push_back(real("transport", "heat_source", &ProblemSpec::heat_source));

    t.push_back(reals("charges", "z", &ProblemSpec::z));
    t.push_back(real("charges", "z_dop", &ProblemSpec::z_dop));
    t.push_back(reals("charges", "z_dop_box", &ProblemSpec::z_dop_box));
    t.push_back(real("charges", "z_dop_box_value", &ProblemSpec::z_dop_box_value));
    t.push_back(real("charges", "epsilon", &ProblemSpec::epsilon));
    t.push_back(real("charges", "epsilon_outside", &ProblemSpec::epsilon_outside));
    t.push_back(real("charges", "epsilon_scale", &ProblemSpec::epsilon_scale));

    t.push_back(reals("boundary", "f", &ProblemSpec::f));
    t.push_back(reals("boundary", "g", &ProblemSpec::g));
    t.push_back(real("boundary", "alpha", &ProblemSpec::alpha));
    t.push_back(words("boundary", "alpha_sides", &ProblemSpec::alpha_sides));
    t.push_back(per_component("boundary", "mu_ext", &ProblemSpec::mu_ext));
    t.push_back(real("boundary", "gamma", &ProblemSpec::gamma));
    t.push_back(reals("boundary", "theta_ext", &ProblemSpec::theta_ext));
    t.push_back(reals("boundary", "C_total", &ProblemSpec::C_total));
    t.push_back(reals("boundary", "mu_bar", &ProblemSpec::mu_bar));

    t.push_back({"solver", "kind", false,
                 [](ProblemSpec& s, const std::string& v, int) {
                   const auto k = kind_from_string(v);
                   if (k) s.kind = *k;
                   return k.has_value();
                 },
                 [](const ProblemSpec& s) { return std::vector<std::string>{to_string(s.kind)}; }});
    t.push_back(real("solver", "damping", &ProblemSpec::damping));
    t.push_back(real("solver", "fp_tol", &ProblemSpec::fp_tol));
    t.push_back(integer("solver", "max_outer", &ProblemSpec::max_outer));
    t.push_back(boolean("solver", "anderson", &ProblemSpec::anderson));
    t.push_back(integer("solver", "anderson_window", &ProblemSpec::anderson_window));
    t.push_back(real("solver", "newton_tol", &ProblemSpec::newton_tol));
    t.push_back(integer("solver", "max_newton", &ProblemSpec::max_newton));
    t.push_back(reals("solver", "epsilon_hats", &ProblemSpec::epsilon_hats));
    return t;
  }();
  return table;
}

using LineMap = std::map<std::string, int>;

std::string at_line(const LineMap& lines, const std::string& key) {
  const auto it = lines.find(key);
  return it == lines.end() ? "" : "line " + std::to_string(it->second) + ": ";
}

void validate_impl(const ProblemSpec& s, const LineMap& lines, std::vector<std::string>& issues) {
  auto fail = [&](const std::string& key, const std::string& what) { issues.push_back(at_line(lines, key) + what); };
  const int d = s.dim;
  if (d != 1 && d != 2) {
    fail("dim", "dim must be 1 or 2");
    return;
  }
  if (s.nx < 1 || (d == 2 && s.ny < 1)) fail("n", "subdivisions must be >= 1");
  if (!(s.x1 > s.x0) || (d == 2 && !(s.y1 > s.y0))) fail(d == 2 && s.x1 > s.x0 ? "y" : "x", "domain has zero extent");
  if (s.dirichlet.empty()) fail("dirichlet", "elasticity needs at least one Dirichlet side");
  for (const auto& side : s.dirichlet) {
    const auto sd = side_from_string(side);
    if (!sd || (d == 1 && (*sd == Side::Bottom || *sd == Side::Top)))
      fail("dirichlet", "unknown side '" + side + "'");
  }
  if (is_charged(s.kind) && !(s.padding > 1.0)) fail("padding", "padding factor must exceed 1");

  const int n = s.components();
  const int voigt = voigt_size(d);
  if (n < 1 || n > kMaxComponents) fail("kappa", "number of components (entries of kappa) must be 1..4");
  if (static_cast<int>(s.c_eq.size()) != n) fail("c_eq", "c_eq needs one entry per component");
  if (s.model == "swelling_stress") {
    if (static_cast<int>(s.beta.size()) != n) fail("beta", "beta needs one entry per component");
    if (static_cast<int>(s.biot_M.size()) != n) fail("biot_M", "biot_M needs one entry per component");
  } else if (s.model == "swelling_strain") {
    if (static_cast<int>(s.E.size()) != n) fail("E", "E needs one entry per component (E, E_2, ...)");
    for (const auto& e : s.E)
      if (static_cast<int>(e.size()) != voigt) fail("E", "E needs " + std::to_string(voigt) + " Voigt entries");
  } else {
    fail("model", "model must be swelling_stress or swelling_strain");
  }
  if (!s.C.empty() && static_cast<int>(s.C.size()) != voigt * voigt)
    fail("C", "C needs " + std::to_string(voigt * voigt) + " entries");
  if (issues.empty()) {
    try {
      (void)build_free_energy(s);
    } catch (const ModelError& e) {
      fail("model", e.what());
    }
  }

  if (s.mobility != "constant" && s.mobility != "linear") fail("mobility", "mobility must be constant or linear");
  const bool transport_needed = !is_static(s.kind) && s.kind != ProblemKind::Scan;
  if (transport_needed) {
    if (static_cast<int>(s.M0.size()) != n) fail("M0", "M0 needs one entry per component (M0, M0_2, ...)");
    for (const auto& m : s.M0)
      if (m.size() != 1 && static_cast<int>(m.size()) != d * d) fail("M0", "M0 needs 1 or d*d entries");
    if (!(s.mobility_floor > 0.0)) fail("mobility_floor", "mobility floor must be positive");
    if (s.reaction_rate != 0.0 && static_cast<int>(s.reaction_ref.size()) != n)
      fail("reaction_ref", "reaction_ref needs one entry per component");
    if (!(s.alpha > 0.0))
      fail("alpha", "alpha must be positive on a positive-measure part of the boundary for non-static kinds");
    for (const auto& side : s.alpha_sides) {
      const auto sd = side_from_string(side);
      if (!sd || (d == 1 && (*sd == Side::Bottom || *sd == Side::Top)))
        fail("alpha_sides", "unknown side '" + side + "'");
    }
    if (static_cast<int>(s.mu_ext.size()) != n) fail("mu_ext", "mu_ext needs one entry per component");
    for (const auto& m : s.mu_ext)
      if (m.empty() || static_cast<int>(m.size()) > d + 1) fail("mu_ext", "mu_ext takes a[,bx[,by]]");
    if (issues.empty()) {
      try {
        build_transport(s).validate(d);
      } catch (const ModelError& e) {
        fail("M0", e.what());
      }
    }
  }
  const bool thermal = s.kind == ProblemKind::Thermal || s.kind == ProblemKind::ThermalCharged;
  if (thermal) {
    if (!(s.gamma > 0.0)) fail("gamma", "gamma must be positive for thermal kinds");
    if (s.theta_ext.empty() || static_cast<int>(s.theta_ext.size()) > d + 1)
      fail("theta_ext", "theta_ext takes a[,bx[,by]]");
    if (s.K0.size() != 1 && static_cast<int>(s.K0.size()) != d * d) fail("K0", "K0 needs 1 or d*d entries");
  }
  if (s.kind == ProblemKind::Thermal) {
    if (n != 1) fail("kind", "thermal needs exactly one component (use thermal_charged otherwise)");
    if (s.reaction_rate != 0.0) fail("reaction_rate", "thermal needs r = 0 (use thermal_charged otherwise)");
  }
  if (is_charged(s.kind)) {
    if (static_cast<int>(s.z.size()) != n) fail("z", "z needs one entry per component");
    if (!(s.epsilon > 0.0) || !(s.epsilon_outside > 0.0) || !(s.epsilon_scale > 0.0))
      fail("epsilon", "permittivity must be positive");
    if (!s.z_dop_box.empty() && static_cast<int>(s.z_dop_box.size()) != 2 * d)
      fail("z_dop_box", "z_dop_box takes x0,x1[,y0,y1]");
  }
  if (!s.f.empty() && static_cast<int>(s.f.size()) != d) fail("f", "f needs d entries");
  if (!s.g.empty() && static_cast<int>(s.g.size()) != d) fail("g", "g needs d entries");
  if (!(s.alpha >= 0.0)) fail("alpha", "alpha must be non-negative");
  if (s.kind == ProblemKind::StaticIsolated || s.kind == ProblemKind::StaticCharged || s.kind == ProblemKind::Scan) {
    if (static_cast<int>(s.C_total.size()) != n) fail("C_total", "C_total needs one entry per component");
  }
  if (s.kind == ProblemKind::StaticEquilibrated && static_cast<int>(s.mu_bar.size()) != n)
    fail("mu_bar", "mu_bar needs one entry per component");
  if (s.kind == ProblemKind::Scan) {
    if (s.epsilon_hats.size() < 3) fail("epsilon_hats", "scan needs at least three scales");
    for (double e : s.epsilon_hats)
      if (!(e > 0.0)) fail("epsilon_hats", "scales must be positive");
  }

  if (!(s.damping > 0.0 && s.damping <= 1.0)) fail("damping", "damping must lie in (0,1]");
  if (!(s.fp_tol > 0.0)) fail("fp_tol", "fp_tol must be positive");
  if (s.max_outer < 1) fail("max_outer", "max_outer must be >= 1");
  if (s.anderson_window < 1) fail("anderson_window", "anderson_window must be >= 1");
  if (!(s.newton_tol > 0.0)) fail("newton_tol", "newton_tol must be positive");
  if (s.max_newton < 1) fail("max_newton", "max_newton must be >= 1");
}

}  // namespace

void validate(const ProblemSpec& spec) {
  std::vector<std::string> issues;
  validate_impl(spec, {}, issues);
  if (!issues.empty()) throw ConfigError(issues);
}

ProblemSpec parse_config(const std::string& input, const std::string& command) {
  ProblemSpec spec;
  std::vector<std::string> issues;
  LineMap lines;
  std::set<std::string> reset;  // indexed keys whose defaults were dropped
  std::string section;
  std::istringstream in(input);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> known = {"domain", "material", "transport", "charges", "boundary", "solver"};
      if (!known.count(section))
        issues.push_back("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      issues.push_back("line " + std::to_string(lineno) + ": key '" + key + "' outside any section");
      continue;
    }
    const Field* field = nullptr;
    int index = 0;
    for (const auto& f : fields()) {
      if (f.section != section) continue;
      if (f.key == key) {
        field = &f;
        break;
      }
      if (f.indexed && key.rfind(f.key + "_", 0) == 0) {
        int k;
        if (to_int(key.substr(f.key.size() + 1), k) && k >= 2 && k <= kMaxComponents) {
          field = &f;
          index = k - 1;
          break;
        }
      }
    }
    if (!field) {
      issues.push_back("line " + std::to_string(lineno) + ": unknown key '" + key + "' in [" + section + "]");
      continue;
    }
    if (lines.count(key)) {
      issues.push_back("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
      continue;
    }
    lines[key] = lineno;
    if (field->indexed && !reset.count(field->key)) {
      reset.insert(field->key);
      // Drop list defaults so that only configured components remain.
      if (field->key == "M0") spec.M0.clear();
      if (field->key == "E") spec.E.clear();
      if (field->key == "mu_ext") spec.mu_ext.clear();
    }
    if (!field->read(spec, value, index))
      issues.push_back("line " + std::to_string(lineno) + ": cannot read '" + value + "' for key '" + key + "'");
  }
  for (const auto& [k, rows] : std::map<std::string, const std::vector<std::vector<double>>*>{
           {"M0", &spec.M0}, {"E", &spec.E}, {"mu_ext", &spec.mu_ext}})
    for (size_t i = 0; i < rows->size(); ++i)
      if ((*rows)[i].empty() && reset.count(k))
        issues.push_back(at_line(lines, k) + k + ": component " + std::to_string(i + 1) + " is missing");
  if (!command.empty() && issues.empty()) {
    static const std::set<std::string> commands = {"static", "steady", "thermal", "scan"};
    if (!commands.count(command)) {
      issues.push_back("unknown command '" + command + "'");
    } else if (lines.count("kind")) {
      if (command_of(spec.kind) != command)
        issues.push_back(at_line(lines, "kind") + "kind " + to_string(spec.kind) + " cannot run under '" +
                         command + "'");
    } else {
      const bool charged = lines.count("z") > 0;
      if (command == "static")
        spec.kind = lines.count("mu_bar") ? ProblemKind::StaticEquilibrated
                                          : charged ? ProblemKind::StaticCharged : ProblemKind::StaticIsolated;
      else if (command == "steady")
        spec.kind = charged ? ProblemKind::SteadyCharged : ProblemKind::Steady;
      else if (command == "thermal")
        spec.kind = charged ? ProblemKind::ThermalCharged : ProblemKind::Thermal;
      else
        spec.kind = ProblemKind::Scan;
    }
  }
  if (issues.empty()) validate_impl(spec, lines, issues);
  if (!issues.empty()) throw ConfigError(issues);
  return spec;
}

ProblemSpec load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file '" + path + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), command);
}

std::string serialize(const ProblemSpec& spec) {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (f.section != section) {
      out += (section.empty() ? "[" : "\n[") + f.section + "]\n";
      section = f.section;
    }
    const auto values = f.write(spec);
    for (size_t i = 0; i < values.size(); ++i) {
      const std::string key = (f.indexed && i > 0) ? f.key + "_" + std::to_string(i + 1) : f.key;
      out += key + " = " + values[i] + "\n";
    }
  }
  return out;
}

Mesh build_mesh(const ProblemSpec& s) {
  StructuredDomain d;
  d.dim = s.dim;
  d.x0 = s.x0;
  d.x1 = s.x1;
  d.y0 = s.y0;
  d.y1 = s.y1;
  d.nx = s.nx;
  d.ny = s.dim == 2 ? s.ny : 1;
  for (const auto& side : s.dirichlet)
    if (const auto sd = side_from_string(side)) d.dirichlet_sides.push_back(*sd);
  Mesh mesh = build_structured_mesh(d);
  if (is_charged(s.kind)) return with_padding(mesh, s.padding);
  return mesh;
}

namespace {

DMatrix tensor(const std::vector<double>& v, int d) {
  if (v.size() == 1) return DMatrix(v[0] * DMatrix::Identity(d, d));
  DMatrix m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = v[static_cast<size_t>(i * d + j)];
  return m;
}

AffineField affine(const std::vector<double>& v) {
  AffineField a;
  if (!v.empty()) a.a = v[0];
  if (v.size() > 1) a.bx = v[1];
  if (v.size() > 2) a.by = v[2];
  return a;
}

}  // namespace

FreeEnergy build_free_energy(const ProblemSpec& s) {
  const int voigt = voigt_size(s.dim);
  VoigtMatrix C;
  if (s.C.empty()) {
    C = isotropic_stiffness(s.dim, s.lambda, s.shear);
  } else {
    C.resize(voigt, voigt);
    for (int i = 0; i < voigt; ++i)
      for (int j = 0; j < voigt; ++j) C(i, j) = s.C[static_cast<size_t>(i * voigt + j)];
  }
  if (s.model == "swelling_strain") {
    SwellingStrainModel m;
    m.C = C;
    for (const auto& e : s.E) {
      Voigt v(voigt);
      for (int i = 0; i < voigt; ++i) v(i) = e[static_cast<size_t>(i)];
      m.E.push_back(v);
    }
    m.kappa = s.kappa;
    m.c_eq = s.c_eq;
    return FreeEnergy(std::move(m), s.kappa_theta);
  }
  SwellingStressModel m;
  m.C = C;
  m.beta = s.beta;
  m.biot_M = s.biot_M;
  m.kappa = s.kappa;
  m.c_eq = s.c_eq;
  return FreeEnergy(std::move(m), s.kappa_theta);
}

TransportModel build_transport(const ProblemSpec& s) {
  TransportModel t;
  t.mobility_kind = s.mobility == "linear" ? MobilityKind::Linear : MobilityKind::Constant;
  for (const auto& m : s.M0) t.M0.push_back(tensor(m, s.dim));
  t.mobility_floor = s.mobility_floor;
  t.mobility_theta = s.mobility_theta;
  if (!s.K0.empty()) t.K0 = tensor(s.K0, s.dim);
  t.conductivity_theta = s.conductivity_theta;
  t.conductivity_c = s.conductivity_c;
  t.reaction_rate = s.reaction_rate;
  t.reaction_ref = s.reaction_ref;
  t.reaction_max = s.reaction_max;
  t.reaction_theta = s.reaction_theta;
  t.heat_source = s.heat_source;
  return t;
}

ChargeModel build_charges(const ProblemSpec& s) {
  ChargeModel c;
  c.z = s.z;
  c.z_dop = s.z_dop;
  if (!s.z_dop_box.empty()) {
    std::array<double, 4> box{s.z_dop_box[0], s.z_dop_box[1], 0.0, 0.0};
    if (s.z_dop_box.size() == 4) {
      box[2] = s.z_dop_box[2];
      box[3] = s.z_dop_box[3];
    }
    c.z_dop_box = box;
  }
  c.z_dop_box_value = s.z_dop_box_value;
  c.epsilon = s.epsilon;
  c.epsilon_outside = s.epsilon_outside;
  c.epsilon_scale = s.epsilon_scale;
  c.padding = s.padding;
  return c;
}

BoundaryData build_boundary(const ProblemSpec& s) {
  BoundaryData b;
  b.alpha = s.alpha;
  for (const auto& side : s.alpha_sides)
    if (const auto sd = side_from_string(side)) b.alpha_sides.push_back(*sd);
  for (const auto& m : s.mu_ext) b.mu_ext.push_back(affine(m));
  b.gamma = s.gamma;
  b.theta_ext = affine(s.theta_ext);
  return b;
}

Loads build_loads(const ProblemSpec& s) {
  Loads l;
  if (!s.f.empty()) l.f = Eigen::Map<const Eigen::VectorXd>(s.f.data(), static_cast<Index>(s.f.size()));
  if (!s.g.empty()) l.g = Eigen::Map<const Eigen::VectorXd>(s.g.data(), static_cast<Index>(s.g.size()));
  return l;
}

SteadyOptions build_steady_options(const ProblemSpec& s) {
  SteadyOptions o;
  o.damping = s.damping;
  o.fp_tol = s.fp_tol;
  o.max_outer = s.max_outer;
  o.anderson = s.anderson;
  o.anderson_window = s.anderson_window;
  o.inner.tol_grad = s.newton_tol;
  o.inner.max_newton = s.max_newton;
  return o;
}

}  // namespace porofick
