#pragma once

#include "porofick/electrostatics.hpp"
#include "porofick/materials.hpp"
#include "porofick/mesh_fem.hpp"
#include "porofick/problem.hpp"
#include "porofick/steady_solver.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace porofick {

enum class ProblemKind {
  StaticIsolated,
  StaticEquilibrated,
  StaticCharged,
  Steady,
  SteadyCharged,
  Thermal,
  ThermalCharged,
  Scan
};

std::string to_string(ProblemKind kind);
std::optional<ProblemKind> kind_from_string(const std::string& s);
/// CLI subcommand that runs the kind: static, steady, thermal or scan.
std::string command_of(ProblemKind kind);
bool is_static(ProblemKind kind);
bool is_charged(ProblemKind kind);

/// Flat, value-comparable description of one run.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::Steady;

  // [domain]
  int dim = 1;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
  int nx = 8, ny = 8;
  std::vector<std::string> dirichlet = {"left"};
  double padding = 2.0;

  // [material]
  std::string model = "swelling_stress";
  double lambda = 1.0, shear = 1.0;  // Lame parameters, used when C is empty
  std::vector<double> C;              // full Voigt matrix, row-major
  std::vector<double> beta = {1.0};
  std::vector<double> biot_M = {1.0};
  std::vector<std::vector<double>> E;  // swelling matrix per component (Voigt, engineering shear)
  std::vector<double> kappa = {1.0};
  std::vector<double> c_eq = {1.0};
  double kappa_theta = 0.0;

  // [transport]
  std::string mobility = "constant";
  std::vector<std::vector<double>> M0 = {{1.0}};  // scalar or d*d entries per component
  double mobility_floor = 1e-8;
  double mobility_theta = 0.0;
  std::vector<double> K0 = {1.0};
  double conductivity_theta = 0.0;
  double conductivity_c = 0.0;
  double reaction_rate = 0.0;
  std::vector<double> reaction_ref;
  double reaction_max = 1e3;
  double reaction_theta = 0.0;
  double heat_source = 0.0;

  // [charges]
  std::vector<double> z;
  double z_dop = 0.0;
  std::vector<double> z_dop_box;  // empty or x0,x1,y0,y1
  double z_dop_box_value = 0.0;
  double epsilon = 1.0, epsilon_outside = 1.0, epsilon_scale = 1.0;

  // [boundary]
  std::vector<double> f, g;
  double alpha = 0.0;
  std::vector<std::string> alpha_sides;
  std::vector<std::vector<double>> mu_ext;  // a[,bx[,by]] per component
  double gamma = 0.0;
  std::vector<double> theta_ext = {0.0};
  std::vector<double> C_total;
  std::vector<double> mu_bar;

  // [solver]
  double damping = 0.7;
  double fp_tol = 1e-8;
  int max_outer = 200;
  bool anderson = false;
  int anderson_window = 3;
  double newton_tol = 1e-12;
  int max_newton = 200;
  std::vector<double> epsilon_hats = {1.0, 0.1, 0.01};

  int components() const;
  bool operator==(const ProblemSpec&) const = default;
};

/// Every violated requirement, with the config line it refers to when known.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parses the sectioned key = value format and validates the result. When
/// `command` names a CLI subcommand and the file has no `kind` key, the kind
/// is inferred: `mu_bar` selects the equilibrated static problem and a `z` key
/// in [charges] the charged variant. An explicit kind must match the command.
ProblemSpec parse_config(const std::string& text, const std::string& command = "");
ProblemSpec load_config(const std::string& path, const std::string& command = "");
/// Inverse of parse_config up to formatting; every number is written with 17
/// significant digits.
std::string serialize(const ProblemSpec& spec);

/// Throws ConfigError listing every invariant violation.
void validate(const ProblemSpec& spec);

// Builders for the solver inputs.
Mesh build_mesh(const ProblemSpec& spec);
FreeEnergy build_free_energy(const ProblemSpec& spec);
TransportModel build_transport(const ProblemSpec& spec);
ChargeModel build_charges(const ProblemSpec& spec);
BoundaryData build_boundary(const ProblemSpec& spec);
Loads build_loads(const ProblemSpec& spec);
SteadyOptions build_steady_options(const ProblemSpec& spec);

}  // namespace porofick
