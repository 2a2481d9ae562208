#pragma once

#include "porofick/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace porofick {

/// phi(e,c) = 1/2 C e_el:e_el + sum_k kappa_k (c_k (ln(c_k/c_eq_k) - 1) + indicator(c_k > 0)),
/// e_el = e - sum_k E_k (c_k - c_eq_k).
struct SwellingStrainModel {
  VoigtMatrix C;               // Voigt stiffness
  std::vector<Voigt> E;        // swelling matrices, engineering Voigt form
  std::vector<double> kappa;   // >= 0
  std::vector<double> c_eq;    // > 0
};

/// phi(e,c) = 1/2 C e:e + sum_k [1/2 M_k (beta_k tr e - c_k + c_eq_k)^2
///            + kappa_k (c_k (ln(c_k/c_eq_k) - 1) + indicator(c_k > 0))].
struct SwellingStressModel {
  VoigtMatrix C;
  std::vector<double> beta;    // Biot coefficient > 0
  std::vector<double> biot_M;  // Biot modulus > 0
  std::vector<double> kappa;
  std::vector<double> c_eq;
};

/// Convex free energy with a temperature-scaled entropic weight
/// kappa(theta) = kappa * clamp(1 + kappa_theta * theta, 0.1, 10).
class FreeEnergy {
 public:
  FreeEnergy(SwellingStrainModel m, double kappa_theta = 0.0);
  FreeEnergy(SwellingStressModel m, double kappa_theta = 0.0);

  int dim() const { return dim_; }
  int voigt() const { return voigt_size(dim_); }
  int components() const { return components_; }
  bool is_swelling_strain() const { return std::holds_alternative<SwellingStrainModel>(model_); }
  const SwellingStrainModel* swelling_strain() const { return std::get_if<SwellingStrainModel>(&model_); }
  const SwellingStressModel* swelling_stress() const { return std::get_if<SwellingStressModel>(&model_); }
  double kappa_theta() const { return kappa_theta_; }

  double kappa(int k, double theta = 0.0) const;
  double c_eq(int k) const;
  /// True when component k carries the entropic barrier (kappa > 0).
  bool has_barrier(int k) const { return kappa(k) > 0.0; }
  bool temperature_dependent() const { return kappa_theta_ != 0.0; }

  /// +infinity outside the effective domain.
  double energy(const Voigt& e, const Conc& c, double theta = 0.0) const;
  Voigt stress(const Voigt& e, const Conc& c, double theta = 0.0) const;
  /// Single-valued selection of the c-subdifferential; empty when some c_k <= 0
  /// carries the barrier.
  std::optional<Conc> chemical_potential(const Voigt& e, const Conc& c, double theta = 0.0) const;
  /// Same as chemical_potential without the entropic terms.
  Conc nonentropic_potential(const Voigt& e, const Conc& c) const;

  VoigtMatrix d2_ee(const Voigt& e, const Conc& c, double theta = 0.0) const;
  CouplingMatrix d2_ec(const Voigt& e, const Conc& c, double theta = 0.0) const;
  ConcMatrix d2_cc(const Voigt& e, const Conc& c, double theta = 0.0) const;

 private:
  std::variant<SwellingStrainModel, SwellingStressModel> model_;
  double kappa_theta_ = 0.0;
  int dim_ = 1;
  int components_ = 1;

  void check_args(const Voigt& e, const Conc& c) const;
  Voigt trace_vector() const;
};

/// Unique c with mu_bar in d_c phi(e,c). Bracketed Newton/bisection for one
/// component, damped Newton for coupled components.
Conc conjugate_concentration(const FreeEnergy& model, const Voigt& e, const Conc& mu_bar,
                             double theta = 0.0);

/// phi*(e, mu) = mu.c - phi(e,c) at c = conjugate_concentration(e, mu).
double conjugate_energy(const FreeEnergy& model, const Voigt& e, const Conc& mu_bar,
                        double theta = 0.0);

enum class MobilityKind { Constant, Linear };

/// Transport laws. Temperature enters through the bounded factors
/// clamp(1 + a*theta, 0.1, 10).
struct TransportModel {
  MobilityKind mobility_kind = MobilityKind::Constant;
  std::vector<DMatrix> M0;       // per component, symmetric positive definite
  double mobility_floor = 1e-8;  // M(c) = max(c, floor) M0 for the linear ansatz
  double mobility_theta = 0.0;
  DMatrix K0;                    // heat conductivity
  double conductivity_theta = 0.0;
  double conductivity_c = 0.0;   // K(c,theta) = K0 f(theta) clamp(1 + a_c c_1, 0.1, 10)
  // r_k(c,theta) = clamp(rate (c_ref_k - c_k) f(theta), -max, max)
  double reaction_rate = 0.0;
  std::vector<double> reaction_ref;
  double reaction_max = 1e3;
  double reaction_theta = 0.0;
  double heat_source = 0.0;      // h(c,theta), constant

  int components() const { return static_cast<int>(M0.size()); }
  void validate(int dim) const;
  DMatrix mobility(int k, double c_k, double theta = 0.0) const;
  DMatrix conductivity(const Conc& c, double theta = 0.0) const;
  Conc reaction(const Conc& c, double theta = 0.0) const;
  double heat(const Conc& c, double theta = 0.0) const;
  bool mobility_depends_on_c() const { return mobility_kind == MobilityKind::Linear; }
  bool temperature_dependent() const {
    return mobility_theta != 0.0 || conductivity_theta != 0.0 || reaction_theta != 0.0;
  }
  bool has_reaction() const { return reaction_rate != 0.0; }
};

/// Charges carried by the diffusant components and the solid.
struct ChargeModel {
  std::vector<double> z;         // per component, constant on the domain
  double z_dop = 0.0;            // background dopand charge on the domain
  std::optional<std::array<double, 4>> z_dop_box;  // x0,x1,y0,y1 region with z_dop_box_value
  double z_dop_box_value = 0.0;
  double epsilon = 1.0;          // permittivity on the domain
  double epsilon_outside = 1.0;  // permittivity in the padding
  double epsilon_scale = 1.0;    // electroneutrality scaling factor
  double padding = 2.0;

  double dopand_at(const Point& x) const;
  bool neutral() const;
};

struct FluxDecomposition {
  Point j_total, j_darcy, j_fick;
  double p = 0.0;
};

/// Splits j = -M(c) grad mu into a Darcy part -c M0 grad p and a Fick part
/// -kappa M0 grad c for component k, with p the non-entropic part of mu.
/// grad_strain has one column per spatial direction.
FluxDecomposition flux_decomposition(const FreeEnergy& model, const TransportModel& transport,
                                     int k, const Voigt& e, const Conc& c, const Point& grad_mu,
                                     const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                                         kMaxComponents, kMaxDim>& grad_c,
                                     const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0,
                                                         kMaxVoigt, kMaxDim>& grad_strain,
                                     double theta = 0.0);

/// Isotropic Voigt stiffness from Lame parameters (plane strain in 2D,
/// lambda + 2 mu in 1D).
VoigtMatrix isotropic_stiffness(int dim, double lambda, double mu);

}  // namespace porofick
