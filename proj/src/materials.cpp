#include "porofick/materials.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace porofick {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double temperature_factor(double a, double theta) {
  return std::clamp(1.0 + a * theta, 0.1, 10.0);
}

template <class M>
int check_common(const M& m, std::size_t ncomp) {
  if (m.C.rows() != m.C.cols() || (m.C.rows() != 1 && m.C.rows() != 3))
    throw ModelError("stiffness must be 1x1 (1D) or 3x3 (2D) in Voigt form");
  if ((m.C - m.C.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.C.cwiseAbs().maxCoeff())
    throw ModelError("stiffness is not symmetric");
  Eigen::SelfAdjointEigenSolver<VoigtMatrix> eig(m.C);
  if (eig.eigenvalues().minCoeff() <= 0.0) throw ModelError("stiffness is not positive definite");
  if (ncomp == 0 || ncomp > static_cast<std::size_t>(kMaxComponents))
    throw ModelError("number of components must be between 1 and 4");
  if (m.kappa.size() != ncomp || m.c_eq.size() != ncomp)
    throw ModelError("kappa and c_eq need one entry per component");
  for (std::size_t k = 0; k < ncomp; ++k) {
    if (!(m.kappa[k] >= 0.0)) throw ModelError("kappa must be non-negative");
    if (!(m.c_eq[k] > 0.0)) throw ModelError("c_eq must be positive");
  }
  return m.C.rows() == 1 ? 1 : 2;
}

}  // namespace

FreeEnergy::FreeEnergy(SwellingStrainModel m, double kappa_theta) : kappa_theta_(kappa_theta) {
  components_ = static_cast<int>(m.E.size());
  dim_ = check_common(m, m.E.size());
  for (const auto& ek : m.E)
    if (ek.size() != m.C.rows()) throw ModelError("swelling matrix has wrong Voigt size");
  model_ = std::move(m);
}

FreeEnergy::FreeEnergy(SwellingStressModel m, double kappa_theta) : kappa_theta_(kappa_theta) {
  components_ = static_cast<int>(m.beta.size());
  dim_ = check_common(m, m.beta.size());
  if (m.biot_M.size() != m.beta.size()) throw ModelError("biot_M needs one entry per component");
  for (std::size_t k = 0; k < m.beta.size(); ++k) {
    if (!(m.beta[k] > 0.0)) throw ModelError("Biot coefficient must be positive");
    if (!(m.biot_M[k] > 0.0)) throw ModelError("Biot modulus must be positive");
  }
  model_ = std::move(m);
}

double FreeEnergy::kappa(int k, double theta) const {
  const double base = std::visit([k](const auto& m) { return m.kappa[k]; }, model_);
  return base * temperature_factor(kappa_theta_, theta);
}

double FreeEnergy::c_eq(int k) const {
  return std::visit([k](const auto& m) { return m.c_eq[k]; }, model_);
}

Voigt FreeEnergy::trace_vector() const {
  Voigt t = Voigt::Zero(voigt());
  t(0) = 1.0;
  if (dim_ == 2) t(1) = 1.0;
  return t;
}

void FreeEnergy::check_args(const Voigt& e, const Conc& c) const {
  if (e.size() != voigt()) throw ModelError("strain has wrong Voigt size");
  if (c.size() != components_) throw ModelError("concentration has wrong number of components");
}

double FreeEnergy::energy(const Voigt& e, const Conc& c, double theta) const {
  check_args(e, c);
  double w = 0.0;
  for (int k = 0; k < components_; ++k) {
    const double kap = kappa(k, theta);
    if (kap > 0.0) {
      if (!(c(k) > 0.0)) return kInf;
      w += kap * c(k) * (std::log(c(k) / c_eq(k)) - 1.0);
    }
  }
  if (const auto* m = swelling_strain()) {
    Voigt eel = e;
    for (int k = 0; k < components_; ++k) eel -= m->E[k] * (c(k) - m->c_eq[k]);
    w += 0.5 * eel.dot(m->C * eel);
  } else {
    const auto* s = swelling_stress();
    w += 0.5 * e.dot(s->C * e);
    const double tr = trace_vector().dot(e);
    for (int k = 0; k < components_; ++k) {
      const double gap = s->beta[k] * tr - c(k) + s->c_eq[k];
      w += 0.5 * s->biot_M[k] * gap * gap;
    }
  }
  return w;
}

Voigt FreeEnergy::stress(const Voigt& e, const Conc& c, double theta) const {
  check_args(e, c);
  if (!std::isfinite(energy(e, c, theta)))
    throw ModelError("stress evaluated outside the energy domain");
  if (const auto* m = swelling_strain()) {
    Voigt eel = e;
    for (int k = 0; k < components_; ++k) eel -= m->E[k] * (c(k) - m->c_eq[k]);
    return m->C * eel;
  }
  const auto* s = swelling_stress();
  Voigt sig = s->C * e;
  const Voigt t = trace_vector();
  const double tr = t.dot(e);
  for (int k = 0; k < components_; ++k)
    sig += s->beta[k] * s->biot_M[k] * (s->beta[k] * tr - c(k) + s->c_eq[k]) * t;
  return sig;
}

Conc FreeEnergy::nonentropic_potential(const Voigt& e, const Conc& c) const {
  check_args(e, c);
  Conc mu(components_);
  if (const auto* m = swelling_strain()) {
    Voigt eel = e;
    for (int k = 0; k < components_; ++k) eel -= m->E[k] * (c(k) - m->c_eq[k]);
    const Voigt sig = m->C * eel;
    for (int k = 0; k < components_; ++k) mu(k) = -m->E[k].dot(sig);
  } else {
    const auto* s = swelling_stress();
    const double tr = trace_vector().dot(e);
    for (int k = 0; k < components_; ++k)
      mu(k) = s->biot_M[k] * (c(k) - s->beta[k] * tr - s->c_eq[k]);
  }
  return mu;
}

std::optional<Conc> FreeEnergy::chemical_potential(const Voigt& e, const Conc& c,
                                                   double theta) const {
  check_args(e, c);
  Conc mu = nonentropic_potential(e, c);
  for (int k = 0; k < components_; ++k) {
    const double kap = kappa(k, theta);
    if (kap > 0.0) {
      if (!(c(k) > 0.0)) return std::nullopt;
      mu(k) += kap * std::log(c(k) / c_eq(k));
    }
  }
  return mu;
}

VoigtMatrix FreeEnergy::d2_ee(const Voigt& e, const Conc& c, double) const {
  check_args(e, c);
  if (const auto* m = swelling_strain()) return m->C;
  const auto* s = swelling_stress();
  const Voigt t = trace_vector();
  VoigtMatrix h = s->C;
  for (int k = 0; k < components_; ++k) h += s->beta[k] * s->beta[k] * s->biot_M[k] * t * t.transpose();
  return h;
}

CouplingMatrix FreeEnergy::d2_ec(const Voigt& e, const Conc& c, double) const {
  check_args(e, c);
  CouplingMatrix h(voigt(), components_);
  if (const auto* m = swelling_strain()) {
    for (int k = 0; k < components_; ++k) h.col(k) = -(m->C * m->E[k]);
  } else {
    const auto* s = swelling_stress();
    const Voigt t = trace_vector();
    for (int k = 0; k < components_; ++k) h.col(k) = -s->beta[k] * s->biot_M[k] * t;
  }
  return h;
}

ConcMatrix FreeEnergy::d2_cc(const Voigt& e, const Conc& c, double theta) const {
  check_args(e, c);
  ConcMatrix h = ConcMatrix::Zero(components_, components_);
  if (const auto* m = swelling_strain()) {
    for (int k = 0; k < components_; ++k)
      for (int l = 0; l < components_; ++l) h(k, l) = m->E[k].dot(m->C * m->E[l]);
  } else {
    const auto* s = swelling_stress();
    for (int k = 0; k < components_; ++k) h(k, k) = s->biot_M[k];
  }
  for (int k = 0; k < components_; ++k) {
    const double kap = kappa(k, theta);
    if (kap > 0.0) h(k, k) += kap / c(k);
  }
  return h;
}

namespace {

// Monotone scalar root of g(c) = mu(c) - target with d mu/dc > 0.
double solve_scalar_potential(const std::function<double(double)>& g,
                              const std::function<double(double)>& dg, bool barrier, double start,
                              double tol) {
  double lo, hi;
  double glo, ghi;
  double c = barrier ? std::max(start, 1e-300) : start;
  double gc = g(c);
  if (gc == 0.0) return c;
  if (gc < 0.0) {
    lo = c;
    glo = gc;
    double step = std::max(1.0, std::abs(c));
    hi = barrier ? 2.0 * c : c + step;
    ghi = g(hi);
    for (int it = 0; ghi < 0.0; ++it) {
      if (it > 2000) throw ModelError("conjugate concentration: no upper bracket");
      lo = hi;
      glo = ghi;
      step *= 2.0;
      hi = barrier ? 2.0 * hi : hi + step;
      ghi = g(hi);
    }
  } else {
    hi = c;
    ghi = gc;
    double step = std::max(1.0, std::abs(c));
    lo = barrier ? 0.5 * c : c - step;
    glo = g(lo);
    for (int it = 0; glo > 0.0; ++it) {
      if (it > 2000 || (barrier && lo < 1e-300))
        throw ModelError("conjugate concentration: no lower bracket");
      hi = lo;
      ghi = glo;
      step *= 2.0;
      lo = barrier ? 0.5 * lo : lo - step;
      glo = g(lo);
    }
  }
  c = (glo == 0.0) ? lo : (ghi == 0.0 ? hi : 0.5 * (lo + hi));
  for (int it = 0; it < 300; ++it) {
    gc = g(c);
    if (std::abs(gc) <= tol) return c;
    if (gc < 0.0)
      lo = c;
    else
      hi = c;
    double next = c - gc / dg(c);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == c) return c;
    c = next;
  }
  if (std::abs(g(c)) <= 1e3 * tol) return c;
  throw ModelError("conjugate concentration: Newton/bisection did not converge");
}

}  // namespace

Conc conjugate_concentration(const FreeEnergy& model, const Voigt& e, const Conc& mu_bar,
                             double theta) {
  const int n = model.components();
  if (mu_bar.size() != n) throw ModelError("mu_bar has wrong number of components");
  Conc c(n);
  for (int k = 0; k < n; ++k) c(k) = model.c_eq(k);

  const bool coupled = model.is_swelling_strain() && n > 1;
  if (!coupled) {
    for (int k = 0; k < n; ++k) {
      const double tol = 1e-13 * (1.0 + std::abs(mu_bar(k)));
      Conc probe = c;
      auto g = [&](double ck) {
        probe(k) = ck;
        Conc mu = model.nonentropic_potential(e, probe);
        double v = mu(k) - mu_bar(k);
        const double kap = model.kappa(k, theta);
        if (kap > 0.0) v += kap * std::log(ck / model.c_eq(k));
        return v;
      };
      auto dg = [&](double ck) {
        probe(k) = ck;
        return model.d2_cc(e, probe, theta)(k, k);
      };
      if (!(dg(model.c_eq(k)) > 0.0))
        throw ModelError("conjugate concentration: d_cc phi vanishes (ill-posed model)");
      c(k) = solve_scalar_potential(g, dg, model.has_barrier(k), model.c_eq(k), tol);
    }
    return c;
  }

  // Coupled components: damped Newton on phi(e,c) - mu_bar.c.
  auto objective = [&](const Conc& x) { return model.energy(e, x, theta) - mu_bar.dot(x); };
  for (int it = 0; it < 200; ++it) {
    auto mu = model.chemical_potential(e, c, theta);
    const Conc grad = *mu - mu_bar;
    if (grad.cwiseAbs().maxCoeff() <= 1e-13 * (1.0 + mu_bar.cwiseAbs().maxCoeff())) return c;
    const ConcMatrix h = model.d2_cc(e, c, theta);
    Eigen::LLT<ConcMatrix> llt(h);
    if (llt.info() != Eigen::Success)
      throw ModelError("conjugate concentration: d_cc phi not positive definite");
    const Conc dir = -llt.solve(grad);
    double t = 1.0;
    for (int k = 0; k < n; ++k)
      if (model.has_barrier(k) && dir(k) < 0.0) t = std::min(t, -0.95 * c(k) / dir(k));
    const double f0 = objective(c);
    const double slope = grad.dot(dir);
    while (objective(c + t * dir) > f0 + 1e-4 * t * slope + 1e-15 * std::abs(f0)) {
      t *= 0.5;
      if (t < 1e-16) throw ModelError("conjugate concentration: line search failed");
    }
    c += t * dir;
  }
  throw ModelError("conjugate concentration: Newton did not converge");
}

double conjugate_energy(const FreeEnergy& model, const Voigt& e, const Conc& mu_bar,
                        double theta) {
  const Conc c = conjugate_concentration(model, e, mu_bar, theta);
  return mu_bar.dot(c) - model.energy(e, c, theta);
}

void TransportModel::validate(int dim) const {
  if (M0.empty()) throw ModelError("transport needs a mobility per component");
  for (const auto& m : M0) {
    if (m.rows() != dim || m.cols() != dim) throw ModelError("mobility has wrong shape");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * m.cwiseAbs().maxCoeff())
      throw ModelError("mobility is not symmetric");
    Eigen::SelfAdjointEigenSolver<DMatrix> eig(m);
    if (eig.eigenvalues().minCoeff() <= 0.0) throw ModelError("mobility is not positive definite");
  }
  if (!(mobility_floor > 0.0)) throw ModelError("mobility floor must be positive");
  if (K0.size() != 0) {
    if (K0.rows() != dim || K0.cols() != dim) throw ModelError("conductivity has wrong shape");
    Eigen::SelfAdjointEigenSolver<DMatrix> eig(K0);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw ModelError("conductivity is not positive definite");
  }
  if (has_reaction() && reaction_ref.size() != M0.size())
    throw ModelError("reaction reference needs one entry per component");
  if (!(reaction_max > 0.0)) throw ModelError("reaction bound must be positive");
}

DMatrix TransportModel::mobility(int k, double c_k, double theta) const {
  const double f = temperature_factor(mobility_theta, theta);
  if (mobility_kind == MobilityKind::Constant) return f * M0[static_cast<size_t>(k)];
  return f * std::max(c_k, mobility_floor) * M0[static_cast<size_t>(k)];
}

DMatrix TransportModel::conductivity(const Conc& c, double theta) const {
  double f = temperature_factor(conductivity_theta, theta);
  if (conductivity_c != 0.0 && c.size() > 0) f *= std::clamp(1.0 + conductivity_c * c(0), 0.1, 10.0);
  return f * K0;
}

Conc TransportModel::reaction(const Conc& c, double theta) const {
  Conc r = Conc::Zero(c.size());
  if (!has_reaction()) return r;
  const double f = temperature_factor(reaction_theta, theta);
  for (int k = 0; k < c.size(); ++k)
    r(k) = std::clamp(reaction_rate * (reaction_ref[static_cast<size_t>(k)] - c(k)) * f,
                      -reaction_max, reaction_max);
  return r;
}

double TransportModel::heat(const Conc&, double) const { return heat_source; }

double ChargeModel::dopand_at(const Point& x) const {
  if (z_dop_box) {
    const auto& b = *z_dop_box;
    const bool in_x = x(0) >= b[0] && x(0) <= b[1];
    const bool in_y = x.size() < 2 || (x(1) >= b[2] && x(1) <= b[3]);
    if (in_x && in_y) return z_dop_box_value;
  }
  return z_dop;
}

bool ChargeModel::neutral() const {
  for (double zk : z)
    if (zk != 0.0) return false;
  return z_dop == 0.0 && (!z_dop_box || z_dop_box_value == 0.0);
}

FluxDecomposition flux_decomposition(
    const FreeEnergy& model, const TransportModel& transport, int k, const Voigt& e,
    const Conc& c, const Point& grad_mu,
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxDim>& grad_c,
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVoigt, kMaxDim>& grad_strain,
    double theta) {
  if (!(c(k) > 0.0)) throw ModelError("flux decomposition requires c > 0");
  const double kap = model.kappa(k, theta);
  ConcMatrix hcc = model.d2_cc(e, c, theta);
  for (int l = 0; l < model.components(); ++l) {
    const double kl = model.kappa(l, theta);
    if (kl > 0.0) hcc(l, l) -= kl / c(l);
  }
  const CouplingMatrix hec = model.d2_ec(e, c, theta);
  Point grad_p = grad_strain.transpose() * hec.col(k);
  for (int l = 0; l < model.components(); ++l) grad_p += hcc(k, l) * grad_c.row(l).transpose();

  const DMatrix m0 = temperature_factor(transport.mobility_theta, theta) * transport.M0[static_cast<size_t>(k)];
  FluxDecomposition out;
  out.p = model.nonentropic_potential(e, c)(k);
  out.j_total = -(transport.mobility(k, c(k), theta) * grad_mu);
  out.j_darcy = -(c(k) * (m0 * grad_p));
  out.j_fick = -(kap * (m0 * grad_c.row(k).transpose()));
  return out;
}

VoigtMatrix isotropic_stiffness(int dim, double lambda, double mu) {
  if (dim == 1) {
    VoigtMatrix c(1, 1);
    c(0, 0) = lambda + 2.0 * mu;
    return c;
  }
  VoigtMatrix c = VoigtMatrix::Zero(3, 3);
  c(0, 0) = c(1, 1) = lambda + 2.0 * mu;
  c(0, 1) = c(1, 0) = lambda;
  c(2, 2) = mu;
  return c;
}

}  // namespace porofick
