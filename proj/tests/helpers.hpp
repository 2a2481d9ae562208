#pragma once

// Shared fixtures for the test binaries.
#include "porofick/materials.hpp"
#include "porofick/mesh_fem.hpp"
#include "porofick/problem.hpp"

#include <cmath>
#include <random>

namespace fixtures {

using namespace porofick;

inline Mesh interval(int n, std::vector<Side> dirichlet = {Side::Left}, double x0 = 0.0, double x1 = 1.0) {
  StructuredDomain d;
  d.dim = 1;
  d.x0 = x0;
  d.x1 = x1;
  d.nx = n;
  d.dirichlet_sides = std::move(dirichlet);
  return build_structured_mesh(d);
}

inline Mesh square(int n, std::vector<Side> dirichlet = {Side::Left}) {
  StructuredDomain d;
  d.dim = 2;
  d.nx = n;
  d.ny = n;
  d.dirichlet_sides = std::move(dirichlet);
  return build_structured_mesh(d);
}

inline FreeEnergy stress_model(int dim, int n = 1, double kappa = 1.0, double c_eq = 1.0, double beta = 0.5,
                               double M = 2.0, double kappa_theta = 0.0) {
  SwellingStressModel m;
  m.C = isotropic_stiffness(dim, 1.0, 1.0);
  m.beta.assign(static_cast<size_t>(n), beta);
  m.biot_M.assign(static_cast<size_t>(n), M);
  m.kappa.assign(static_cast<size_t>(n), kappa);
  m.c_eq.assign(static_cast<size_t>(n), c_eq);
  return FreeEnergy(m, kappa_theta);
}

inline FreeEnergy strain_model(int dim, int n = 1, double kappa = 1.0, double c_eq = 1.0, double swell = 0.1) {
  SwellingStrainModel m;
  m.C = isotropic_stiffness(dim, 1.0, 1.0);
  for (int k = 0; k < n; ++k) {
    Voigt E = Voigt::Zero(voigt_size(dim));
    E(0) = swell * (k + 1);
    if (dim == 2) E(1) = 0.5 * swell;
    m.E.push_back(E);
  }
  m.kappa.assign(static_cast<size_t>(n), kappa);
  m.c_eq.assign(static_cast<size_t>(n), c_eq);
  return FreeEnergy(m);
}

inline TransportModel transport(int dim, int n = 1, MobilityKind kind = MobilityKind::Constant, double m0 = 1.0) {
  TransportModel t;
  t.mobility_kind = kind;
  for (int k = 0; k < n; ++k) t.M0.push_back(DMatrix(m0 * DMatrix::Identity(dim, dim)));
  t.K0 = DMatrix::Identity(dim, dim);
  return t;
}

inline BoundaryData robin(double alpha, std::vector<AffineField> mu_ext, double gamma = 0.0,
                          AffineField theta_ext = {}) {
  BoundaryData b;
  b.alpha = alpha;
  b.mu_ext = std::move(mu_ext);
  b.gamma = gamma;
  b.theta_ext = theta_ext;
  return b;
}

inline double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace fixtures
