#pragma once

#include "porofick/mesh_fem.hpp"

#include <array>
#include <vector>

namespace porofick {

/// Constant body force f and traction g on the Neumann facets.
struct Loads {
  Point f;  // empty means zero
  Point g;
};

/// Affine boundary datum a + bx x + by y.
struct AffineField {
  double a = 0.0, bx = 0.0, by = 0.0;
  double at(const Point& x) const { return a + bx * x(0) + (x.size() > 1 ? by * x(1) : 0.0); }
  bool constant() const { return bx == 0.0 && by == 0.0; }
};

/// Robin data for the chemical potential and the temperature.
struct BoundaryData {
  double alpha = 0.0;
  std::vector<Side> alpha_sides;  // empty: whole boundary
  std::vector<AffineField> mu_ext;  // one per component
  double gamma = 0.0;
  AffineField theta_ext;

  /// Nodal lumped Robin weights int_Gamma alpha psi_i dS.
  Vec alpha_weights(const Mesh& mesh) const;
  Vec gamma_weights(const Mesh& mesh) const;
  /// Nodal mu_ext of component k.
  Vec mu_ext_nodal(const Mesh& mesh, int k) const;
  Vec theta_ext_nodal(const Mesh& mesh) const;
};

/// Nodal fields. u is node-major (d entries per node); c and mu are
/// component-major (component k occupies [k n, (k+1) n)).
struct FieldState {
  Vec u, c, mu, theta, phi;
  Vec phi_box;  // potential on the padding box, when charged

  static Vec component(const Vec& v, int k, Index nodes) { return v.segment(k * nodes, nodes); }
};

}  // namespace porofick
