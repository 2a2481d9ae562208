#include "porofick/poro_functional.hpp"

#include <cmath>
#include <limits>

namespace porofick {

DofMap::DofMap(const Mesh& mesh, int components)
    : dim_(mesh.dim()), components_(components), nodes_(mesh.num_nodes()) {
  u_dof_.assign(static_cast<size_t>(dim_ * nodes_), -1);
  for (Index i = 0; i < nodes_; ++i)
    if (!mesh.is_dirichlet_node(i))
      for (int a = 0; a < dim_; ++a) u_dof_[static_cast<size_t>(dim_ * i + a)] = num_u_++;
}

Vec DofMap::pack(const Vec& u, const Vec& c) const {
  Vec x(size());
  for (Index i = 0; i < nodes_; ++i)
    for (int a = 0; a < dim_; ++a)
      if (const Index d = u_dof(i, a); d >= 0) x(d) = u(dim_ * i + a);
  x.tail(components_ * nodes_) = c;
  return x;
}

Vec DofMap::unpack_u(const Vec& x) const {
  Vec u = Vec::Zero(dim_ * nodes_);
  for (Index i = 0; i < nodes_; ++i)
    for (int a = 0; a < dim_; ++a)
      if (const Index d = u_dof(i, a); d >= 0) u(dim_ * i + a) = x(d);
  return u;
}

Voigt element_strain(const Mesh& mesh, Index e, const Vec& u) {
  const int d = mesh.dim();
  auto nodes = mesh.element(e);
  const auto& g = mesh.basis_gradients(e);
  Voigt s = Voigt::Zero(voigt_size(d));
  for (int a = 0; a < d + 1; ++a) {
    const Index n = nodes[a];
    if (d == 1) {
      s(0) += g(a, 0) * u(n);
    } else {
      const double ux = u(2 * n), uy = u(2 * n + 1);
      s(0) += g(a, 0) * ux;
      s(1) += g(a, 1) * uy;
      s(2) += g(a, 1) * ux + g(a, 0) * uy;
    }
  }
  return s;
}

std::vector<Voigt> nodal_strain(const Mesh& mesh, const Vec& u) {
  const int d = mesh.dim();
  std::vector<Voigt> out(static_cast<size_t>(mesh.num_nodes()), Voigt::Zero(voigt_size(d)));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const Voigt s = element_strain(mesh, e, u);
    const double w = mesh.measure(e) / (d + 1);
    for (Index n : mesh.element(e)) out[static_cast<size_t>(n)] += w * s;
  }
  const Vec& m = mesh.lumped_mass();
  for (Index i = 0; i < mesh.num_nodes(); ++i) out[static_cast<size_t>(i)] /= m(i);
  return out;
}

namespace {

// Strain-displacement matrix: voigt rows, local dofs (a, comp) node-major.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 6> strain_matrix(const Mesh& mesh, Index e) {
  const int d = mesh.dim();
  const auto& g = mesh.basis_gradients(e);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 6> b =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 6>::Zero(voigt_size(d), d * (d + 1));
  for (int a = 0; a < d + 1; ++a) {
    if (d == 1) {
      b(0, a) = g(a, 0);
    } else {
      b(0, 2 * a) = g(a, 0);
      b(1, 2 * a + 1) = g(a, 1);
      b(2, 2 * a) = g(a, 1);
      b(2, 2 * a + 1) = g(a, 0);
    }
  }
  return b;
}

}  // namespace

PoroFunctional::PoroFunctional(const Mesh& mesh, const FreeEnergy& model, const Loads& loads,
                               const ChargeModel* charges)
    : mesh_(&mesh), model_(&model), loads_(loads), dofs_(mesh, model.components()) {
  if (model.dim() != mesh.dim()) throw ModelError("material dimension does not match the mesh");
  const Index nn = mesh.num_nodes();
  const int d = mesh.dim();
  mu_tilde_ = Vec::Zero(model.components() * nn);
  theta_ = Vec::Zero(nn);

  load_u_ = Vec::Zero(dofs_.num_u());
  if (loads.f.size() > 0) {
    if (loads.f.size() != d) throw ModelError("body force has wrong dimension");
    const Vec& m = mesh.lumped_mass();
    for (Index i = 0; i < nn; ++i)
      for (int a = 0; a < d; ++a)
        if (const Index k = dofs_.u_dof(i, a); k >= 0) load_u_(k) += m(i) * loads.f(a);
  }
  if (loads.g.size() > 0) {
    if (loads.g.size() != d) throw ModelError("traction has wrong dimension");
    const Vec b = boundary_lumped_weights(mesh, [](const Facet& f) { return f.tag == BoundaryTag::Neumann; });
    for (Index i = 0; i < nn; ++i)
      for (int a = 0; a < d; ++a)
        if (const Index k = dofs_.u_dof(i, a); k >= 0) load_u_(k) += b(i) * loads.g(a);
  }

  if (charges && !charges->neutral()) {
    poisson_ = std::make_shared<const BoxPoisson>(mesh, *charges, model.components());
    const SpMat& p = poisson_->displacement_matrix();
    const SpMat& q = poisson_->charge_matrix();
    std::vector<Triplet> t;
    for (Index k = 0; k < p.outerSize(); ++k)
      for (SpMat::InnerIterator it(p, k); it; ++it) {
        const Index node = it.col() / d;
        const int a = static_cast<int>(it.col() % d);
        if (const Index dof = dofs_.u_dof(node, a); dof >= 0) t.emplace_back(it.row(), dof, it.value());
      }
    for (Index k = 0; k < q.outerSize(); ++k)
      for (SpMat::InnerIterator it(q, k); it; ++it)
        t.emplace_back(it.row(), dofs_.num_u() + it.col(), it.value());
    coupling_.resize(poisson_->num_free(), dofs_.size());
    coupling_.setFromTriplets(t.begin(), t.end());
  }
}

void PoroFunctional::set_mu_tilde(const Vec& mu) {
  if (mu.size() != mu_tilde_.size()) throw ModelError("mu_tilde has wrong size");
  mu_tilde_ = mu;
}

void PoroFunctional::set_theta(const Vec& theta) {
  if (theta.size() != theta_.size()) throw ModelError("theta has wrong size");
  theta_ = theta;
}

Conc PoroFunctional::nodal_c(const Vec& c, Index i) const {
  const int n = dofs_.components();
  Conc out(n);
  for (int k = 0; k < n; ++k) out(k) = c(k * dofs_.nodes() + i);
  return out;
}

Voigt PoroFunctional::strain(Index e, const Vec& u) const { return element_strain(*mesh_, e, u); }

double PoroFunctional::value(const Vec& x) const {
  const Vec u = dofs_.unpack_u(x);
  const Vec c = dofs_.unpack_c(x);
  const int d = mesh_->dim();
  double v = 0.0;
  for (Index e = 0; e < mesh_->num_elements(); ++e) {
    const Voigt s = strain(e, u);
    const double w = mesh_->measure(e) / (d + 1);
    for (Index i : mesh_->element(e)) {
      const double phi = model_->energy(s, nodal_c(c, i), theta_(i));
      if (!std::isfinite(phi)) return std::numeric_limits<double>::infinity();
      v += w * phi;
    }
  }
  const Vec& m = mesh_->lumped_mass();
  const Index nn = dofs_.nodes();
  for (int k = 0; k < dofs_.components(); ++k)
    v -= (m.array() * mu_tilde_.segment(k * nn, nn).array() * c.segment(k * nn, nn).array()).sum();
  v -= load_u_.dot(x.head(dofs_.num_u()));
  if (poisson_) {
    const Vec q = coupling_ * x - poisson_->dopand_vector();
    v += 0.5 * q.dot(poisson_->solve(q));
  }
  return v;
}

Vec PoroFunctional::gradient(const Vec& x) const {
  const Vec u = dofs_.unpack_u(x);
  const Vec c = dofs_.unpack_c(x);
  const int d = mesh_->dim();
  const int n = dofs_.components();
  const Index nn = dofs_.nodes();
  Vec g = Vec::Zero(size());
  for (Index e = 0; e < mesh_->num_elements(); ++e) {
    const Voigt s = strain(e, u);
    const double w = mesh_->measure(e) / (d + 1);
    auto nodes = mesh_->element(e);
    Voigt sig = Voigt::Zero(s.size());
    for (Index i : nodes) {
      const Conc ci = nodal_c(c, i);
      sig += w * model_->stress(s, ci, theta_(i));
      const auto mu = model_->chemical_potential(s, ci, theta_(i));
      if (!mu) throw ModelError("gradient evaluated outside the energy domain");
      for (int k = 0; k < n; ++k) g(dofs_.c_dof(k, i)) += w * (*mu)(k);
    }
    const auto b = strain_matrix(*mesh_, e);
    const auto local = (b.transpose() * sig).eval();
    for (int a = 0; a < d + 1; ++a)
      for (int comp = 0; comp < d; ++comp)
        if (const Index dof = dofs_.u_dof(nodes[a], comp); dof >= 0) g(dof) += local(d * a + comp);
  }
  const Vec& m = mesh_->lumped_mass();
  for (int k = 0; k < n; ++k)
    for (Index i = 0; i < nn; ++i) g(dofs_.c_dof(k, i)) -= m(i) * mu_tilde_(k * nn + i);
  g.head(dofs_.num_u()) -= load_u_;
  if (poisson_) {
    const Vec q = coupling_ * x - poisson_->dopand_vector();
    g += coupling_.transpose() * poisson_->solve(q);
  }
  return g;
}

NewtonModel PoroFunctional::hessian(const Vec& x) const {
  const Vec u = dofs_.unpack_u(x);
  const Vec c = dofs_.unpack_c(x);
  const int d = mesh_->dim();
  const int n = dofs_.components();
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(mesh_->num_elements()) * 64);
  for (Index e = 0; e < mesh_->num_elements(); ++e) {
    const Voigt s = strain(e, u);
    const double w = mesh_->measure(e) / (d + 1);
    auto nodes = mesh_->element(e);
    const auto b = strain_matrix(*mesh_, e);
    const int nl = d * (d + 1);
    std::array<Index, 6> ldof{};
    for (int a = 0; a < d + 1; ++a)
      for (int comp = 0; comp < d; ++comp) ldof[static_cast<size_t>(d * a + comp)] = dofs_.u_dof(nodes[a], comp);

    VoigtMatrix hee = VoigtMatrix::Zero(s.size(), s.size());
    for (Index i : nodes) {
      const Conc ci = nodal_c(c, i);
      hee += w * model_->d2_ee(s, ci, theta_(i));
      const CouplingMatrix hec = model_->d2_ec(s, ci, theta_(i));
      const ConcMatrix hcc = model_->d2_cc(s, ci, theta_(i));
      const auto uc = (b.transpose() * hec).eval();  // local u dofs x components
      for (int k = 0; k < n; ++k) {
        const Index cd = dofs_.c_dof(k, i);
        for (int l = 0; l < nl; ++l)
          if (ldof[static_cast<size_t>(l)] >= 0 && uc(l, k) != 0.0) {
            t.emplace_back(ldof[static_cast<size_t>(l)], cd, w * uc(l, k));
            t.emplace_back(cd, ldof[static_cast<size_t>(l)], w * uc(l, k));
          }
        for (int k2 = 0; k2 < n; ++k2)
          if (hcc(k, k2) != 0.0) t.emplace_back(cd, dofs_.c_dof(k2, i), w * hcc(k, k2));
      }
    }
    const auto kuu = (b.transpose() * hee * b).eval();
    for (int l = 0; l < nl; ++l) {
      if (ldof[static_cast<size_t>(l)] < 0) continue;
      for (int r = 0; r < nl; ++r)
        if (ldof[static_cast<size_t>(r)] >= 0)
          t.emplace_back(ldof[static_cast<size_t>(l)], ldof[static_cast<size_t>(r)], kuu(l, r));
    }
  }
  NewtonModel model;
  model.hessian.resize(size(), size());
  model.hessian.setFromTriplets(t.begin(), t.end());
  if (poisson_) {
    model.coupling = coupling_;
    model.aux = poisson_->stiffness();
  }
  return model;
}

double PoroFunctional::max_step(const Vec& x, const Vec& dx) const {
  double t = std::numeric_limits<double>::infinity();
  const Index nn = dofs_.nodes();
  for (int k = 0; k < dofs_.components(); ++k) {
    if (!model_->has_barrier(k)) continue;
    for (Index i = 0; i < nn; ++i) {
      const Index j = dofs_.c_dof(k, i);
      if (dx(j) < 0.0) t = std::min(t, -x(j) / dx(j));
    }
  }
  return t;
}

Mat PoroFunctional::content_matrix() const {
  const Index nn = dofs_.nodes();
  Mat b = Mat::Zero(dofs_.components(), size());
  for (int k = 0; k < dofs_.components(); ++k)
    for (Index i = 0; i < nn; ++i) b(k, dofs_.c_dof(k, i)) = mesh_->lumped_mass()(i);
  return b;
}

Vec PoroFunctional::uniform_point(const Conc& c) const {
  Vec x = Vec::Zero(size());
  const Index nn = dofs_.nodes();
  for (int k = 0; k < dofs_.components(); ++k) x.segment(dofs_.c_dof(k, 0), nn).setConstant(c(k));
  return x;
}

Vec PoroFunctional::potential(const Vec& x) const {
  if (!poisson_) return {};
  return poisson_->solve(coupling_ * x - poisson_->dopand_vector());
}

Vec PoroFunctional::nodal_chemical_potential(const Vec& x) const {
  const Vec u = dofs_.unpack_u(x);
  const Vec c = dofs_.unpack_c(x);
  const auto eb = nodal_strain(*mesh_, u);
  const Index nn = dofs_.nodes();
  Vec out(dofs_.components() * nn);
  for (Index i = 0; i < nn; ++i) {
    const auto mu = model_->chemical_potential(eb[static_cast<size_t>(i)], nodal_c(c, i), theta_(i));
    if (!mu) throw ModelError("chemical potential undefined at a node");
    for (int k = 0; k < dofs_.components(); ++k) out(k * nn + i) = (*mu)(k);
  }
  return out;
}

namespace {

Vec side_weights(const Mesh& mesh, const std::vector<Side>& sides) {
  return boundary_lumped_weights(mesh, [&](const Facet& f) {
    if (sides.empty()) return true;
    for (Side s : sides)
      if (s == f.side) return true;
    return false;
  });
}

}  // namespace

Vec BoundaryData::alpha_weights(const Mesh& mesh) const { return alpha * side_weights(mesh, alpha_sides); }

Vec BoundaryData::gamma_weights(const Mesh& mesh) const { return gamma * side_weights(mesh, {}); }

Vec BoundaryData::mu_ext_nodal(const Mesh& mesh, int k) const {
  if (k >= static_cast<int>(mu_ext.size())) throw ModelError("missing mu_ext for a component");
  Vec v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v(i) = mu_ext[static_cast<size_t>(k)].at(mesh.node(i));
  return v;
}

Vec BoundaryData::theta_ext_nodal(const Mesh& mesh) const {
  Vec v(mesh.num_nodes());
  for (Index i = 0; i < mesh.num_nodes(); ++i) v(i) = theta_ext.at(mesh.node(i));
  return v;
}

}  // namespace porofick
