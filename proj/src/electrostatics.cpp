#include "porofick/electrostatics.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace porofick {

namespace {

SolverError precondition(const std::string& what) {
  return SolverError(SolverError::Kind::Precondition, "electrostatics", what);
}

}  // namespace

BoxPoisson::BoxPoisson(const Mesh& mesh, const ChargeModel& charges, int components)
    : inner_(&mesh), pad_(mesh.padding()) {
  if (!pad_) throw MeshError("electrostatics needs a mesh with a padding box");
  if (static_cast<int>(charges.z.size()) != components)
    throw precondition("charge model needs one z per component");
  if (!(charges.epsilon > 0.0 && charges.epsilon_outside > 0.0 && charges.epsilon_scale > 0.0))
    throw precondition("permittivity must be positive");
  box_ = pad_->mesh;
  const Mesh& box = *box_;
  const int dim = mesh.dim();
  const Index nn = mesh.num_nodes();

  box_to_free_.assign(static_cast<size_t>(box.num_nodes()), -1);
  for (Index i = 0; i < box.num_nodes(); ++i)
    if (!box.is_boundary_node(i)) {
      box_to_free_[static_cast<size_t>(i)] = static_cast<Index>(free_nodes_.size());
      free_nodes_.push_back(i);
    }
  const Index nf = num_free();

  eps_.resize(static_cast<size_t>(box.num_elements()));
  for (Index e = 0; e < box.num_elements(); ++e)
    eps_[static_cast<size_t>(e)] =
        charges.epsilon_scale *
        (pad_->element_map[static_cast<size_t>(e)] >= 0 ? charges.epsilon : charges.epsilon_outside);

  const SpMat full = assemble_stiffness(box, [&](Index e) {
    return DMatrix(eps_[static_cast<size_t>(e)] * DMatrix::Identity(dim, dim));
  });
  std::vector<Triplet> t;
  for (Index k = 0; k < full.outerSize(); ++k)
    for (SpMat::InnerIterator it(full, k); it; ++it) {
      const Index r = box_to_free_[static_cast<size_t>(it.row())];
      const Index c = box_to_free_[static_cast<size_t>(it.col())];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  A_.resize(nf, nf);
  A_.setFromTriplets(t.begin(), t.end());

  auto hat = [&](Index i) {
    const Index f = box_to_free_[static_cast<size_t>(pad_->node_map[static_cast<size_t>(i)])];
    if (f < 0) throw MeshError("padding box does not strictly contain the domain");
    return f;
  };

  t.clear();
  const Vec& m = mesh.lumped_mass();
  for (int k = 0; k < components; ++k) {
    const double zk = charges.z[static_cast<size_t>(k)];
    if (zk == 0.0) continue;
    for (Index i = 0; i < nn; ++i) t.emplace_back(hat(i), k * nn + i, zk * m(i));
  }
  Q_.resize(nf, components * nn);
  Q_.setFromTriplets(t.begin(), t.end());

  t.clear();
  d_ = Vec::Zero(nf);
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double z = charges.dopand_at(mesh.centroid(e));
    if (z == 0.0) continue;
    const double w = z * mesh.measure(e) / (dim + 1);
    auto nodes = mesh.element(e);
    const auto& grads = mesh.basis_gradients(e);
    for (int j = 0; j < dim + 1; ++j) {
      const Index fj = hat(nodes[j]);
      d_(fj) += w;
      for (int a = 0; a < dim + 1; ++a)
        for (int comp = 0; comp < dim; ++comp)
          t.emplace_back(fj, dim * nodes[a] + comp, w * grads(j, comp));
    }
  }
  P_.resize(nf, dim * nn);
  P_.setFromTriplets(t.begin(), t.end());

  factor_ = std::make_shared<const NewtonSystem>(A_);
}

Vec BoxPoisson::charge(const Vec& c, const Vec& u) const {
  Vec q = Q_ * c - d_;
  if (u.size() == P_.cols()) q += P_ * u;
  return q;
}

Vec BoxPoisson::solve(const Vec& q) const { return factor_->solve(q); }

Vec BoxPoisson::extend(const Vec& free) const {
  Vec out = Vec::Zero(box_->num_nodes());
  for (Index j = 0; j < num_free(); ++j) out(free_node(j)) = free(j);
  return out;
}

Vec BoxPoisson::restrict_inner(const Vec& box_values) const {
  Vec out(inner_->num_nodes());
  for (Index i = 0; i < inner_->num_nodes(); ++i)
    out(i) = box_values(pad_->node_map[static_cast<size_t>(i)]);
  return out;
}

double charge_residual_norm(const BoxPoisson& poisson, const Vec& c, const Vec& u) {
  const Mesh& box = poisson.box();
  const SpMat gram_full = assemble_stiffness(box, 1.0) + assemble_mass(box);
  std::vector<Index> to_free(static_cast<size_t>(box.num_nodes()), -1);
  for (Index j = 0; j < poisson.num_free(); ++j) to_free[static_cast<size_t>(poisson.free_node(j))] = j;
  std::vector<Triplet> t;
  for (Index k = 0; k < gram_full.outerSize(); ++k)
    for (SpMat::InnerIterator it(gram_full, k); it; ++it) {
      const Index r = to_free[static_cast<size_t>(it.row())], col = to_free[static_cast<size_t>(it.col())];
      if (r >= 0 && col >= 0) t.emplace_back(r, col, it.value());
    }
  SpMat gram(poisson.num_free(), poisson.num_free());
  gram.setFromTriplets(t.begin(), t.end());
  const Vec q = poisson.charge(c, u);
  const Vec y = solve_spd(gram, q);
  return std::sqrt(std::max(0.0, q.dot(y)));
}

double charge_residual_norm(const Mesh& mesh, const ChargeModel& charges, int components,
                            const Vec& c, const Vec& u) {
  return charge_residual_norm(BoxPoisson(mesh, charges, components), c, u);
}

ElectrostaticField solve_truncated_poisson(const Mesh& mesh, const ChargeModel& charges,
                                           int components, const Vec& c, const Vec& u) {
  const BoxPoisson poisson(mesh, charges, components);
  ElectrostaticField out;
  const Vec q = poisson.charge(c, u);
  out.phi_box = poisson.extend(poisson.solve(q));
  out.phi = poisson.restrict_inner(out.phi_box);
  const Mesh& box = poisson.box();
  out.d_vec.resize(static_cast<size_t>(box.num_elements()));
  double sq = 0.0;
  const std::span<const double> phi(out.phi_box.data(), static_cast<size_t>(out.phi_box.size()));
  for (Index e = 0; e < box.num_elements(); ++e) {
    const Point d = poisson.permittivity(e) * box.gradient(e, phi);
    sq += box.measure(e) * d.squaredNorm();
    out.d_vec[static_cast<size_t>(e)] = d;
  }
  out.d_norm = std::sqrt(sq);
  out.charge_residual = charge_residual_norm(poisson, c, u);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw precondition("slope fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::nan("");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw precondition("slope fit needs distinct scales");
  return (n * sxy - sx * sy) / den;
}

ScanReport electroneutrality_scan(const ChargeModel& base, const std::vector<double>& epsilon_hats,
                                  const std::function<ScanMember(const ChargeModel&)>& solve,
                                  int threads) {
  if (epsilon_hats.size() < 3) throw precondition("electroneutrality scan needs at least three scales");
  for (double s : epsilon_hats)
    if (!(s > 0.0)) throw precondition("scales must be positive");
  ScanReport report;
  report.members.resize(epsilon_hats.size());
  report.neutral = base.neutral();

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (size_t i = next++; i < epsilon_hats.size(); i = next++) {
      try {
        ChargeModel scaled = base;
        scaled.epsilon_scale = base.epsilon_scale * epsilon_hats[i];
        ScanMember m = solve(scaled);
        m.epsilon_hat = epsilon_hats[i];
        report.members[i] = m;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int nt = std::max(1, std::min<int>(threads, static_cast<int>(epsilon_hats.size())));
  if (nt == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  if (!report.neutral) {
    std::vector<double> x, yd, yr;
    for (const auto& m : report.members) {
      x.push_back(m.epsilon_hat);
      yd.push_back(m.d_norm);
      yr.push_back(m.charge_residual);
    }
    report.slope_d = loglog_slope(x, yd);
    report.slope_residual = loglog_slope(x, yr);
  }
  return report;
}

}  // namespace porofick
