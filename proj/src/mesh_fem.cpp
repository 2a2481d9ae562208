#include "porofick/mesh_fem.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace porofick {

std::string to_string(Side side) {
  switch (side) {
    case Side::Left: return "left";
    case Side::Right: return "right";
    case Side::Bottom: return "bottom";
    case Side::Top: return "top";
  }
  return "?";
}

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Dirichlet: return "DIRICHLET";
    case BoundaryTag::Neumann: return "NEUMANN";
    case BoundaryTag::Whole: return "WHOLE";
  }
  return "?";
}

std::optional<Side> side_from_string(const std::string& name) {
  if (name == "left") return Side::Left;
  if (name == "right") return Side::Right;
  if (name == "bottom") return Side::Bottom;
  if (name == "top") return Side::Top;
  return std::nullopt;
}

namespace {

Point make_point(double x) {
  Point p(1);
  p << x;
  return p;
}

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

bool side_is_dirichlet(const StructuredDomain& d, Side s) {
  for (Side t : d.dirichlet_sides)
    if (t == s) return true;
  return false;
}

}  // namespace

Point Mesh::centroid(Index e) const {
  Point c = Point::Zero(dim_);
  for (Index n : element(e)) c += node(n);
  return c / static_cast<double>(dim_ + 1);
}

bool Mesh::has_tag(BoundaryTag tag) const {
  if (tag == BoundaryTag::Whole) return !facets_.empty();
  for (const auto& f : facets_)
    if (f.tag == tag) return true;
  return false;
}

Point Mesh::gradient(Index e, std::span<const double> field) const {
  const auto& g = basis_gradients(e);
  Point out = Point::Zero(dim_);
  auto nodes = element(e);
  for (int a = 0; a <= dim_; ++a)
    for (int k = 0; k < dim_; ++k) out(k) += field[static_cast<size_t>(nodes[a])] * g(a, k);
  return out;
}

void Mesh::finalize() {
  const size_t ne = elements_.size();
  measures_.resize(ne);
  gradients_.resize(ne);
  lumped_mass_ = Vec::Zero(num_nodes());
  for (size_t e = 0; e < ne; ++e) {
    const auto& el = elements_[e];
    Eigen::Matrix<double, 3, 2> g = Eigen::Matrix<double, 3, 2>::Zero();
    double meas = 0.0;
    if (dim_ == 1) {
      const double h = nodes_[el[1]](0) - nodes_[el[0]](0);
      meas = std::abs(h);
      g(0, 0) = -1.0 / h;
      g(1, 0) = 1.0 / h;
    } else {
      const Point& p0 = nodes_[el[0]];
      const Point& p1 = nodes_[el[1]];
      const Point& p2 = nodes_[el[2]];
      Eigen::Matrix2d jac;
      jac.col(0) = p1 - p0;
      jac.col(1) = p2 - p0;
      const double det = jac.determinant();
      meas = 0.5 * std::abs(det);
      const Eigen::Matrix2d inv_t = jac.inverse().transpose();
      const Eigen::Vector2d g1 = inv_t.col(0);
      const Eigen::Vector2d g2 = inv_t.col(1);
      g.row(1) = g1.transpose();
      g.row(2) = g2.transpose();
      g.row(0) = -(g1 + g2).transpose();
    }
    if (!(meas > 0.0)) throw MeshError("element with non-positive measure");
    measures_[e] = meas;
    gradients_[e] = g;
    for (int a = 0; a <= dim_; ++a) lumped_mass_(el[a]) += meas / (dim_ + 1);
  }
  dirichlet_node_.assign(nodes_.size(), false);
  boundary_node_.assign(nodes_.size(), false);
  for (const auto& f : facets_) {
    const int count = dim_ == 1 ? 1 : 2;
    for (int a = 0; a < count; ++a) {
      boundary_node_[f.nodes[a]] = true;
      if (f.tag == BoundaryTag::Dirichlet) dirichlet_node_[f.nodes[a]] = true;
    }
  }
}

Mesh build_structured_mesh(const StructuredDomain& d) {
  if (d.dim != 1 && d.dim != 2) throw MeshError("dimension must be 1 or 2");
  if (d.nx < 1 || (d.dim == 2 && d.ny < 1)) throw MeshError("zero subdivisions");
  if (!(d.x1 > d.x0) || (d.dim == 2 && !(d.y1 > d.y0)))
    throw MeshError("degenerate domain (zero length or area)");

  Mesh m;
  m.dim_ = d.dim;
  m.domain_ = d;
  if (d.dim == 1) {
    const double h = (d.x1 - d.x0) / d.nx;
    for (int i = 0; i <= d.nx; ++i) m.nodes_.push_back(make_point(i == d.nx ? d.x1 : d.x0 + i * h));
    for (int i = 0; i < d.nx; ++i) m.elements_.push_back({i, i + 1, 0});
    auto tag = [&](Side s) {
      return side_is_dirichlet(d, s) ? BoundaryTag::Dirichlet : BoundaryTag::Neumann;
    };
    m.facets_.push_back({{0, 0}, Side::Left, tag(Side::Left), 1.0});
    m.facets_.push_back({{d.nx, d.nx}, Side::Right, tag(Side::Right), 1.0});
  } else {
    const double hx = (d.x1 - d.x0) / d.nx;
    const double hy = (d.y1 - d.y0) / d.ny;
    const Index stride = d.nx + 1;
    auto id = [&](int i, int j) { return static_cast<Index>(j) * stride + i; };
    for (int j = 0; j <= d.ny; ++j)
      for (int i = 0; i <= d.nx; ++i)
        m.nodes_.push_back(make_point(i == d.nx ? d.x1 : d.x0 + i * hx,
                                      j == d.ny ? d.y1 : d.y0 + j * hy));
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        m.elements_.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
        m.elements_.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
      }
    auto add = [&](Index a, Index b, Side s, double len) {
      m.facets_.push_back({{a, b},
                           s,
                           side_is_dirichlet(d, s) ? BoundaryTag::Dirichlet : BoundaryTag::Neumann,
                           len});
    };
    for (int i = 0; i < d.nx; ++i) add(id(i, 0), id(i + 1, 0), Side::Bottom, hx);
    for (int j = 0; j < d.ny; ++j) add(id(d.nx, j), id(d.nx, j + 1), Side::Right, hy);
    for (int i = 0; i < d.nx; ++i) add(id(i, d.ny), id(i + 1, d.ny), Side::Top, hx);
    for (int j = 0; j < d.ny; ++j) add(id(0, j), id(0, j + 1), Side::Left, hy);
  }
  m.finalize();
  return m;
}

Mesh with_padding(const Mesh& mesh, double factor) {
  if (!(factor > 1.0)) throw MeshError("padding factor must exceed 1");
  const StructuredDomain& d = mesh.domain();
  StructuredDomain box;
  box.dim = d.dim;
  box.dirichlet_sides = {Side::Left, Side::Right, Side::Bottom, Side::Top};
  const int px = std::max(1, static_cast<int>(std::lround(0.5 * (factor - 1.0) * d.nx)));
  const double hx = (d.x1 - d.x0) / d.nx;
  box.nx = d.nx + 2 * px;
  box.x0 = d.x0 - px * hx;
  box.x1 = d.x1 + px * hx;
  int py = 0;
  if (d.dim == 2) {
    py = std::max(1, static_cast<int>(std::lround(0.5 * (factor - 1.0) * d.ny)));
    const double hy = (d.y1 - d.y0) / d.ny;
    box.ny = d.ny + 2 * py;
    box.y0 = d.y0 - py * hy;
    box.y1 = d.y1 + py * hy;
  }
  auto pad = std::make_shared<PaddingBox>();
  pad->mesh = std::make_shared<const Mesh>(build_structured_mesh(box));
  pad->factor = static_cast<double>(box.nx) / d.nx;
  const Index box_stride = box.nx + 1;
  pad->node_map.resize(static_cast<size_t>(mesh.num_nodes()));
  pad->element_map.assign(static_cast<size_t>(pad->mesh->num_elements()), -1);
  if (d.dim == 1) {
    for (Index i = 0; i < mesh.num_nodes(); ++i) pad->node_map[i] = i + px;
    for (Index e = 0; e < mesh.num_elements(); ++e) pad->element_map[e + px] = e;
  } else {
    const Index stride = d.nx + 1;
    for (Index n = 0; n < mesh.num_nodes(); ++n) {
      const Index i = n % stride, j = n / stride;
      pad->node_map[n] = (j + py) * box_stride + (i + px);
    }
    for (int j = 0; j < d.ny; ++j)
      for (int i = 0; i < d.nx; ++i) {
        const Index inner = 2 * (static_cast<Index>(j) * d.nx + i);
        const Index outer = 2 * (static_cast<Index>(j + py) * box.nx + (i + px));
        pad->element_map[outer] = inner;
        pad->element_map[outer + 1] = inner + 1;
      }
  }
  Mesh out = mesh;
  out.padding_ = std::move(pad);
  return out;
}

std::vector<QuadraturePoint> quadrature_points(const Mesh& mesh, Index e) {
  std::vector<QuadraturePoint> qps;
  auto nodes = mesh.element(e);
  const double meas = mesh.measure(e);
  if (mesh.dim() == 1) {
    const double s = 0.5 / std::sqrt(3.0);
    for (double t : {0.5 - s, 0.5 + s}) {
      QuadraturePoint q{e, Point(), {1.0 - t, t, 0.0}, 0.5 * meas};
      q.x = (1.0 - t) * mesh.node(nodes[0]) + t * mesh.node(nodes[1]);
      qps.push_back(std::move(q));
    }
  } else {
    const std::array<std::array<double, 3>, 3> bary = {
        {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
    for (const auto& b : bary) {
      QuadraturePoint q{e, Point(), b, meas / 3.0};
      q.x = b[0] * mesh.node(nodes[0]) + b[1] * mesh.node(nodes[1]) + b[2] * mesh.node(nodes[2]);
      qps.push_back(std::move(q));
    }
  }
  return qps;
}

double integrate_domain(const Mesh& mesh,
                        const std::function<double(const QuadraturePoint&)>& integrand) {
  double sum = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e)
    for (const auto& q : quadrature_points(mesh, e)) sum += q.weight * integrand(q);
  return sum;
}

namespace {

double facet_integrate(const Mesh& mesh, const std::function<bool(const Facet&)>& select,
                       const std::function<double(const FacetPoint&)>& integrand) {
  double sum = 0.0;
  for (const auto& f : mesh.facets()) {
    if (!select(f)) continue;
    if (mesh.dim() == 1) {
      sum += integrand(FacetPoint{&f, mesh.node(f.nodes[0]), {1.0, 0.0}, 1.0});
    } else {
      const double s = 0.5 / std::sqrt(3.0);
      for (double t : {0.5 - s, 0.5 + s}) {
        Point x = (1.0 - t) * mesh.node(f.nodes[0]) + t * mesh.node(f.nodes[1]);
        sum += 0.5 * f.measure * integrand(FacetPoint{&f, x, {1.0 - t, t}, 0.5 * f.measure});
      }
    }
  }
  return sum;
}

}  // namespace

double boundary_integrate(const Mesh& mesh, BoundaryTag tag,
                          const std::function<double(const FacetPoint&)>& integrand) {
  if (!mesh.has_tag(tag)) throw MeshError("boundary tag " + to_string(tag) + " not present");
  return facet_integrate(
      mesh, [tag](const Facet& f) { return tag == BoundaryTag::Whole || f.tag == tag; },
      integrand);
}

double boundary_integrate(const Mesh& mesh, const std::string& side,
                          const std::function<double(const FacetPoint&)>& integrand) {
  auto s = side_from_string(side);
  if (!s) throw MeshError("unknown boundary tag '" + side + "'");
  if (mesh.dim() == 1 && (*s == Side::Bottom || *s == Side::Top))
    throw MeshError("side '" + side + "' does not exist on an interval");
  return facet_integrate(
      mesh, [s](const Facet& f) { return f.side == *s; }, integrand);
}

Vec boundary_lumped_weights(const Mesh& mesh, const std::function<bool(const Facet&)>& select) {
  Vec w = Vec::Zero(mesh.num_nodes());
  for (const auto& f : mesh.facets()) {
    if (!select(f)) continue;
    if (mesh.dim() == 1) {
      w(f.nodes[0]) += 1.0;
    } else {
      w(f.nodes[0]) += 0.5 * f.measure;
      w(f.nodes[1]) += 0.5 * f.measure;
    }
  }
  return w;
}

SpMat assemble_stiffness(const Mesh& mesh, const std::function<DMatrix(Index)>& coeff) {
  const int d = mesh.dim();
  const int nloc = d + 1;
  std::vector<Triplet> trips;
  trips.reserve(static_cast<size_t>(mesh.num_elements() * nloc * nloc));
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const DMatrix a = coeff(e);
    if (a.rows() != d || a.cols() != d) throw MeshError("coefficient has wrong shape");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + a.cwiseAbs().maxCoeff()))
      throw MeshError("non-symmetric stiffness coefficient");
    const auto& g = mesh.basis_gradients(e);
    const double meas = mesh.measure(e);
    auto nodes = mesh.element(e);
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) {
        const double v = meas * (g.row(i).head(d) * a * g.row(j).head(d).transpose())(0, 0);
        trips.emplace_back(nodes[i], nodes[j], v);
      }
  }
  SpMat k(mesh.num_nodes(), mesh.num_nodes());
  k.setFromTriplets(trips.begin(), trips.end());
  return k;
}

SpMat assemble_stiffness(const Mesh& mesh, double coeff) {
  const DMatrix a = coeff * DMatrix::Identity(mesh.dim(), mesh.dim());
  return assemble_stiffness(mesh, [&](Index) { return a; });
}

SpMat assemble_mass(const Mesh& mesh) {
  const int nloc = mesh.dim() + 1;
  std::vector<Triplet> trips;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    const double meas = mesh.measure(e);
    auto nodes = mesh.element(e);
    // P1 mass: |K|/((d+1)(d+2)) * (1 + delta_ij)
    const double base = meas / ((mesh.dim() + 1) * (mesh.dim() + 2));
    for (int i = 0; i < nloc; ++i)
      for (int j = 0; j < nloc; ++j) trips.emplace_back(nodes[i], nodes[j], base * (i == j ? 2 : 1));
  }
  SpMat m(mesh.num_nodes(), mesh.num_nodes());
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const bool two = mesh.dim() == 2;
  {
    std::ofstream out(dir / "nodes.csv");
    out << (two ? "id,x,y\n" : "id,x\n");
    out.precision(17);
    out << std::scientific;
    for (Index i = 0; i < mesh.num_nodes(); ++i) {
      out << i << ',' << mesh.node(i)(0);
      if (two) out << ',' << mesh.node(i)(1);
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "elements.csv");
    out << (two ? "id,n0,n1,n2\n" : "id,n0,n1\n");
    for (Index e = 0; e < mesh.num_elements(); ++e) {
      out << e;
      for (Index n : mesh.element(e)) out << ',' << n;
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "facets.csv");
    out << (two ? "id,n0,n1,tag\n" : "id,n0,tag\n");
    Index id = 0;
    for (const auto& f : mesh.facets()) {
      out << id++ << ',' << f.nodes[0];
      if (two) out << ',' << f.nodes[1];
      out << ',' << to_string(f.tag) << '\n';
    }
  }
  if (!std::filesystem::exists(dir / "facets.csv")) throw MeshError("failed to write mesh CSV");
}

}  // namespace porofick
