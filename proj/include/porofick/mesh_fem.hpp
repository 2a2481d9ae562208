#pragma once

#include "porofick/types.hpp"

#include <array>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace porofick {

enum class BoundaryTag { Dirichlet, Neumann, Whole };
enum class Side { Left, Right, Bottom, Top };

std::string to_string(Side side);
std::string to_string(BoundaryTag tag);
std::optional<Side> side_from_string(const std::string& name);

/// Interval (dim 1) or rectangle (dim 2) with a uniform subdivision.
struct StructuredDomain {
  int dim = 1;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 1.0;
  int nx = 1, ny = 1;
  std::vector<Side> dirichlet_sides;
};

struct Facet {
  std::array<Index, 2> nodes{};  // second entry unused in 1D
  Side side = Side::Left;
  BoundaryTag tag = BoundaryTag::Neumann;
  double measure = 1.0;  // length in 2D, 1 for point facets
};

class Mesh;

/// Enclosing box used for the truncated whole-space Poisson problem. The box
/// mesh reuses the cell size of the inner mesh so that the inner node set is
/// a subset of the box node set.
struct PaddingBox {
  std::shared_ptr<const Mesh> mesh;
  std::vector<Index> node_map;     // inner node -> box node
  std::vector<Index> element_map;  // box element -> inner element, or -1 outside
  double factor = 1.0;             // realized box size / inner size
};

/// Simplicial P1 mesh of an interval or rectangle. Immutable after
/// construction.
class Mesh {
 public:
  int dim() const { return dim_; }
  Index num_nodes() const { return static_cast<Index>(nodes_.size()); }
  Index num_elements() const { return static_cast<Index>(elements_.size()); }
  int nodes_per_element() const { return dim_ + 1; }

  const Point& node(Index i) const { return nodes_[static_cast<size_t>(i)]; }
  std::span<const Index> element(Index e) const {
    return {elements_[static_cast<size_t>(e)].data(), static_cast<size_t>(dim_ + 1)};
  }
  double measure(Index e) const { return measures_[static_cast<size_t>(e)]; }
  /// Gradients of the local basis functions: row a is grad(psi_a) on element e.
  const Eigen::Matrix<double, 3, 2>& basis_gradients(Index e) const {
    return gradients_[static_cast<size_t>(e)];
  }
  Point centroid(Index e) const;

  std::span<const Facet> facets() const { return facets_; }
  bool has_tag(BoundaryTag tag) const;
  bool is_dirichlet_node(Index i) const { return dirichlet_node_[static_cast<size_t>(i)]; }
  bool is_boundary_node(Index i) const { return boundary_node_[static_cast<size_t>(i)]; }

  /// Integral of each basis function, i.e. row sums of the mass matrix.
  const Vec& lumped_mass() const { return lumped_mass_; }
  double volume() const { return lumped_mass_.sum(); }

  const StructuredDomain& domain() const { return domain_; }
  const PaddingBox* padding() const { return padding_.get(); }

  /// Gradient of a P1 field on element e.
  Point gradient(Index e, std::span<const double> field) const;

  friend Mesh build_structured_mesh(const StructuredDomain& domain);
  friend Mesh with_padding(const Mesh& mesh, double factor);

 private:
  int dim_ = 1;
  StructuredDomain domain_;
  std::vector<Point> nodes_;
  std::vector<std::array<Index, 3>> elements_;
  std::vector<double> measures_;
  std::vector<Eigen::Matrix<double, 3, 2>> gradients_;
  std::vector<Facet> facets_;
  std::vector<bool> dirichlet_node_;
  std::vector<bool> boundary_node_;
  Vec lumped_mass_;
  std::shared_ptr<const PaddingBox> padding_;

  void finalize();
};

/// Builds the structured mesh. Rectangle cells are split along the diagonal
/// from (i,j) to (i+1,j+1), which keeps every triangle right-angled.
Mesh build_structured_mesh(const StructuredDomain& domain);

/// Returns a copy of `mesh` carrying an enclosing box whose extent is about
/// `factor` times the domain extent per axis, centered on the domain. The
/// padding is rounded to whole cells; the realized factor is stored.
Mesh with_padding(const Mesh& mesh, double factor);

struct QuadraturePoint {
  Index element;
  Point x;
  std::array<double, 3> barycentric{};
  double weight;
};

/// 2-point Gauss on segments, 3-point mid-edge rule on triangles.
std::vector<QuadraturePoint> quadrature_points(const Mesh& mesh, Index e);

double integrate_domain(const Mesh& mesh,
                        const std::function<double(const QuadraturePoint&)>& integrand);

struct FacetPoint {
  const Facet* facet;
  Point x;
  std::array<double, 2> shape{};  // values of the two facet basis functions
  double weight;
};

double boundary_integrate(const Mesh& mesh, BoundaryTag tag,
                          const std::function<double(const FacetPoint&)>& integrand);
double boundary_integrate(const Mesh& mesh, const std::string& side,
                          const std::function<double(const FacetPoint&)>& integrand);

/// Per-node integral of the facet basis functions over facets matching the
/// predicate (the lumped boundary mass).
Vec boundary_lumped_weights(const Mesh& mesh, const std::function<bool(const Facet&)>& select);

/// Stiffness matrix of -div(A grad .) with an element-wise constant
/// symmetric coefficient. Throws on a non-symmetric coefficient.
SpMat assemble_stiffness(const Mesh& mesh, const std::function<DMatrix(Index)>& coeff);
SpMat assemble_stiffness(const Mesh& mesh, double coeff);
SpMat assemble_mass(const Mesh& mesh);

/// Writes nodes.csv, elements.csv, facets.csv into `dir`.
void write_mesh_csv(const Mesh& mesh, const std::filesystem::path& dir);

}  // namespace porofick
