#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>
#include <vector>

namespace porofick {

using Index = Eigen::Index;

inline constexpr int kMaxDim = 2;
inline constexpr int kMaxVoigt = 3;
inline constexpr int kMaxComponents = 4;

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Spatial point or vector in R^d, d <= 2.
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
/// d x d matrix (mobility, conductivity, permittivity tensors).
using DMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// Symmetric strain/stress in Voigt form. Strains carry engineering shear
/// (e11, e22, 2 e12); stresses carry tensor shear (s11, s22, s12), so the
/// plain dot product of a strain and a stress is the tensor contraction.
using Voigt = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxVoigt, 1>;
using VoigtMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVoigt, kMaxVoigt>;

/// Concentrations / potentials of the N diffusant components at one point.
using Conc = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxComponents, 1>;
using ConcMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxComponents, kMaxComponents>;
/// Mixed second derivative d^2 phi / (de dc): voigt rows, one column per component.
using CouplingMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxVoigt, kMaxComponents>;

inline int voigt_size(int dim) { return dim == 1 ? 1 : 3; }

/// Base of all errors raised by the library. The module name is carried so
/// that the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}
  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

class MeshError : public Error {
 public:
  explicit MeshError(const std::string& what) : Error("mesh_fem", what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error("materials", what) {}
};

class SolverError : public Error {
 public:
  enum class Kind { NotConverged, Factorization, Infeasible, RankDeficient, Precondition };
  SolverError(Kind kind, std::string module, const std::string& what)
      : Error(std::move(module), what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

}  // namespace porofick
