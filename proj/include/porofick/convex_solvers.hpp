#pragma once

#include "porofick/types.hpp"

#include <Eigen/SparseCholesky>

#include <limits>
#include <memory>
#include <vector>

namespace porofick {

struct SolverOptions {
  double tol_grad = 1e-9;
  int max_newton = 100;
  double backtrack_beta = 0.5;
  double armijo_c = 1e-4;
  double fraction_to_boundary = 0.95;

  void validate() const;
};

/// Second-order model of an objective. When `coupling` is non-empty the true
/// Hessian is hessian + coupling^T aux^{-1} coupling with aux SPD; this is the
/// shape produced by eliminating a linear constraint field such as the
/// electrostatic potential.
struct NewtonModel {
  SpMat hessian;
  SpMat coupling;  // m x n
  SpMat aux;       // m x m
};

/// Convex objective on an open domain. value() returns +inf outside it.
class ConvexObjective {
 public:
  virtual ~ConvexObjective() = default;
  virtual Index size() const = 0;
  virtual double value(const Vec& x) const = 0;
  virtual Vec gradient(const Vec& x) const = 0;
  virtual NewtonModel hessian(const Vec& x) const = 0;
  /// Supremum of t > 0 with x + t dx inside the domain.
  virtual double max_step(const Vec&, const Vec&) const {
    return std::numeric_limits<double>::infinity();
  }
};

/// Factorization of a NewtonModel. Dense Cholesky below 200 unknowns, sparse
/// Cholesky above; the augmented quasi-definite system [H C^T; C -A] goes
/// through a sparse LDL^T with an inertia check.
class NewtonSystem {
 public:
  explicit NewtonSystem(const NewtonModel& model);
  explicit NewtonSystem(const SpMat& spd);
  ~NewtonSystem();
  NewtonSystem(NewtonSystem&&) noexcept;
  NewtonSystem& operator=(NewtonSystem&&) noexcept;

  Index size() const { return n_; }
  Vec solve(const Vec& rhs) const;
  Mat solve(const Mat& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Index n_ = 0;
};

/// Solves A x = b with A symmetric positive definite. Throws
/// SolverError(Factorization) on an indefinite or singular matrix.
Vec solve_spd(const SpMat& A, const Vec& b);

struct MinimizeResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;  // max-norm of the (projected) gradient
  double value = 0.0;
  std::vector<double> history;  // objective value per iterate
};

/// Damped Newton with Armijo backtracking and a fraction-to-boundary rule.
/// Stops when |grad|_inf <= tol_grad (1 + |f|).
MinimizeResult minimize_convex(const ConvexObjective& obj, const Vec& x0,
                               const SolverOptions& opts = {});

struct KktResult {
  Vec x;
  Vec multiplier;  // grad f(x) = B^T multiplier at the solution
  int iterations = 0;
  double stationarity = 0.0;  // |grad f - B^T multiplier|_inf
  double feasibility = 0.0;   // |B x - b|_inf
  double value = 0.0;
  std::vector<double> history;
};

/// Minimizes obj subject to B x = b (B full row rank). An infeasible start is
/// projected onto the constraint set; SolverError(Infeasible) when the
/// projection leaves the domain.
KktResult solve_equality_kkt(const ConvexObjective& obj, const Mat& B, const Vec& b,
                             const Vec& x0, const SolverOptions& opts = {});

}  // namespace porofick
