#include "porofick/convex_solvers.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

namespace porofick {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr Index kDenseLimit = 200;
constexpr double kPivotTol = 1e-13;

SolverError factorization_error(const std::string& what) {
  return SolverError(SolverError::Kind::Factorization, "convex_solvers", what);
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol_grad > 0.0)) throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "tol_grad must be positive");
  if (max_newton < 1) throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "max_newton must be >= 1");
  if (!(backtrack_beta > 0.0 && backtrack_beta < 1.0))
    throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "backtrack_beta must lie in (0,1)");
  if (!(armijo_c > 0.0 && armijo_c < 1.0))
    throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "armijo_c must lie in (0,1)");
  if (!(fraction_to_boundary > 0.0 && fraction_to_boundary < 1.0))
    throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "fraction_to_boundary must lie in (0,1)");
}

struct NewtonSystem::Impl {
  enum class Mode { Dense, Sparse, Augmented } mode = Mode::Dense;
  Eigen::LLT<Mat> dense;
  Eigen::SimplicialLLT<SpMat> sparse;
  Eigen::SimplicialLDLT<SpMat> augmented;
  Vec equil;  // symmetric diagonal scaling of the augmented matrix
  Index m = 0;
};

namespace {

void check_finite(const SpMat& a) {
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      if (!std::isfinite(it.value())) throw factorization_error("non-finite matrix entry");
}

double max_abs_diag(const SpMat& a) {
  double d = 0.0;
  for (Index i = 0; i < std::min(a.rows(), a.cols()); ++i) d = std::max(d, std::abs(a.coeff(i, i)));
  return d;
}

}  // namespace

NewtonSystem::NewtonSystem(const SpMat& spd) : NewtonSystem(NewtonModel{spd, {}, {}}) {}

NewtonSystem::NewtonSystem(const NewtonModel& model) : impl_(std::make_unique<Impl>()) {
  const SpMat& h = model.hessian;
  if (h.rows() != h.cols()) throw factorization_error("Hessian is not square");
  n_ = h.rows();
  check_finite(h);
  const double scale = max_abs_diag(h);
  const bool aux = model.coupling.rows() > 0;

  if (!aux) {
    if (n_ < kDenseLimit) {
      impl_->mode = Impl::Mode::Dense;
      impl_->dense.compute(Mat(h));
      if (impl_->dense.info() != Eigen::Success)
        throw factorization_error("matrix is not positive definite");
      const Vec piv = impl_->dense.matrixL().toDenseMatrix().diagonal();
      if (piv.size() > 0 && piv.cwiseAbs2().minCoeff() <= kPivotTol * scale)
        throw factorization_error("matrix is singular to working precision");
    } else {
      impl_->mode = Impl::Mode::Sparse;
      impl_->sparse.compute(h);
      if (impl_->sparse.info() != Eigen::Success)
        throw factorization_error("matrix is not positive definite");
      const SpMat l = impl_->sparse.matrixL();
      if (Vec(l.diagonal()).cwiseAbs2().minCoeff() <= kPivotTol * scale)
        throw factorization_error("matrix is singular to working precision");
    }
    return;
  }

  const SpMat& c = model.coupling;
  const SpMat& a = model.aux;
  if (c.cols() != n_ || a.rows() != c.rows() || a.cols() != c.rows())
    throw factorization_error("inconsistent coupling block sizes");
  check_finite(c);
  check_finite(a);
  impl_->mode = Impl::Mode::Augmented;
  impl_->m = c.rows();
  const Index m = impl_->m;
  std::vector<Triplet> t;
  t.reserve(static_cast<size_t>(h.nonZeros() + 2 * c.nonZeros() + a.nonZeros()));
  for (Index k = 0; k < h.outerSize(); ++k)
    for (SpMat::InnerIterator it(h, k); it; ++it) t.emplace_back(it.row(), it.col(), it.value());
  for (Index k = 0; k < c.outerSize(); ++k)
    for (SpMat::InnerIterator it(c, k); it; ++it) {
      t.emplace_back(n_ + it.row(), it.col(), it.value());
      t.emplace_back(it.col(), n_ + it.row(), it.value());
    }
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      t.emplace_back(n_ + it.row(), n_ + it.col(), -it.value());
  SpMat kkt(n_ + m, n_ + m);
  kkt.setFromTriplets(t.begin(), t.end());
  // Jacobi equilibration: c -> 0 drives kappa/c up by many orders, which
  // would otherwise swamp the relative pivot test below.
  Vec& sc = impl_->equil;
  sc = Vec::Ones(n_ + m);
  for (Index i = 0; i < n_ + m; ++i) {
    const double di = std::abs(kkt.coeff(i, i));
    if (di > 0.0) sc(i) = 1.0 / std::sqrt(di);
  }
  kkt = sc.asDiagonal() * kkt * sc.asDiagonal();
  impl_->augmented.compute(kkt);
  if (impl_->augmented.info() != Eigen::Success) throw factorization_error("augmented factorization failed");
  // Quasi-definite: exactly n positive and m negative pivots.
  const Vec d = impl_->augmented.vectorD();
  const double dmax = d.cwiseAbs().maxCoeff();
  Index pos = 0, neg = 0;
  for (Index i = 0; i < d.size(); ++i) {
    if (std::abs(d(i)) <= 1e-15 * dmax) throw factorization_error("augmented matrix is singular");
    (d(i) > 0.0 ? pos : neg)++;
  }
  if (pos != n_ || neg != m) throw factorization_error("Hessian is not positive definite (inertia check)");
}

NewtonSystem::~NewtonSystem() = default;
NewtonSystem::NewtonSystem(NewtonSystem&&) noexcept = default;
NewtonSystem& NewtonSystem::operator=(NewtonSystem&&) noexcept = default;

Vec NewtonSystem::solve(const Vec& rhs) const {
  switch (impl_->mode) {
    case Impl::Mode::Dense:
      return impl_->dense.solve(rhs);
    case Impl::Mode::Sparse:
      return impl_->sparse.solve(rhs);
    case Impl::Mode::Augmented: {
      Vec full = Vec::Zero(n_ + impl_->m);
      full.head(n_) = rhs;
      const Vec& sc = impl_->equil;
      const Vec sol = sc.cwiseProduct(impl_->augmented.solve(sc.cwiseProduct(full)));
      return sol.head(n_);
    }
  }
  return {};
}

Mat NewtonSystem::solve(const Mat& rhs) const {
  Mat out(rhs.rows(), rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) out.col(j) = solve(Vec(rhs.col(j)));
  return out;
}

Vec solve_spd(const SpMat& A, const Vec& b) {
  if (A.rows() != b.size()) throw factorization_error("right-hand side has wrong size");
  NewtonSystem sys(A);
  Vec x = sys.solve(b);
  // One step of iterative refinement keeps the relative residual near roundoff.
  const Vec r = b - A * x;
  x += sys.solve(r);
  return x;
}

namespace {

struct StepOutcome {
  bool accepted = false;
  double t = 0.0;
  double value = 0.0;
};

StepOutcome line_search(const ConvexObjective& obj, const Vec& x, const Vec& dx, double f,
                        double slope, const SolverOptions& opts) {
  double t = 1.0;
  const double ms = obj.max_step(x, dx);
  if (ms <= 1.0) t = opts.fraction_to_boundary * ms;
  // Roundoff allowance so that steps near the minimizer are not rejected
  // purely because f cannot resolve the predicted decrease.
  const double slack = 10.0 * kEps * std::abs(f);
  while (t > 1e-14) {
    const double fn = obj.value(x + t * dx);
    if (std::isfinite(fn) && fn <= f + opts.armijo_c * t * slope + slack) return {true, t, fn};
    t *= opts.backtrack_beta;
  }
  return {};
}

// Predicted Newton decrease below what the objective can resolve.
bool at_roundoff_floor(double slope, double f) { return -0.5 * slope <= 100.0 * kEps * (1.0 + std::abs(f)); }

SolverError not_converged(const std::string& what) {
  return SolverError(SolverError::Kind::NotConverged, "convex_solvers", what);
}

}  // namespace

MinimizeResult minimize_convex(const ConvexObjective& obj, const Vec& x0, const SolverOptions& opts) {
  opts.validate();
  if (x0.size() != obj.size()) throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "x0 has wrong size");
  MinimizeResult res;
  res.x = x0;
  double f = obj.value(res.x);
  if (!std::isfinite(f))
    throw SolverError(SolverError::Kind::Infeasible, "convex_solvers", "initial point outside the objective domain");
  for (int it = 0;; ++it) {
    res.history.push_back(f);
    const Vec g = obj.gradient(res.x);
    res.residual = g.size() ? g.cwiseAbs().maxCoeff() : 0.0;
    res.value = f;
    res.iterations = it;
    if (res.residual <= opts.tol_grad * (1.0 + std::abs(f))) return res;
    if (it >= opts.max_newton)
      throw not_converged("Newton iteration cap reached, |grad| = " + std::to_string(res.residual));
    NewtonSystem sys(obj.hessian(res.x));
    const Vec dx = -sys.solve(g);
    const double slope = g.dot(dx);
    if (!(slope < 0.0)) {
      if (at_roundoff_floor(slope, f)) return res;
      throw not_converged("Newton direction is not a descent direction");
    }
    const StepOutcome step = line_search(obj, res.x, dx, f, slope, opts);
    if (!step.accepted) {
      if (at_roundoff_floor(slope, f)) return res;
      throw not_converged("line search failed");
    }
    res.x += step.t * dx;
    f = step.value;
  }
}

KktResult solve_equality_kkt(const ConvexObjective& obj, const Mat& B, const Vec& b, const Vec& x0,
                             const SolverOptions& opts) {
  opts.validate();
  const Index n = obj.size();
  const Index m = B.rows();
  if (B.cols() != n || b.size() != m || x0.size() != n)
    throw SolverError(SolverError::Kind::Precondition, "convex_solvers", "constraint dimensions do not match");
  Eigen::ColPivHouseholderQR<Mat> qr(B.transpose());
  qr.setThreshold(1e-12);
  if (qr.rank() < m)
    throw SolverError(SolverError::Kind::RankDeficient, "convex_solvers", "constraint matrix is rank deficient");
  const Eigen::LDLT<Mat> gram(B * B.transpose());

  KktResult res;
  res.x = x0;
  const double btol = opts.tol_grad * (1.0 + b.cwiseAbs().maxCoeff());
  Vec r = b - B * res.x;
  if (r.cwiseAbs().maxCoeff() > 0.0) res.x += B.transpose() * gram.solve(r);
  double f = obj.value(res.x);
  if (!std::isfinite(f))
    throw SolverError(SolverError::Kind::Infeasible, "convex_solvers",
                      "constraint set does not meet the objective domain at the start point");

  for (int it = 0;; ++it) {
    res.history.push_back(f);
    const Vec g = obj.gradient(res.x);
    r = b - B * res.x;
    res.multiplier = gram.solve(B * g);
    res.stationarity = (g - B.transpose() * res.multiplier).cwiseAbs().maxCoeff();
    res.feasibility = r.cwiseAbs().maxCoeff();
    res.value = f;
    res.iterations = it;
    if (res.stationarity <= opts.tol_grad * (1.0 + std::abs(f)) && res.feasibility <= btol) return res;
    if (it >= opts.max_newton)
      throw not_converged("KKT Newton iteration cap reached, stationarity = " + std::to_string(res.stationarity));

    NewtonSystem sys(obj.hessian(res.x));
    const Mat z = sys.solve(Mat(B.transpose()));
    const Vec d0 = -sys.solve(g);
    const Mat s = B * z;
    Eigen::LDLT<Mat> schur(s);
    if (schur.info() != Eigen::Success)
      throw factorization_error("constraint Schur complement is singular");
    const Vec nu = schur.solve(r - B * d0);
    const Vec dx = d0 + z * nu;
    const double slope = g.dot(dx);
    if (!(slope < 0.0)) {
      if (at_roundoff_floor(slope, f) && res.feasibility <= btol) return res;
      if (res.feasibility > btol) {
        // Pure feasibility correction.
        res.x += dx;
        f = obj.value(res.x);
        if (!std::isfinite(f))
          throw SolverError(SolverError::Kind::Infeasible, "convex_solvers", "feasibility correction left the domain");
        continue;
      }
      throw not_converged("KKT direction is not a descent direction");
    }
    const StepOutcome step = line_search(obj, res.x, dx, f, slope, opts);
    if (!step.accepted) {
      if (at_roundoff_floor(slope, f) && res.feasibility <= btol) return res;
      throw not_converged("KKT line search failed");
    }
    res.x += step.t * dx;
    f = step.value;
  }
}

}  // namespace porofick
