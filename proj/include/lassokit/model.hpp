#pragma once

// Problem data, iterates and objective evaluation for
//   f(x) = 1/2 ||Ax - b||^2 + mu/2 ||x||^2 + c^T x   over ||x||_{w,1} <= tau.

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "lassokit/ball.hpp"
#include "lassokit/error.hpp"

namespace lassokit {

using Matrix = Eigen::MatrixXd;

/// Matrix-free linear map R^n -> R^m.
class LinearOperator {
public:
  virtual ~LinearOperator() = default;

  virtual Index rows() const = 0;
  virtual Index cols() const = 0;
  virtual Vector apply(const Vector &x) const = 0;
  virtual Vector apply_adjoint(const Vector &y) const = 0;

  /// i-th column. The default costs one forward product.
  virtual Vector column(Index i) const {
    Vector e = Vector::Zero(cols());
    e[i] = 1.0;
    return apply(e);
  }

  /// out += scale * column(i).
  virtual void add_column(Index i, double scale, Vector &out) const {
    out.noalias() += scale * column(i);
  }
};

class DenseOperator final : public LinearOperator {
public:
  explicit DenseOperator(Matrix a) : a_(std::move(a)) {}

  Index rows() const override { return a_.rows(); }
  Index cols() const override { return a_.cols(); }

  Vector apply(const Vector &x) const override {
    detail::check_dim("operator input (cols)", a_.cols(), x.size());
    return a_ * x;
  }
  Vector apply_adjoint(const Vector &y) const override {
    detail::check_dim("adjoint input (rows)", a_.rows(), y.size());
    return a_.transpose() * y;
  }
  Vector column(Index i) const override { return a_.col(i); }
  void add_column(Index i, double scale, Vector &out) const override {
    out.noalias() += scale * a_.col(i);
  }

  const Matrix &matrix() const { return a_; }

private:
  Matrix a_;
};

struct LassoProblem {
  std::shared_ptr<const LinearOperator> op;
  Vector b;
  Vector w;
  double tau = 0.0;
  double mu = 0.0;
  Vector c;

  Index rows() const { return op->rows(); }
  Index cols() const { return op->cols(); }

  /// Checks the invariants; throws DimensionError / DomainError.
  void validate() const {
    if (!op)
      throw Error("problem has no operator");
    detail::check_dim("b (rows of A)", op->rows(), b.size());
    detail::check_dim("w (cols of A)", op->cols(), w.size());
    detail::check_dim("c (cols of A)", op->cols(), c.size());
    check_weights(w);
    if (!(tau >= 0.0) || !std::isfinite(tau))
      throw DomainError("tau must be finite and nonnegative");
    if (!(mu >= 0.0) || !std::isfinite(mu))
      throw DomainError("mu must be finite and nonnegative");
  }

  static LassoProblem create(std::shared_ptr<const LinearOperator> op, Vector b, double tau,
                             double mu = 0.0, Vector w = {}, Vector c = {}) {
    LassoProblem p;
    const Index n = op ? op->cols() : 0;
    p.op = std::move(op);
    p.b = std::move(b);
    p.w = w.size() ? std::move(w) : Vector::Ones(n);
    p.c = c.size() ? std::move(c) : Vector::Zero(n);
    p.tau = tau;
    p.mu = mu;
    p.validate();
    return p;
  }

  static LassoProblem dense(Matrix a, Vector b, double tau, double mu = 0.0, Vector w = {},
                            Vector c = {}) {
    return create(std::make_shared<DenseOperator>(std::move(a)), std::move(b), tau, mu,
                  std::move(w), std::move(c));
  }

  LassoProblem with_tau(double t) const {
    LassoProblem p = *this;
    p.tau = t;
    return p;
  }
};

/// A feasible point with its residual r = Ax - b, gradient and objective.
struct Iterate {
  Vector x;
  Vector r;
  Vector g;
  double f = 0.0;
  FaceId face;
  int drift = 0; // incremental residual updates since the last full product
};

/// Full recompute of the residual is forced after this many incremental updates.
inline constexpr int kResidualRefresh = 50;

inline double objective_from_residual(const LassoProblem &p, const Vector &x, const Vector &r) {
  return 0.5 * r.squaredNorm() + 0.5 * p.mu * x.squaredNorm() + p.c.dot(x);
}

namespace detail {

inline Iterate finish_iterate(const LassoProblem &p, Vector x, Vector r, int drift) {
  Iterate it;
  it.g = p.op->apply_adjoint(r) + p.mu * x + p.c;
  it.f = objective_from_residual(p, x, r);
  it.face = classify_face(x, p.w, p.tau);
  it.x = std::move(x);
  it.r = std::move(r);
  it.drift = drift;
  return it;
}

inline void check_finite(const Vector &x) {
  if (!x.allFinite())
    throw DomainError("point has non-finite entries");
}

} // namespace detail

/// Objective, residual and gradient at x; two operator products.
inline Iterate evaluate(const LassoProblem &p, const Vector &x) {
  detail::check_dim("x (cols of A)", p.cols(), x.size());
  detail::check_finite(x);
  Vector r = p.op->apply(x) - p.b;
  return detail::finish_iterate(p, x, std::move(r), 0);
}

/// f(x + alpha d) as a scalar quadratic after a single product Ad.
class RayObjective {
public:
  RayObjective(const LassoProblem &p, const Iterate &it, Vector d)
      : problem_(&p), base_(&it), d_(std::move(d)) {
    detail::check_dim("direction (cols of A)", p.cols(), d_.size());
    detail::check_finite(d_);
    ad_ = p.op->apply(d_);
    slope_ = it.g.dot(d_);
    curvature_ = ad_.squaredNorm() + p.mu * d_.squaredNorm();
  }

  double value(double alpha) const {
    if (alpha == 0.0)
      return base_->f;
    return base_->f + alpha * slope_ + 0.5 * alpha * alpha * curvature_;
  }

  /// d/dalpha f(x + alpha d).
  double derivative(double alpha) const { return slope_ + alpha * curvature_; }

  double slope() const { return slope_; }
  double curvature() const { return curvature_; }
  const Vector &direction() const { return d_; }
  const Vector &image() const { return ad_; }

  /// Iterate at x + alpha d using r + alpha Ad; refreshes the residual from
  /// scratch every kResidualRefresh updates.
  Iterate point(double alpha) const {
    Vector x = base_->x + alpha * d_;
    if (base_->drift + 1 >= kResidualRefresh)
      return evaluate(*problem_, x);
    Vector r = base_->r + alpha * ad_;
    return detail::finish_iterate(*problem_, std::move(x), std::move(r), base_->drift + 1);
  }

private:
  const LassoProblem *problem_;
  const Iterate *base_;
  Vector d_;
  Vector ad_;
  double slope_ = 0.0;
  double curvature_ = 0.0;
};

inline double objective_along_ray(const LassoProblem &p, const Iterate &it, const Vector &d,
                                  double alpha) {
  return RayObjective(p, it, d).value(alpha);
}

enum class LineSearchMode { backtracking, arc_first_local, arc_global };

struct SolverOptions {
  double opt_tol = 1e-6;
  long max_iter = -1; // negative: 10 * rows(A)
  int history_M = 10;
  int lbfgs_memory = 8;
  double bb_min = 1e-10;
  double bb_max = 1e10;
  double armijo_gamma = 1e-4;
  double armijo_backtrack = 0.5;
  double wolfe_gamma1 = 1e-4;
  double wolfe_gamma2 = 0.9;
  LineSearchMode line_search_mode = LineSearchMode::backtracking;
  bool record_trace = false;

  void validate() const {
    if (!(bb_min > 0.0 && bb_min < bb_max))
      throw DomainError("need 0 < bb_min < bb_max");
    if (!(wolfe_gamma1 > 0.0 && wolfe_gamma1 < 0.5 && wolfe_gamma2 > 0.5 && wolfe_gamma2 < 1.0))
      throw DomainError("need 0 < gamma1 < 1/2 < gamma2 < 1");
    if (!(armijo_backtrack > 0.0 && armijo_backtrack < 1.0))
      throw DomainError("backtracking factor must lie in (0, 1)");
    if (!(armijo_gamma > 0.0 && armijo_gamma < 1.0))
      throw DomainError("Armijo constant must lie in (0, 1)");
    if (history_M < 1 || lbfgs_memory < 1)
      throw DomainError("history and L-BFGS memory must be at least 1");
    if (!(opt_tol > 0.0))
      throw DomainError("optimality tolerance must be positive");
  }

  long iteration_cap(const LassoProblem &p) const {
    return max_iter >= 0 ? max_iter : 10 * static_cast<long>(p.rows());
  }
};

} // namespace lassokit
