#pragma once

// Optimality measures: projected-gradient residual, dual-feasible certificates
// built from the residual, and best-so-far primal/dual tracking.
//
// The dual vector is y = b - Ax, i.e. the negated Iterate residual.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lassokit/ball.hpp"
#include "lassokit/model.hpp"

namespace lassokit {

/// ||P(x - g) - x|| / max(1, ||g||).
inline double projected_gradient_residual(const LassoProblem &p, const Iterate &it) {
  const Vector step = project(it.x - it.g, p.w, p.tau).x - it.x;
  return step.norm() / std::max(1.0, it.g.norm());
}

enum class DualFormulation { mu_zero, augmented, optimized };

inline const char *to_string(DualFormulation f) {
  switch (f) {
  case DualFormulation::mu_zero: return "mu_zero";
  case DualFormulation::augmented: return "augmented";
  case DualFormulation::optimized: return "optimized";
  }
  return "?";
}

struct DualCertificate {
  Vector y;
  double lambda = 0.0;
  double dual_obj = -std::numeric_limits<double>::infinity();
  DualFormulation formulation = DualFormulation::mu_zero;
};

struct GapResult {
  DualCertificate certificate;
  double gap = 0.0;
};

namespace detail {

inline double clamp_gap(double gap, double f) {
  const double slack = 1e-10 * (1.0 + std::abs(f));
  return (gap < 0.0 && gap >= -slack) ? 0.0 : gap;
}

} // namespace detail

/// argmin_{lambda >= 0} tau lambda + 1/(2 mu) ||[z - lambda w]_+||^2.
///
/// The derivative vanishes where sum_i w_i [z_i - lambda w_i]_+ = mu tau, which
/// is the threshold that projects z onto the ball of radius mu tau; the same
/// sorted sweep over the breakpoints z_i / w_i finds it.
inline double optimal_dual_lambda(const Vector &z, const Vector &w, double tau, double mu) {
  detail::check_dim("dual weights", z.size(), w.size());
  if (!(mu > 0.0))
    throw DomainError("optimal dual threshold requires mu > 0");
  if (tau * mu >= (w.array() * z.array()).sum())
    return 0.0;
  return projection_threshold(z, w, mu * tau);
}

inline GapResult dual_gap_mu_zero(const LassoProblem &p, const Iterate &it) {
  if (p.mu != 0.0)
    throw DomainError("mu > 0: use dual_gap_augmented or dual_gap_optimized");
  GapResult out;
  DualCertificate &c = out.certificate;
  c.formulation = DualFormulation::mu_zero;
  c.y = -it.r;
  // A'y - c = -g when mu = 0
  c.lambda = weighted_dual_norm(it.g, p.w);
  c.dual_obj = c.y.dot(p.b) - p.tau * c.lambda - 0.5 * c.y.squaredNorm();
  out.gap = detail::clamp_gap(it.f - c.dual_obj, it.f);
  return out;
}

inline GapResult dual_gap_augmented(const LassoProblem &p, const Iterate &it) {
  if (!(p.mu > 0.0))
    throw DomainError("augmented dual requires mu > 0");
  GapResult out;
  DualCertificate &c = out.certificate;
  c.formulation = DualFormulation::augmented;
  c.y = -it.r;
  // A'y - mu x - c = -g
  c.lambda = weighted_dual_norm(it.g, p.w);
  c.dual_obj = c.y.dot(p.b) - p.tau * c.lambda - 0.5 * c.y.squaredNorm() -
               0.5 * p.mu * it.x.squaredNorm();
  out.gap = detail::clamp_gap(it.f - c.dual_obj, it.f);
  return out;
}

/// Dual value of y = b - Ax for the mu > 0 problem at a given threshold.
inline double optimized_dual_objective(const LassoProblem &p, const Vector &y, const Vector &z,
                                       double lambda) {
  const Vector excess = (z - lambda * p.w).cwiseMax(0.0);
  return y.dot(p.b) - p.tau * lambda - 0.5 * y.squaredNorm() -
         excess.squaredNorm() / (2.0 * p.mu);
}

inline GapResult dual_gap_optimized(const LassoProblem &p, const Iterate &it) {
  if (!(p.mu > 0.0))
    throw DomainError("optimized dual requires mu > 0");
  GapResult out;
  DualCertificate &c = out.certificate;
  c.formulation = DualFormulation::optimized;
  c.y = -it.r;
  const Vector z = (it.g - p.mu * it.x).cwiseAbs(); // |A'y - c|
  c.lambda = optimal_dual_lambda(z, p.w, p.tau, p.mu);
  c.dual_obj = optimized_dual_objective(p, c.y, z, c.lambda);
  out.gap = detail::clamp_gap(it.f - c.dual_obj, it.f);
  return out;
}

/// Formulation used by the solvers: mu_zero when mu = 0, optimized otherwise.
inline GapResult dual_gap(const LassoProblem &p, const Iterate &it) {
  return p.mu > 0.0 ? dual_gap_optimized(p, it) : dual_gap_mu_zero(p, it);
}

inline double relative_gap(double f, double dual) {
  return (f - dual) / std::max(f, 1e-3);
}

struct BestPair {
  Vector x;
  double f = std::numeric_limits<double>::infinity();
  DualCertificate dual;
  double gap_relative = std::numeric_limits<double>::infinity();
};

/// Tracks the lowest primal value and the highest dual value seen so far and
/// declares optimality once their relative gap reaches the tolerance.
class StoppingOracle {
public:
  explicit StoppingOracle(double tol) : tol_(tol) {}

  /// Records an iterate; returns true when the tracked gap is within tolerance.
  bool update(const LassoProblem &p, const Iterate &it) {
    if (it.f < best_.f) {
      best_.f = it.f;
      best_.x = it.x;
    }
    GapResult g = dual_gap(p, it);
    last_gap_relative_ = relative_gap(it.f, g.certificate.dual_obj);
    if (g.certificate.dual_obj > best_.dual.dual_obj)
      best_.dual = std::move(g.certificate);
    double gap = best_.f - best_.dual.dual_obj;
    gap = detail::clamp_gap(gap, best_.f);
    best_.gap_relative = gap / std::max(best_.f, 1e-3);
    return optimal();
  }

  bool optimal() const { return best_.gap_relative <= tol_; }
  const BestPair &best() const { return best_; }
  double best_lambda() const { return best_.dual.lambda; }
  double tolerance() const { return tol_; }
  /// Gap of the most recent iterate against its own certificate.
  double last_gap_relative() const { return last_gap_relative_; }

private:
  double tol_;
  BestPair best_;
  double last_gap_relative_ = std::numeric_limits<double>::infinity();
};

enum class StopDecision { keep_going, optimal };

inline StopDecision stopping_oracle(const BestPair &best, const SolverOptions &opt) {
  return best.gap_relative <= opt.opt_tol ? StopDecision::optimal : StopDecision::keep_going;
}

} // namespace lassokit
