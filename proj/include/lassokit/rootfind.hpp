#pragma once

// Basis-pursuit denoise through root finding on the Pareto curve
// phi(tau) = ||r_tau||_2. Each radius is a fully solved Lasso subproblem; the
// curve's slope -lambda / ||r|| comes from the best dual certificate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lassokit/solver.hpp"

namespace lassokit {

enum class SolverKind { spg, hybrid };

inline const char *to_string(SolverKind k) { return k == SolverKind::spg ? "spg" : "hybrid"; }

enum class RootStatus { root, budget_exhausted, stalled };

inline const char *to_string(RootStatus s) {
  switch (s) {
  case RootStatus::root: return "root";
  case RootStatus::budget_exhausted: return "budget_exhausted";
  case RootStatus::stalled: return "stalled";
  }
  return "?";
}

struct RootOptions {
  SolverKind solver = SolverKind::hybrid;
  SolverOptions inner;
  double root_tol = 1e-5;
  int max_subproblems = 100;
};

struct ParetoState {
  double tau = 0.0;
  double sigma = 0.0;
  double misfit = 0.0;
  double lambda_best = 0.0;
  Vector warm_start;

  /// Estimate of phi'(tau).
  double slope() const { return misfit > 0.0 ? -lambda_best / misfit : 0.0; }
};

struct ParetoPoint {
  double tau = 0.0;
  double misfit = 0.0;
  double lambda = 0.0;
  long iterations = 0;
  SolverStatus status = SolverStatus::optimal;
};

struct RootReport {
  double tau_root = 0.0;
  Vector x;
  double misfit = 0.0;
  int subproblem_count = 0;
  long total_inner_iterations = 0;
  RootStatus status = RootStatus::budget_exhausted;
  std::vector<ParetoPoint> path; // every evaluated radius, tau = 0 included
};

inline double relative_misfit(double sigma, double misfit) {
  return std::abs(sigma - misfit) / std::max(sigma, 1e-3);
}

/// Newton step on phi(tau) - sigma with phi' = -lambda / misfit:
/// tau + (misfit - sigma) * misfit / lambda, clamped at zero.
inline double newton_tau_update(const ParetoState &s) {
  if (!(s.misfit > 0.0) || !(s.lambda_best > 0.0))
    throw DomainError("Newton update needs a positive misfit and dual threshold");
  return std::max(0.0, s.tau + (s.misfit - s.sigma) * s.misfit / s.lambda_best);
}

/// Smallest-one-norm solution with ||Ax - b|| <= sigma, as the root of
/// phi(tau) = sigma. p.tau is ignored; the search starts from tau = 0.
inline RootReport solve_bpdn(const LassoProblem &p, double sigma, const RootOptions &opt = {}) {
  p.validate();
  if (!(sigma >= 0.0) || !std::isfinite(sigma))
    throw DomainError("sigma must be finite and nonnegative");

  RootReport rep;
  const Index n = p.cols();

  // tau = 0: the origin is the only feasible point
  LassoProblem sub = p.with_tau(0.0);
  Iterate origin = evaluate(sub, Vector::Zero(n));
  ParetoState st;
  st.sigma = sigma;
  st.tau = 0.0;
  st.misfit = origin.r.norm();
  st.lambda_best = weighted_dual_norm(origin.g, p.w);
  st.warm_start = Vector::Zero(n);
  rep.path.push_back({0.0, st.misfit, st.lambda_best, 0, SolverStatus::optimal});
  rep.x = st.warm_start;
  rep.misfit = st.misfit;

  if (st.misfit <= sigma || relative_misfit(sigma, st.misfit) <= opt.root_tol) {
    rep.status = RootStatus::root;
    return rep;
  }

  // bracket: phi(lo) > sigma, phi(hi) < sigma
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  while (rep.subproblem_count < opt.max_subproblems) {
    if (st.misfit > sigma && st.lambda_best < 1e-14) {
      rep.status = RootStatus::stalled;
      return rep;
    }
    double next = newton_tau_update(st);
    const bool inside = next > lo && next < hi;
    if (!inside)
      next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(lo, st.tau) + 1e-12;

    sub.tau = next;
    const Vector x0 = project(st.warm_start, p.w, next).x;
    const SolverReport r = opt.solver == SolverKind::spg ? spg_solve(sub, x0, opt.inner)
                                                         : hybrid_solve(sub, x0, opt.inner);
    ++rep.subproblem_count;
    rep.total_inner_iterations += r.iterations;

    st.tau = next;
    st.misfit = (p.op->apply(r.x) - p.b).norm();
    st.lambda_best = r.lambda_best;
    st.warm_start = r.x;
    rep.path.push_back({next, st.misfit, st.lambda_best, r.iterations, r.status});
    rep.tau_root = next;
    rep.x = r.x;
    rep.misfit = st.misfit;

    if (relative_misfit(sigma, st.misfit) <= opt.root_tol) {
      rep.status = RootStatus::root;
      return rep;
    }
    // any feasible x bounds phi(tau) from above, so hi is always certified;
    // lo only when the subproblem was solved
    if (st.misfit <= sigma)
      hi = std::min(hi, next);
    else if (r.status == SolverStatus::optimal)
      lo = std::max(lo, next);
    if (std::isfinite(hi) && hi - lo <= 1e-15 * hi) {
      rep.status = RootStatus::stalled;
      return rep;
    }
  }
  rep.status = RootStatus::budget_exhausted;
  return rep;
}

} // namespace lassokit
