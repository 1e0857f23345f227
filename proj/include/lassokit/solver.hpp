#pragma once

// Spectral projected gradient and the hybrid method that switches to
// reduced-space L-BFGS steps while the iterates stay on one face.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "lassokit/ball.hpp"
#include "lassokit/duality.hpp"
#include "lassokit/facebasis.hpp"
#include "lassokit/lbfgs.hpp"
#include "lassokit/linesearch.hpp"
#include "lassokit/model.hpp"

namespace lassokit {

enum class SolverStatus { optimal, iter_limit, linesearch_failure };

inline const char *to_string(SolverStatus s) {
  switch (s) {
  case SolverStatus::optimal: return "optimal";
  case SolverStatus::iter_limit: return "iter_limit";
  case SolverStatus::linesearch_failure: return "linesearch_failure";
  }
  return "?";
}

enum class StepKind { projected_gradient, quasi_newton };

inline const char *to_string(StepKind k) {
  return k == StepKind::quasi_newton ? "qn" : "pg";
}

struct TraceRecord {
  long iteration = 0;
  double f = 0.0;
  double gap_relative = 0.0;
  StepKind kind = StepKind::projected_gradient;
  long face_dim = -1; // -1 for the interior
  // For quasi-Newton steps: supports before and after the step.
  std::vector<Index> support_before;
  std::vector<Index> support_after;
  bool interior_before = false;
};

struct SolverReport {
  Vector x;
  double f = 0.0;
  double dual_gap_relative = 0.0;
  long iterations = 0;
  long qn_steps = 0;
  long pg_steps = 0;
  SolverStatus status = SolverStatus::iter_limit;
  double dual_obj = 0.0;
  double lambda_best = 0.0;
  std::vector<TraceRecord> trace;
};

namespace detail {

inline double initial_spectral_step(const LassoProblem &p, const Iterate &it,
                                    const SolverOptions &opt) {
  const Vector pg = project(it.x - it.g, p.w, p.tau).x - it.x;
  const double m = pg.lpNorm<Eigen::Infinity>();
  if (!(m > 0.0))
    return opt.bb_max;
  return std::clamp(1.0 / m, opt.bb_min, opt.bb_max);
}

inline StepResult projected_gradient_step(const LassoProblem &p, const Iterate &it, double alpha,
                                          const HistoryBuffer &history, const SolverOptions &opt) {
  switch (opt.line_search_mode) {
  case LineSearchMode::arc_first_local:
    return trajectory_search(p, it, alpha, ArcSearchMode::first_local, history, opt.armijo_gamma,
                             opt.armijo_backtrack)
        .step;
  case LineSearchMode::arc_global:
    return trajectory_search(p, it, alpha, ArcSearchMode::global, history, opt.armijo_gamma,
                             opt.armijo_backtrack)
        .step;
  case LineSearchMode::backtracking:
    break;
  }
  return nonmonotone_armijo_backtrack(p, it, alpha, history, opt.armijo_gamma,
                                      opt.armijo_backtrack);
}

class RunState {
public:
  RunState(const LassoProblem &p, const Vector &x0, const SolverOptions &opt)
      : problem(p), options(opt), oracle(opt.opt_tol), history(opt.history_M) {
    p.validate();
    opt.validate();
    detail::check_dim("x0 (cols of A)", p.cols(), x0.size());
    current = evaluate(p, project(x0, p.w, p.tau).x);
    history.reset(current.f);
    oracle.update(p, current);
  }

  void record(StepKind kind, const Iterate *before = nullptr) {
    if (!options.record_trace)
      return;
    TraceRecord t;
    t.iteration = iterations;
    t.f = current.f;
    t.gap_relative = oracle.best().gap_relative;
    t.kind = kind;
    t.face_dim = current.face.dimension();
    if (kind == StepKind::quasi_newton && before) {
      t.interior_before = before->face.is_interior();
      t.support_before = before->face.is_interior() ? std::vector<Index>{}
                                                    : before->face.support();
      t.support_after = current.face.is_interior() ? std::vector<Index>{}
                                                   : current.face.support();
    }
    trace.push_back(std::move(t));
  }

  SolverReport finish(SolverStatus status) {
    SolverReport r;
    const BestPair &b = oracle.best();
    r.x = b.x;
    r.f = b.f;
    r.dual_gap_relative = b.gap_relative;
    r.dual_obj = b.dual.dual_obj;
    r.lambda_best = b.dual.lambda;
    r.iterations = iterations;
    r.qn_steps = qn_steps;
    r.pg_steps = pg_steps;
    r.status = oracle.optimal() ? SolverStatus::optimal : status;
    r.trace = std::move(trace);
    return r;
  }

  const LassoProblem &problem;
  const SolverOptions &options;
  StoppingOracle oracle;
  HistoryBuffer history;
  Iterate current;
  long iterations = 0;
  long qn_steps = 0;
  long pg_steps = 0;
  std::vector<TraceRecord> trace;
};

} // namespace detail

/// Nonmonotone spectral projected gradient.
inline SolverReport spg_solve(const LassoProblem &p, const Vector &x0,
                              const SolverOptions &opt = {}) {
  detail::RunState st(p, x0, opt);
  if (st.oracle.optimal())
    return st.finish(SolverStatus::optimal);
  const long cap = opt.iteration_cap(p);
  double alpha = detail::initial_spectral_step(p, st.current, opt);
  while (st.iterations < cap) {
    StepResult step = detail::projected_gradient_step(p, st.current, alpha, st.history, opt);
    if (!step.accepted || step.stationary)
      return st.finish(SolverStatus::linesearch_failure);
    const Vector s = step.next.x - st.current.x;
    const Vector y = step.next.g - st.current.g;
    alpha = bb_step(s, y, opt.bb_min, opt.bb_max);
    st.current = std::move(step.next);
    st.history.push(st.current.f);
    ++st.iterations;
    ++st.pg_steps;
    const bool done = st.oracle.update(p, st.current);
    st.record(StepKind::projected_gradient);
    if (done)
      return st.finish(SolverStatus::optimal);
  }
  return st.finish(SolverStatus::iter_limit);
}

/// Hybrid method: a quasi-Newton step on the current face whenever a model is
/// available and a Wolfe step fits on the face, a projected-gradient step
/// otherwise. The model is kept only while consecutive iterates share a face
/// and the negative gradient lies in that face's self-projection cone.
inline SolverReport hybrid_solve(const LassoProblem &p, const Vector &x0,
                                 const SolverOptions &opt = {}) {
  detail::RunState st(p, x0, opt);
  if (st.oracle.optimal())
    return st.finish(SolverStatus::optimal);
  const long cap = opt.iteration_cap(p);
  double alpha = detail::initial_spectral_step(p, st.current, opt);

  std::optional<LbfgsModel> model;
  FaceBasis basis = FaceBasis::whole_space(p.cols());
  FaceId model_face;

  while (st.iterations < cap) {
    const Iterate prev = st.current;
    bool took_qn = false;

    if (model) {
      const Vector d = basis.apply(lbfgs_direction(*model, basis.apply_adjoint(prev.g)));
      if (prev.g.dot(d) < 0.0) {
        const double bound = max_step_on_face(prev.x, d, p.w, p.tau);
        if (auto fs = face_wolfe_search(p, prev, d, bound, opt)) {
          st.current = std::move(fs->next);
          st.history.reset(st.current.f);
          took_qn = true;
        }
      }
    }
    if (!took_qn) {
      StepResult step = detail::projected_gradient_step(p, prev, alpha, st.history, opt);
      if (!step.accepted || step.stationary)
        return st.finish(SolverStatus::linesearch_failure);
      st.current = std::move(step.next);
      st.history.push(st.current.f);
    }
    ++st.iterations;
    ++(took_qn ? st.qn_steps : st.pg_steps);

    const Iterate &cur = st.current;
    const Vector s = cur.x - prev.x;
    const Vector y = cur.g - prev.g;
    alpha = bb_step(s, y, opt.bb_min, opt.bb_max);

    // vertices (and the degenerate tau = 0 ball) have no difference hull
    const bool has_hull = cur.face.is_interior() || cur.face.support_size() >= 2;
    const bool keep = cur.face == prev.face && has_hull &&
                      in_self_projection_cone(cur.x, -cur.g, p.w, p.tau);
    if (keep) {
      if (!model || !(model_face == cur.face)) {
        basis = cur.face.is_interior() ? FaceBasis::whole_space(p.cols())
                                       : FaceBasis::for_face(cur.face, p.w);
        model_face = cur.face;
        const double sy = s.dot(y);
        const double h0 = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, opt.bb_min, opt.bb_max)
                                   : std::clamp(alpha, opt.bb_min, opt.bb_max);
        model.emplace(opt.lbfgs_memory, h0);
      }
      lbfgs_update(*model, basis.apply_adjoint(s), basis.apply_adjoint(y));
    } else {
      model.reset();
    }

    const bool done = st.oracle.update(p, st.current);
    st.record(took_qn ? StepKind::quasi_newton : StepKind::projected_gradient, &prev);
    if (done)
      return st.finish(SolverStatus::optimal);
  }
  return st.finish(SolverStatus::iter_limit);
}

} // namespace lassokit
