#pragma once

// Step-length rules for the quadratic objective: exact ray minimizer, Wolfe
// window, nonmonotone projected backtracking, face-restricted Wolfe steps and
// a search along the full projection arc.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>

#include "lassokit/arc.hpp"
#include "lassokit/ball.hpp"
#include "lassokit/model.hpp"

namespace lassokit {

/// Products along a ray x + alpha d needed by the closed-form step rules.
struct RaySearchData {
  Vector Ad;
  double d_norm_sq = 0.0;
  double Ad_norm_sq = 0.0;
  double gd = 0.0;
  double alpha_opt = 0.0;
  bool flat = false; // zero curvature along d
};

inline RaySearchData ray_search_data(const LassoProblem &p, const Iterate &it, const Vector &d) {
  detail::check_dim("direction (cols of A)", p.cols(), d.size());
  RaySearchData r;
  r.Ad = p.op->apply(d);
  r.d_norm_sq = d.squaredNorm();
  r.Ad_norm_sq = r.Ad.squaredNorm();
  r.gd = it.g.dot(d);
  const double curv = r.Ad_norm_sq + p.mu * r.d_norm_sq;
  if (curv <= 1e-300) {
    if (r.gd < 0.0)
      throw DomainError("objective is unbounded below along the direction");
    r.flat = true;
    r.alpha_opt = std::numeric_limits<double>::infinity();
  } else {
    r.alpha_opt = -r.gd / curv;
  }
  return r;
}

/// Minimizer of f(x + alpha d) over alpha in R; +inf when the ray is flat.
inline double alpha_opt(const LassoProblem &p, const Iterate &it, const Vector &d) {
  return ray_search_data(p, it, d).alpha_opt;
}

struct WolfeWindow {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double a) const { return a > lo && a < hi; }
};

inline WolfeWindow wolfe_window_from(double alpha_opt, double gamma1, double gamma2) {
  return {(1.0 - gamma2) * alpha_opt, 2.0 * (1.0 - gamma1) * alpha_opt};
}

/// Open interval of steps satisfying both Wolfe conditions along a descent ray.
inline WolfeWindow wolfe_window(const LassoProblem &p, const Iterate &it, const Vector &d,
                                double gamma1, double gamma2) {
  const RaySearchData r = ray_search_data(p, it, d);
  if (!(r.gd < 0.0))
    throw DomainError("Wolfe window requires a descent direction");
  return wolfe_window_from(r.alpha_opt, gamma1, gamma2);
}

/// The last M objective values.
class HistoryBuffer {
public:
  explicit HistoryBuffer(int capacity) : capacity_(static_cast<std::size_t>(std::max(capacity, 1))) {}

  void push(double f) {
    values_.push_back(f);
    if (values_.size() > capacity_)
      values_.pop_front();
  }

  void reset(double f) {
    values_.clear();
    values_.push_back(f);
  }

  double max() const {
    return values_.empty() ? std::numeric_limits<double>::infinity()
                           : *std::max_element(values_.begin(), values_.end());
  }

  std::size_t size() const { return values_.size(); }
  std::size_t capacity() const { return capacity_; }

private:
  std::size_t capacity_;
  std::deque<double> values_;
};

inline constexpr int kMaxBacktracks = 50;

struct StepResult {
  Iterate next;
  double alpha = 0.0;
  int trials = 0;
  bool accepted = false;
  bool stationary = false; // the projected step did not move
};

/// Spectral step s's / s'y clamped to [alpha_min, alpha_max]; alpha_max when
/// the curvature s'y is not positive.
inline double bb_step(const Vector &s, const Vector &y, double alpha_min, double alpha_max) {
  const double sy = s.dot(y);
  if (!(sy > 0.0))
    return alpha_max;
  return std::clamp(s.squaredNorm() / sy, alpha_min, alpha_max);
}

/// Tries x_k = P(x - mu_bt^k alpha0 g) for k = 0, 1, ... until
/// f(x_k) <= max(history) + gamma g'(x_k - x).
inline StepResult nonmonotone_armijo_backtrack(const LassoProblem &p, const Iterate &it,
                                               double alpha0, const HistoryBuffer &history,
                                               double gamma, double mu_bt) {
  StepResult res;
  const double ref = history.max();
  double alpha = alpha0;
  for (int k = 0; k < kMaxBacktracks; ++k, alpha *= mu_bt) {
    res.trials = k + 1;
    Vector x = project(it.x - alpha * it.g, p.w, p.tau).x;
    const Vector step = x - it.x;
    if (step.lpNorm<Eigen::Infinity>() == 0.0) {
      res.next = it;
      res.alpha = 0.0;
      res.accepted = true;
      res.stationary = true;
      return res;
    }
    Iterate cand = evaluate(p, x);
    if (cand.f <= ref + gamma * it.g.dot(step)) {
      res.next = std::move(cand);
      res.alpha = alpha;
      res.accepted = true;
      return res;
    }
  }
  res.next = it;
  return res;
}

struct FaceStep {
  Iterate next;
  double alpha = 0.0;
  bool hit_bound = false;
};

/// Wolfe step along an in-face descent direction, never beyond alpha_bound.
///
/// Takes alpha_opt when it fits on the face, otherwise the bound itself when
/// the bound is past the lower Wolfe limit; returns nothing when the window
/// lies entirely beyond the bound.
inline std::optional<FaceStep> face_wolfe_search(const LassoProblem &p, const Iterate &it,
                                                 const Vector &d, double alpha_bound,
                                                 const SolverOptions &opt) {
  const RayObjective ray(p, it, d);
  if (!(ray.slope() < 0.0))
    return std::nullopt;
  const double curv = ray.curvature();
  const double a_opt = curv > 1e-300 ? -ray.slope() / curv : std::numeric_limits<double>::infinity();
  const WolfeWindow win = wolfe_window_from(a_opt, opt.wolfe_gamma1, opt.wolfe_gamma2);

  FaceStep step;
  if (a_opt <= alpha_bound) {
    step.alpha = a_opt;
  } else if (std::isfinite(alpha_bound) && alpha_bound >= win.lo) {
    step.alpha = alpha_bound;
    step.hit_bound = true;
  } else {
    return std::nullopt;
  }
  if (!std::isfinite(step.alpha))
    return std::nullopt;

  if (step.hit_bound) {
    // coordinates reaching zero at the bound are set to exactly zero
    Vector x = it.x + step.alpha * d;
    const double tol = 1e-12 * std::max(1.0, it.x.lpNorm<Eigen::Infinity>());
    for (Index i = 0; i < x.size(); ++i)
      if (std::abs(x[i]) <= tol && it.x[i] * d[i] < 0.0)
        x[i] = 0.0;
    step.next = evaluate(p, x);
  } else {
    step.next = ray.point(step.alpha);
  }
  return step;
}

enum class ArcSearchMode { first_local, global };

struct ArcSearchResult {
  StepResult step;
  bool used_arc = false; // false when the backtracking fallback produced the step
  std::size_t segments = 0;
};

namespace detail {

/// Keeps A p(alpha) for the arc segment currently visited as
/// A s_I + alpha A d_I - lambda(alpha) A (sigma w)_I, updating the three
/// products column by column when the support changes.
class ArcImage {
public:
  ArcImage(const LassoProblem &p, const ProjectionArc &arc)
      : p_(p), arc_(arc), n_(p.cols()), sign_(static_cast<std::size_t>(n_), 0) {
    const Index m = p.rows();
    as_ = Vector::Zero(m);
    ad_ = Vector::Zero(m);
    av_ = Vector::Zero(m);
  }

  /// Switches to a segment; returns coefficients of p = a + alpha b and A p.
  void visit(const ArcSegment &seg, Vector &a, Vector &b, Vector &image_a, Vector &image_b) {
    const Vector &s = arc_.start();
    const Vector &d = arc_.direction();
    const Vector &w = arc_.weights();
    if (seg.interior) {
      if (!full_) {
        full_as_ = p_.op->apply(s);
        full_ad_ = p_.op->apply(d);
        full_ = true;
      }
      a = s;
      b = d;
      image_a = full_as_;
      image_b = full_ad_;
      return;
    }
    std::vector<std::int8_t> target(static_cast<std::size_t>(n_), 0);
    for (std::size_t k = 0; k < seg.support.size(); ++k)
      target[static_cast<std::size_t>(seg.support[k])] = seg.signs[k];
    if (++updates_ >= kResidualRefresh) {
      rebuild(target);
    } else {
      for (Index i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (sign_[ui] == target[ui])
          continue;
        if (sign_[ui] != 0)
          add(i, sign_[ui], -1.0);
        if (target[ui] != 0)
          add(i, target[ui], 1.0);
        sign_[ui] = target[ui];
      }
    }
    const double lam0 = seg.lambda_anchor - seg.lambda_slope * seg.anchor;
    a = Vector::Zero(n_);
    b = Vector::Zero(n_);
    for (std::size_t k = 0; k < seg.support.size(); ++k) {
      const Index i = seg.support[k];
      a[i] = s[i] - lam0 * seg.signs[k] * w[i];
      b[i] = d[i] - seg.lambda_slope * seg.signs[k] * w[i];
    }
    image_a = as_ - lam0 * av_;
    image_b = ad_ - seg.lambda_slope * av_;
  }

  /// Largest deviation of the maintained products from a recomputation.
  double drift() const {
    Vector s_i = Vector::Zero(n_), d_i = Vector::Zero(n_), v_i = Vector::Zero(n_);
    for (Index i = 0; i < n_; ++i) {
      const int sg = sign_[static_cast<std::size_t>(i)];
      if (!sg)
        continue;
      s_i[i] = arc_.start()[i];
      d_i[i] = arc_.direction()[i];
      v_i[i] = sg * arc_.weights()[i];
    }
    return std::max({(p_.op->apply(s_i) - as_).norm(), (p_.op->apply(d_i) - ad_).norm(),
                     (p_.op->apply(v_i) - av_).norm()});
  }

private:
  void add(Index i, int sign, double scale) {
    p_.op->add_column(i, scale * arc_.start()[i], as_);
    p_.op->add_column(i, scale * arc_.direction()[i], ad_);
    p_.op->add_column(i, scale * sign * arc_.weights()[i], av_);
  }

  void rebuild(const std::vector<std::int8_t> &target) {
    sign_ = target;
    Vector s_i = Vector::Zero(n_), d_i = Vector::Zero(n_), v_i = Vector::Zero(n_);
    for (Index i = 0; i < n_; ++i) {
      const int sg = sign_[static_cast<std::size_t>(i)];
      if (!sg)
        continue;
      s_i[i] = arc_.start()[i];
      d_i[i] = arc_.direction()[i];
      v_i[i] = sg * arc_.weights()[i];
    }
    as_ = p_.op->apply(s_i);
    ad_ = p_.op->apply(d_i);
    av_ = p_.op->apply(v_i);
    updates_ = 0;
  }

  const LassoProblem &p_;
  const ProjectionArc &arc_;
  Index n_;
  std::vector<std::int8_t> sign_;
  Vector as_, ad_, av_;
  bool full_ = false;
  Vector full_as_, full_ad_;
  int updates_ = 0;
};

struct SegmentQuadratic {
  double c0 = 0.0, c1 = 0.0, c2 = 0.0; // q(alpha) = c0 + c1 alpha + c2/2 alpha^2
  double value(double al) const { return c0 + al * (c1 + 0.5 * c2 * al); }
  double slope(double al) const { return c1 + c2 * al; }
};

inline SegmentQuadratic segment_quadratic(const LassoProblem &p, const Vector &a, const Vector &b,
                                          const Vector &image_a, const Vector &image_b) {
  const Vector u = image_a - p.b;
  SegmentQuadratic q;
  q.c0 = 0.5 * u.squaredNorm() + 0.5 * p.mu * a.squaredNorm() + p.c.dot(a);
  q.c1 = u.dot(image_b) + p.mu * a.dot(b) + p.c.dot(b);
  q.c2 = image_b.squaredNorm() + p.mu * b.squaredNorm();
  return q;
}

} // namespace detail

/// Minimizes f over the projection arc P(x - alpha t g), alpha >= 0, with
/// t = alpha_bb. The result must pass the nonmonotone Armijo test against the
/// history; otherwise projected backtracking from alpha_bb is used instead.
inline ArcSearchResult trajectory_search(const LassoProblem &p, const Iterate &it, double alpha_bb,
                                         ArcSearchMode mode, const HistoryBuffer &history,
                                         double gamma, double mu_bt) {
  ArcSearchResult out;
  const Vector d = -alpha_bb * it.g;
  const ProjectionArc arc = enumerate_arc(it.x, d, p.w, p.tau);
  detail::ArcImage image(p, arc);

  double best_alpha = 0.0, best_f = std::numeric_limits<double>::infinity();
  Vector a, b, ia, ib;
  for (const ArcSegment &seg : arc.segments()) {
    ++out.segments;
    image.visit(seg, a, b, ia, ib);
    const detail::SegmentQuadratic q = detail::segment_quadratic(p, a, b, ia, ib);
    const double lo = seg.begin;
    const double hi = seg.end;
    double al = lo;
    if (q.c2 > 0.0)
      al = std::clamp(-q.c1 / q.c2, lo, hi);
    else if (q.slope(lo) < 0.0)
      al = hi;
    if (!std::isfinite(al))
      al = lo; // a flat unbounded tail keeps the segment start
    const double fv = q.value(al);
    if (fv < best_f) {
      best_f = fv;
      best_alpha = al;
    }
    if (mode == ArcSearchMode::first_local) {
      // stop once the objective is no longer decreasing at the segment end
      const bool decreasing_at_end = std::isfinite(hi) && q.slope(hi) < 0.0;
      if (!decreasing_at_end)
        break;
    }
  }

  if (best_alpha > 0.0) {
    const Vector x = arc.point(best_alpha);
    const Vector step = x - it.x;
    if (step.lpNorm<Eigen::Infinity>() > 0.0) {
      Iterate cand = evaluate(p, x);
      if (cand.f <= history.max() + gamma * it.g.dot(step)) {
        out.step.next = std::move(cand);
        out.step.alpha = best_alpha * alpha_bb;
        out.step.trials = 1;
        out.step.accepted = true;
        out.used_arc = true;
        return out;
      }
    }
  }
  out.step = nonmonotone_armijo_backtrack(p, it, alpha_bb, history, gamma, mu_bt);
  return out;
}

} // namespace lassokit
