#pragma once

// Piecewise-linear projection arc p(alpha) = P(s + alpha d) onto the weighted
// one-norm ball.
//
// The enumerator walks the ray alpha >= 0 event by event. Between events the
// projection either equals s + alpha d (inside the ball) or soft-thresholds it
// on a fixed support with a threshold lambda(alpha) that is affine in alpha.
// Events are zero crossings of coordinates, removals from and additions to the
// support, and crossings of the ball boundary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include "lassokit/ball.hpp"
#include "lassokit/error.hpp"
#include "lassokit/rng.hpp"

namespace lassokit {

enum class ArcEventKind { zero_cross, support_remove, support_add, boundary_cross };

inline const char *to_string(ArcEventKind k) {
  switch (k) {
  case ArcEventKind::zero_cross: return "zero_cross";
  case ArcEventKind::support_remove: return "support_remove";
  case ArcEventKind::support_add: return "support_add";
  case ArcEventKind::boundary_cross: return "boundary_cross";
  }
  return "?";
}

/// One breakpoint (or zero-crossing bookkeeping point) of the arc.
///
/// When several things happen at the same alpha they are merged into a single
/// event whose kind is the last one in the order
/// zero_cross < support_remove < support_add < boundary_cross.
struct ArcEvent {
  double alpha = 0.0;
  ArcEventKind kind = ArcEventKind::zero_cross;
  std::vector<Index> indices;
  double lambda_after = 0.0; // threshold at the event
  double kappa_after = 0.0;  // ||s + alpha d||_{w,1}
  double rho_after = 0.0;    // slope of kappa just after the event
  double mu_after = 0.0;     // slope of lambda on the next segment

  bool changes_face() const { return kind != ArcEventKind::zero_cross; }
};

/// A maximal alpha interval on which the projection stays on one face.
struct ArcSegment {
  double begin = 0.0;
  double end = std::numeric_limits<double>::infinity();
  bool interior = false; // lambda == 0 and p(alpha) = s + alpha d
  std::vector<Index> support;
  std::vector<std::int8_t> signs; // signs on the support
  double anchor = 0.0; // lambda(anchor) = lambda_anchor
  double lambda_anchor = 0.0;
  double lambda_slope = 0.0;

  double lambda(double alpha) const {
    return interior ? 0.0 : lambda_anchor + lambda_slope * (alpha - anchor);
  }

  bool same_face(const ArcSegment &o) const {
    return interior == o.interior && (interior || (support == o.support && signs == o.signs));
  }
};

namespace detail {

struct ArcCursor {
  bool outside = false;
  std::vector<char> in_support;
  std::vector<std::int8_t> sign;
  double lambda = 0.0;
  double mu = 0.0;
};

inline double slope_of_magnitude(double x, double d, double zero_tol) {
  if (std::abs(x) <= zero_tol)
    return std::abs(d);
  return x > 0.0 ? d : -d;
}

} // namespace detail

/// Selects which staged candidates J join the support I.
///
/// Returns the unique subset I' of I u J (containing I) such that j in J is in
/// I' exactly when r_j > w_j mu', mu' = sum_{I'} w r / sum_{I'} w^2.
/// Candidates are taken in decreasing order of r_j / w_j; when I is empty the
/// first candidate always enters.
inline std::vector<Index> support_addition_filter(const std::vector<Index> &support,
                                                  std::vector<Index> candidates, const Vector &r,
                                                  const Vector &w) {
  double a = 0.0, b = 0.0;
  for (Index i : support) {
    a += w[i] * r[i];
    b += w[i] * w[i];
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Index x, Index y) { return r[x] / w[x] > r[y] / w[y]; });
  std::vector<Index> out = support;
  for (Index j : candidates) {
    const double aj = w[j] * r[j];
    const double bj = w[j] * w[j];
    // a_j / b_j > a / b  <=>  a_j b > a b_j  (b, b_j > 0)
    if (b > 0.0 && !(aj * b > a * bj))
      break;
    a += aj;
    b += bj;
    out.push_back(j);
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Enumerated projection arc of the ray s + alpha d, alpha >= 0, or of the full
/// line when built with enumerate_line.
class ProjectionArc {
public:
  ProjectionArc() = default;
  ProjectionArc(Vector s, Vector d, Vector w, double tau, std::vector<ArcSegment> segments,
                std::vector<ArcEvent> events)
      : s_(std::move(s)), d_(std::move(d)), w_(std::move(w)), tau_(tau),
        segments_(std::move(segments)), events_(std::move(events)) {}

  const std::vector<ArcSegment> &segments() const { return segments_; }
  const std::vector<ArcEvent> &events() const { return events_; }
  const Vector &start() const { return s_; }
  const Vector &direction() const { return d_; }
  const Vector &weights() const { return w_; }
  double radius() const { return tau_; }

  double first_alpha() const { return segments_.front().begin; }

  /// Number of face changes along the arc.
  std::size_t breakpoint_count() const { return segments_.empty() ? 0 : segments_.size() - 1; }

  const ArcSegment &segment_at(double alpha) const {
    if (segments_.empty() || alpha < segments_.front().begin)
      throw DomainError("alpha lies before the start of the arc");
    auto it = std::upper_bound(segments_.begin(), segments_.end(), alpha,
                               [](double a, const ArcSegment &s) { return a < s.begin; });
    return *(it - 1);
  }

  double lambda(double alpha) const { return segment_at(alpha).lambda(alpha); }

  /// Closed-form p(alpha) from the segment containing alpha.
  Vector point(double alpha) const { return point_on(segment_at(alpha), alpha); }

  Vector point_on(const ArcSegment &seg, double alpha) const {
    if (seg.interior)
      return s_ + alpha * d_;
    Vector p = Vector::Zero(s_.size());
    const double lam = seg.lambda(alpha);
    for (std::size_t k = 0; k < seg.support.size(); ++k) {
      const Index i = seg.support[k];
      p[i] = s_[i] + alpha * d_[i] - lam * seg.signs[k] * w_[i];
    }
    return p;
  }

private:
  Vector s_, d_, w_;
  double tau_ = 0.0;
  std::vector<ArcSegment> segments_;
  std::vector<ArcEvent> events_;
};

namespace detail {

class ArcWalker {
public:
  ArcWalker(const Vector &s, const Vector &d, const Vector &w, double tau)
      : s_(s), d_(d), w_(w), tau_(tau), n_(s.size()) {
    const double scale =
        std::max({1.0, s.lpNorm<Eigen::Infinity>(), n_ ? tau / w.minCoeff() : 0.0});
    zero_tol_ = 1e-13 * scale;
    tie_tol_ = 1e-11 * scale;
    rate_scale_ = n_ ? (d.array().abs() / w.array()).maxCoeff() : 0.0;
    norm_rate_scale_ = (d.array().abs() * w.array()).sum();
  }

  ProjectionArc run() {
    std::vector<ArcSegment> segments;
    std::vector<ArcEvent> events;

    double alpha = 0.0;
    Vector x = s_;
    const double kappa0 = weighted_l1(x, w_);
    double lambda0 = kappa0 > tau_ ? projection_threshold(x, w_, tau_) : 0.0;
    ArcCursor cur = resolve(x, lambda0, kappa0, {});
    segments.push_back(open_segment(cur, alpha));

    const std::size_t cap = 8 * static_cast<std::size_t>(n_) + 16;
    for (std::size_t step = 0; step < cap; ++step) {
      Candidate next = next_event(x, cur);
      if (!std::isfinite(next.delta))
        break;
      const double delta = std::max(next.delta, 0.0);
      const double alpha_e = alpha + delta;
      Vector xe = s_ + alpha_e * d_;
      const double kappa_e = weighted_l1(xe, w_);

      double lambda_e = 0.0;
      if (cur.outside && !next.lambda_zero) {
        double num = -tau_, den = 0.0;
        for (Index i = 0; i < n_; ++i) {
          if (!cur.in_support[static_cast<std::size_t>(i)])
            continue;
          num += w_[i] * cur.sign[static_cast<std::size_t>(i)] * xe[i];
          den += w_[i] * w_[i];
        }
        lambda_e = std::max(num / den, 0.0);
      }
      for (Index j : next.zeroed)
        xe[j] = 0.0;

      ArcCursor after = resolve(xe, lambda_e, kappa_e, next.indices);
      ArcEvent ev = classify(cur, after, next, alpha_e);
      ev.lambda_after = lambda_e;
      ev.kappa_after = kappa_e;
      ev.rho_after = kappa_slope(xe);
      ev.mu_after = after.outside ? after.mu : 0.0;

      if (ev.changes_face()) {
        segments.back().end = alpha_e;
        segments.push_back(open_segment(after, alpha_e, lambda_e));
      }
      if (ev.changes_face() || !next.zeroed.empty())
        events.push_back(std::move(ev));

      alpha = alpha_e;
      x = std::move(xe);
      cur = std::move(after);
      if (step + 1 == cap)
        throw Error("projection arc enumeration did not terminate");
    }
    return ProjectionArc(s_, d_, w_, tau_, std::move(segments), std::move(events));
  }

private:
  struct Candidate {
    double delta = std::numeric_limits<double>::infinity();
    std::vector<Index> indices; // coordinates whose event fires at delta
    std::vector<Index> zeroed;  // coordinates crossing zero at delta
    bool lambda_zero = false;   // threshold reaches zero (entering the ball)
    bool boundary_hit = false;  // norm reaches tau from inside
  };

  double slope(const Vector &x, Index i) const {
    return slope_of_magnitude(x[i], d_[i], zero_tol_);
  }

  double kappa_slope(const Vector &x) const {
    double rho = 0.0;
    for (Index i = 0; i < n_; ++i)
      rho += w_[i] * slope(x, i);
    return rho;
  }

  /// State on the segment starting at x with threshold lambda.
  ArcCursor resolve(const Vector &x, double lambda, double kappa,
                    const std::vector<Index> &forced) const {
    ArcCursor c;
    c.in_support.assign(static_cast<std::size_t>(n_), 0);
    c.sign.assign(static_cast<std::size_t>(n_), 0);
    const bool at_boundary = lambda > 0.0 || kappa >= tau_ - tie_tol_ * std::max(1.0, w_.maxCoeff());
    if (!at_boundary) {
      c.outside = false;
      return c;
    }

    Vector r(n_);
    for (Index i = 0; i < n_; ++i)
      r[i] = slope(x, i);

    std::vector<char> is_forced(static_cast<std::size_t>(n_), 0);
    for (Index j : forced)
      is_forced[static_cast<std::size_t>(j)] = 1;

    std::vector<Index> strict, tied;
    for (Index i = 0; i < n_; ++i) {
      const double gap = std::abs(x[i]) - w_[i] * lambda;
      if (is_forced[static_cast<std::size_t>(i)] || std::abs(gap) <= tie_tol_)
        tied.push_back(i);
      else if (gap > 0.0)
        strict.push_back(i);
    }
    double a = 0.0, b = 0.0;
    for (Index i : strict) {
      a += w_[i] * r[i];
      b += w_[i] * w_[i];
    }
    std::vector<Index> staged;
    for (Index j : tied)
      if (b == 0.0 || w_[j] * r[j] * b > a * w_[j] * w_[j])
        staged.push_back(j);
    std::vector<Index> support = support_addition_filter(strict, staged, r, w_);

    double a2 = 0.0, b2 = 0.0;
    for (Index i : support) {
      a2 += w_[i] * r[i];
      b2 += w_[i] * w_[i];
    }
    const double mu = b2 > 0.0 ? a2 / b2 : 0.0;
    if (lambda <= 0.0 && !(mu > 0.0)) {
      c.outside = false;
      return c;
    }
    c.outside = true;
    c.lambda = lambda;
    c.mu = mu;
    for (Index i : support) {
      c.in_support[static_cast<std::size_t>(i)] = 1;
      int sg = sign_of(x[i]);
      if (sg == 0)
        sg = d_[i] > 0.0 ? 1 : -1;
      c.sign[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sg);
    }
    return c;
  }

  Candidate next_event(const Vector &x, const ArcCursor &c) const {
    Candidate best;
    std::vector<std::pair<double, Index>> fired; // (delta, index) with index -1 for global events
    auto offer = [&](double delta, Index idx) {
      if (!(delta >= 0.0) || !std::isfinite(delta))
        return;
      fired.emplace_back(delta, idx);
    };

    if (c.outside) {
      for (Index i = 0; i < n_; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double ri = slope(x, i);
        if (c.in_support[ui]) {
          const double den = w_[i] * c.mu - ri;
          if (den > kRateTol * (std::abs(ri) + w_[i] * std::abs(c.mu)))
            offer(std::max(std::abs(x[i]) - w_[i] * c.lambda, 0.0) / den, i);
        } else {
          const double den = ri - w_[i] * c.mu;
          if (den > kRateTol * (std::abs(ri) + w_[i] * std::abs(c.mu)))
            offer(std::max(w_[i] * c.lambda - std::abs(x[i]), 0.0) / den, i);
          if (std::abs(x[i]) > zero_tol_ && x[i] * d_[i] < 0.0)
            offer(-x[i] / d_[i], i);
        }
      }
      if (c.mu < -kRateTol * rate_scale_)
        offer(-c.lambda / c.mu, -1);
    } else {
      for (Index i = 0; i < n_; ++i)
        if (std::abs(x[i]) > zero_tol_ && x[i] * d_[i] < 0.0)
          offer(-x[i] / d_[i], i);
      const double rho = kappa_slope(x);
      if (rho > kRateTol * norm_rate_scale_)
        offer(std::max(tau_ - weighted_l1(x, w_), 0.0) / rho, -1);
    }
    if (fired.empty())
      return best;

    double dmin = std::numeric_limits<double>::infinity();
    for (const auto &f : fired)
      dmin = std::min(dmin, f.first);
    const double window = 1e-12 * std::max(1.0, dmin);
    best.delta = dmin;
    for (const auto &[delta, idx] : fired) {
      if (delta > dmin + window)
        continue;
      if (idx < 0) {
        if (c.outside)
          best.lambda_zero = true;
        else
          best.boundary_hit = true;
        continue;
      }
      // A coordinate off the support crossing zero is bookkeeping only.
      const double xi = x[idx];
      const bool crossing = std::abs(xi) > zero_tol_ && xi * d_[idx] < 0.0 &&
                            std::abs(-xi / d_[idx] - delta) <= window;
      if (crossing)
        best.zeroed.push_back(idx);
      else
        best.indices.push_back(idx);
    }
    return best;
  }

  ArcEvent classify(const ArcCursor &before, const ArcCursor &after, const Candidate &cand,
                    double alpha) const {
    ArcEvent ev;
    ev.alpha = alpha;
    ev.kind = ArcEventKind::zero_cross;
    ev.indices = cand.zeroed;
    if (before.outside != after.outside) {
      ev.kind = ArcEventKind::boundary_cross;
      ev.indices.clear();
      return ev;
    }
    if (!after.outside)
      return ev;
    std::vector<Index> removed, added;
    for (Index i = 0; i < n_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (before.in_support[ui] && !after.in_support[ui])
        removed.push_back(i);
      else if (!before.in_support[ui] && after.in_support[ui])
        added.push_back(i);
      else if (before.in_support[ui] && before.sign[ui] != after.sign[ui])
        added.push_back(i);
    }
    if (removed.empty() && added.empty())
      return ev;
    ev.kind = added.empty() ? ArcEventKind::support_remove : ArcEventKind::support_add;
    ev.indices = removed;
    ev.indices.insert(ev.indices.end(), added.begin(), added.end());
    std::sort(ev.indices.begin(), ev.indices.end());
    return ev;
  }

  ArcSegment open_segment(const ArcCursor &c, double alpha, double lambda = -1.0) const {
    ArcSegment seg;
    seg.begin = alpha;
    seg.interior = !c.outside;
    if (c.outside) {
      for (Index i = 0; i < n_; ++i) {
        if (c.in_support[static_cast<std::size_t>(i)]) {
          seg.support.push_back(i);
          seg.signs.push_back(c.sign[static_cast<std::size_t>(i)]);
        }
      }
      seg.anchor = alpha;
      seg.lambda_anchor = lambda >= 0.0 ? lambda : c.lambda;
      seg.lambda_slope = c.mu;
    }
    return seg;
  }

  const Vector &s_;
  const Vector &d_;
  const Vector &w_;
  double tau_;
  Index n_;
  // Rate differences below this relative size are rounding noise and would
  // schedule spurious events far along the ray.
  static constexpr double kRateTol = 1e-12;

  double zero_tol_ = 0.0;
  double tie_tol_ = 0.0;
  double rate_scale_ = 0.0;
  double norm_rate_scale_ = 0.0;
};

} // namespace detail

/// Segments and events of P(s + alpha d) for alpha >= 0. At most 4n - 1
/// segments; the last one is unbounded.
inline ProjectionArc enumerate_arc(const Vector &s, const Vector &d, const Vector &w, double tau) {
  detail::check_dim("arc direction", s.size(), d.size());
  detail::check_dim("arc weights", s.size(), w.size());
  check_weights(w);
  if (tau < 0.0)
    throw DomainError("ball radius must be nonnegative");
  return detail::ArcWalker(s, d, w, tau).run();
}

/// Arc of the two-sided line s + alpha d, alpha in R, obtained from the rays
/// in directions d and -d and merged at alpha = 0.
inline ProjectionArc enumerate_line(const Vector &s, const Vector &d, const Vector &w,
                                    double tau) {
  const ProjectionArc fwd = enumerate_arc(s, d, w, tau);
  const ProjectionArc bwd = enumerate_arc(s, -d, w, tau);
  std::vector<ArcSegment> segs;
  for (auto it = bwd.segments().rbegin(); it != bwd.segments().rend(); ++it) {
    ArcSegment m = *it;
    m.begin = -it->end;
    m.end = -it->begin;
    m.anchor = -it->anchor;
    m.lambda_slope = -it->lambda_slope;
    segs.push_back(std::move(m));
  }
  for (const ArcSegment &f : fwd.segments()) {
    if (!segs.empty() && segs.back().end == 0.0 && f.begin == 0.0 && segs.back().same_face(f)) {
      segs.back().end = f.end;
      continue;
    }
    segs.push_back(f);
  }

  std::vector<ArcEvent> events;
  for (auto it = bwd.events().rbegin(); it != bwd.events().rend(); ++it) {
    ArcEvent e = *it;
    e.alpha = -e.alpha;
    e.mu_after = -e.mu_after;
    e.rho_after = -e.rho_after;
    events.push_back(std::move(e));
  }
  events.insert(events.end(), fwd.events().begin(), fwd.events().end());
  return ProjectionArc(s, d, w, tau, std::move(segs), std::move(events));
}

/// Piecewise-linear threshold lambda(alpha) read off an enumerated arc.
inline double lambda_of_alpha(const ProjectionArc &arc, double alpha) {
  if (!std::isfinite(alpha) || arc.segments().empty() || alpha < arc.first_alpha())
    throw DomainError("alpha lies outside the enumerated range");
  return arc.lambda(alpha);
}

/// A line instance (s, d, w, tau).
struct ArcInstance {
  Vector s;
  Vector d;
  Vector w;
  double tau = 0.0;
};

namespace detail {

/// Curve |x_i(alpha)| / w_i = slope * |alpha - zero| realised with weight w.
inline void set_curve(ArcInstance &inst, Index i, double zero, double slope, double weight) {
  inst.w[i] = weight;
  inst.d[i] = weight * slope;
  inst.s[i] = -weight * slope * zero;
}

/// Radius for the four-curve layout. Radii in roughly [0.948, 1.054] give the
/// maximal count; this sits near the middle.
inline constexpr double kFourCurveRadius = 1.0;

inline double norm_at(const ArcInstance &inst, double alpha) {
  return weighted_l1(inst.s + alpha * inst.d, inst.w);
}

} // namespace detail

/// Line instances whose projection onto the ball changes face exactly 4n - 2
/// times over alpha in R.
///
/// n = 1 is a scalar clamp, n = 2 uses the weighted two-curve layout, n = 3 and
/// n = 4 use fixed unit-weight parameters and n >= 5 builds two outer curves,
/// two bundles and a central curve on the unit-weight ball. Bundle positions
/// are drawn from `seed`.
inline ArcInstance extremal_construction(int n, std::uint64_t seed = 1) {
  if (n < 1)
    throw DomainError("dimension must be positive");
  ArcInstance inst{Vector::Zero(n), Vector::Zero(n), Vector::Ones(n), 0.0};
  SplitMix64 rng(seed);

  if (n == 1) {
    detail::set_curve(inst, 0, 0.0, 1.0, 1.0);
    inst.tau = 1.0;
    return inst;
  }
  if (n == 2) {
    const double omega = std::sqrt(2.0 * n + 5.0);
    detail::set_curve(inst, 0, 0.0, 1.0, omega);
    detail::set_curve(inst, 1, 3.0, 4.0, 1.0);
    inst.tau = detail::norm_at(inst, 1.0);
    return inst;
  }
  if (n == 3) {
    const double slope[] = {1.0, 0.5, 1.0 - 1e-3};
    const double zero[] = {-4.0, 0.0, 4.0};
    for (Index i = 0; i < 3; ++i)
      detail::set_curve(inst, i, zero[i], slope[i], 1.0);
    inst.tau = detail::norm_at(inst, 3.0);
    return inst;
  }
  if (n == 4) {
    const double slope[] = {1.02, 0.52, 0.80, 1.01};
    const double zero[] = {0.00, 0.21, 0.44, 0.86};
    for (Index i = 0; i < 4; ++i)
      detail::set_curve(inst, i, zero[i], slope[i], 1.0);
    inst.tau = detail::kFourCurveRadius;
    return inst;
  }

  const double beta = 0.5;
  const double mu1 = 10.0 * beta;
  const double mu2 = mu1 + 2.0 * beta;
  const double delta = beta / n;
  const double sigma = delta / 2.0;
  const double eps = std::min(delta / (2.0 * mu1), 1.0 / 8.0);
  const int k1 = (n - 3) / 2;
  const int k2 = (n - 3) - k1;

  Index i = 0;
  detail::set_curve(inst, i++, -mu2, 4.0, 1.0);
  detail::set_curve(inst, i++, mu2, 4.0 - eps, 1.0);
  for (int k = 0; k < k1; ++k)
    detail::set_curve(inst, i++, -mu1 + rng.uniform(-sigma, sigma), 2.0, 1.0);
  for (int k = 0; k < k2; ++k)
    detail::set_curve(inst, i++, mu1 + rng.uniform(-sigma, sigma), 2.0 * k1 / k2, 1.0);
  detail::set_curve(inst, i++, 0.0, 1.0, 1.0);
  inst.tau = detail::norm_at(inst, -mu1 + delta);
  return inst;
}

} // namespace lassokit
