#pragma once

// Geometry of the weighted one-norm ball {x : sum_i w_i |x_i| <= tau}.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "lassokit/error.hpp"

namespace lassokit {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Relative slack used to decide whether a point sits on the boundary.
inline constexpr double kFeasTol = 1e-9;
/// Absolute slack for the two self-projection cone inequalities.
inline constexpr double kConeSlack = 1e-12;

inline double weighted_l1(const Vector &x, const Vector &w) {
  return (w.array() * x.array().abs()).sum();
}

/// max_i |z_i| / w_i, the dual norm of the weighted one-norm.
inline double weighted_dual_norm(const Vector &z, const Vector &w) {
  if (z.size() == 0)
    return 0.0;
  return (z.array().abs() / w.array()).maxCoeff();
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

/// Face of the ball containing a point in its relative interior.
///
/// Interior points belong to the ball itself; boundary points are described by
/// their sign pattern. A ball of radius zero has a single proper face with an
/// empty support.
struct FaceId {
  enum class Kind { interior, proper };

  Kind kind = Kind::interior;
  std::vector<std::int8_t> signs; // empty for interior faces

  static FaceId interior() { return {}; }

  static FaceId from_signs(std::vector<std::int8_t> s) {
    FaceId f;
    f.kind = Kind::proper;
    f.signs = std::move(s);
    return f;
  }

  bool is_interior() const { return kind == Kind::interior; }

  std::vector<Index> support() const {
    std::vector<Index> idx;
    for (std::size_t i = 0; i < signs.size(); ++i)
      if (signs[i] != 0)
        idx.push_back(static_cast<Index>(i));
    return idx;
  }

  std::size_t support_size() const {
    return static_cast<std::size_t>(
        std::count_if(signs.begin(), signs.end(), [](auto s) { return s != 0; }));
  }

  /// Dimension of the face; -1 marks the interior (full dimension).
  long dimension() const {
    if (is_interior())
      return -1;
    return static_cast<long>(support_size()) - 1;
  }

  bool is_vertex() const { return !is_interior() && support_size() == 1; }

  friend bool operator==(const FaceId &a, const FaceId &b) {
    return a.kind == b.kind && a.signs == b.signs;
  }
  friend bool operator!=(const FaceId &a, const FaceId &b) { return !(a == b); }
};

struct ProxResult {
  Vector x;
  double lambda = 0.0;
};

inline void check_weights(const Vector &w) {
  for (Index i = 0; i < w.size(); ++i)
    if (!(w[i] > 0.0) || !std::isfinite(w[i]))
      throw DomainError("weights must be finite and strictly positive");
}

/// Soft threshold sign(u) * [|u| - lambda w]_+.
inline Vector prox_weighted_l1(const Vector &u, double lambda, const Vector &w) {
  detail::check_dim("prox weights", u.size(), w.size());
  if (lambda < 0.0)
    throw DomainError("prox threshold must be nonnegative");
  Vector out(u.size());
  for (Index i = 0; i < u.size(); ++i) {
    const double mag = std::abs(u[i]) - lambda * w[i];
    out[i] = mag > 0.0 ? std::copysign(mag, u[i]) : 0.0;
  }
  return out;
}

/// Smallest threshold lambda >= 0 with ||prox(u, lambda)||_{w,1} <= tau.
///
/// Sorts the break points |u_i|/w_i in decreasing order and walks them while
/// accumulating the linear pieces of the thresholded norm.
inline double projection_threshold(const Vector &u, const Vector &w, double tau) {
  const Index n = u.size();
  if (weighted_l1(u, w) <= tau)
    return 0.0;
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::vector<double> ratio(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    ratio[static_cast<std::size_t>(i)] = std::abs(u[i]) / w[i];
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    return ratio[static_cast<std::size_t>(a)] > ratio[static_cast<std::size_t>(b)];
  });
  if (tau <= 0.0)
    return ratio[static_cast<std::size_t>(order.front())];

  // On (ratio_[k+1], ratio_[k]] the norm equals sum_a - lambda * sum_b.
  double sum_a = 0.0, sum_b = 0.0;
  double lambda = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Index i = order[k];
    sum_a += w[i] * std::abs(u[i]);
    sum_b += w[i] * w[i];
    lambda = (sum_a - tau) / sum_b;
    const double next = k + 1 < order.size() ? ratio[static_cast<std::size_t>(order[k + 1])] : 0.0;
    if (lambda >= next)
      break;
  }
  return std::max(lambda, 0.0);
}

/// Euclidean projection onto the weighted one-norm ball, O(n log n).
inline ProxResult project(const Vector &u, const Vector &w, double tau) {
  detail::check_dim("projection weights", u.size(), w.size());
  if (tau < 0.0)
    throw DomainError("ball radius must be nonnegative");
  if (weighted_l1(u, w) <= tau)
    return {u, 0.0};
  const double lambda = projection_threshold(u, w, tau);
  return {prox_weighted_l1(u, lambda, w), lambda};
}

inline bool on_boundary(double norm, double tau) { return norm >= tau * (1.0 - kFeasTol); }

/// Face classification without the feasibility check; points outside the
/// ball are labelled by their sign pattern.
inline FaceId classify_face(const Vector &x, const Vector &w, double tau) {
  const double norm = weighted_l1(x, w);
  if (!on_boundary(norm, tau))
    return FaceId::interior();
  std::vector<std::int8_t> s(static_cast<std::size_t>(x.size()));
  for (Index i = 0; i < x.size(); ++i)
    s[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sign_of(x[i]));
  return FaceId::from_signs(std::move(s));
}

/// Face of the ball containing x. Throws if x is infeasible beyond kFeasTol.
inline FaceId face_of(const Vector &x, const Vector &w, double tau) {
  detail::check_dim("face weights", x.size(), w.size());
  if (weighted_l1(x, w) > tau * (1.0 + kFeasTol))
    throw DomainError("point lies outside the weighted one-norm ball");
  return classify_face(x, w, tau);
}

/// The two quantities of the self-projection cone test at a boundary point.
struct ConeMargins {
  double norm_rate = 0.0;    // sum_I sgn(x_i) d_i w_i + sum_{not I} |d_i| w_i
  double support_slack = 0.0; // lambda rate minus max_{not I} |d_i| / w_i
};

inline ConeMargins cone_margins(const FaceId &face, const Vector &d, const Vector &w) {
  ConeMargins m;
  double support_rate = 0.0, support_w2 = 0.0, max_off = 0.0;
  for (Index i = 0; i < d.size(); ++i) {
    const int s = face.signs[static_cast<std::size_t>(i)];
    if (s != 0) {
      support_rate += w[i] * s * d[i];
      support_w2 += w[i] * w[i];
    } else {
      m.norm_rate += std::abs(d[i]) * w[i];
      max_off = std::max(max_off, std::abs(d[i]) / w[i]);
    }
  }
  m.norm_rate += support_rate;
  const double lambda_rate = support_w2 > 0.0 ? support_rate / support_w2 : 0.0;
  m.support_slack = lambda_rate - max_off;
  return m;
}

/// True when projecting x + eps*d lands back on the face of x for small eps.
/// Boundary-equality cases count as outside the cone.
inline bool in_self_projection_cone(const Vector &x, const Vector &d, const Vector &w,
                                    double tau) {
  detail::check_dim("cone direction", x.size(), d.size());
  const FaceId face = face_of(x, w, tau);
  if (face.is_interior())
    return true;
  const ConeMargins m = cone_margins(face, d, w);
  return m.norm_rate > kConeSlack && m.support_slack > kConeSlack;
}

/// First alpha > 0 at which ||x + alpha d||_{w,1} reaches tau from below,
/// or +inf. Zero crossings are sorted once and the slope of the norm is
/// updated as each coordinate changes sign.
inline double first_boundary_hit(const Vector &x, const Vector &d, const Vector &w,
                                 double tau) {
  const Index n = x.size();
  double kappa = weighted_l1(x, w);
  double rho = 0.0;
  std::vector<std::pair<double, Index>> crossings;
  for (Index i = 0; i < n; ++i) {
    if (d[i] == 0.0)
      continue;
    if (x[i] * d[i] < 0.0) {
      rho -= w[i] * std::abs(d[i]);
      crossings.emplace_back(-x[i] / d[i], i);
    } else {
      rho += w[i] * std::abs(d[i]);
    }
  }
  std::sort(crossings.begin(), crossings.end());
  double alpha = 0.0;
  for (const auto &[t, j] : crossings) {
    if (rho > 0.0) {
      const double hit = alpha + std::max(tau - kappa, 0.0) / rho;
      if (hit <= t)
        return hit;
    }
    kappa += rho * (t - alpha);
    alpha = t;
    rho += 2.0 * w[j] * std::abs(d[j]);
  }
  if (rho > 0.0)
    return alpha + std::max(tau - kappa, 0.0) / rho;
  return std::numeric_limits<double>::infinity();
}

/// Largest step keeping x + alpha d on the closure of the face of x.
///
/// Interior points and norm-decreasing directions are bounded by the next
/// boundary intersection; along a proper face the first coordinate of the
/// support to reach zero ends the face.
inline double max_step_on_face(const Vector &x, const Vector &d, const Vector &w,
                               double tau) {
  detail::check_dim("face step direction", x.size(), d.size());
  const FaceId face = face_of(x, w, tau);
  if (face.is_interior())
    return first_boundary_hit(x, d, w, tau);
  const ConeMargins m = cone_margins(face, d, w);
  const double scale = d.lpNorm<Eigen::Infinity>() * w.maxCoeff();
  if (m.norm_rate < -1e-12 * std::max(scale, 1.0))
    return first_boundary_hit(x, d, w, tau);
  double step = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < x.size(); ++i)
    if (x[i] * d[i] < 0.0)
      step = std::min(step, -x[i] / d[i]);
  return step;
}

} // namespace lassokit
