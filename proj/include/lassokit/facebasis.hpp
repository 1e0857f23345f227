#pragma once

// Implicit orthonormal basis for the difference hull of a face of the weighted
// one-norm ball. Products with the basis and its transpose cost O(n).

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lassokit/ball.hpp"
#include "lassokit/error.hpp"

namespace lassokit {

/// Orthonormal basis Phi = I_I * diag(sgn(x_I)) * Q of the face's difference hull.
///
/// The face with support I = {i_0 < ... < i_k} is the convex hull of the
/// vertices sgn_j * tau / w_{i_j} * e_{i_j}. Q is the Q factor of the vertex
/// difference matrix, kept in factored form through the sweep coefficients
/// (gamma, mu, u) of the Gram-Schmidt recurrence. The support order is
/// ascending index order.
///
/// The whole ball (interior points) uses Phi = I.
class FaceBasis {
public:
  static FaceBasis whole_space(Index n) {
    FaceBasis b;
    b.identity_ = true;
    b.ambient_ = n;
    return b;
  }

  /// Builds the coefficient sequences for a proper face with at least two
  /// support entries. Vertices have no difference hull.
  static FaceBasis for_face(const FaceId &face, const Vector &w) {
    if (face.is_interior())
      return whole_space(w.size());
    detail::check_dim("face basis weights", static_cast<long>(face.signs.size()), w.size());
    FaceBasis b;
    b.ambient_ = w.size();
    for (std::size_t i = 0; i < face.signs.size(); ++i) {
      if (face.signs[i] != 0) {
        b.support_.push_back(static_cast<Index>(i));
        b.signs_.push_back(face.signs[i]);
      }
    }
    const std::size_t p = b.support_.size();
    if (p < 2)
      throw DomainError("basis undefined for vertices");

    b.inv_w_.resize(p);
    for (std::size_t j = 0; j < p; ++j)
      b.inv_w_[j] = 1.0 / w[b.support_[j]];

    const std::size_t k = p - 1;
    b.inv_sqrt_gamma_.resize(k);
    b.mu_.resize(k);
    b.u_.resize(p);
    double alpha = b.inv_w_[0] * b.inv_w_[0];
    b.u_[0] = -1.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double wn2 = b.inv_w_[j + 1] * b.inv_w_[j + 1];
      const double gamma = alpha + wn2;
      if (!(gamma > 1e-300))
        throw DomainError("face basis sweep produced a vanishing column norm");
      b.inv_sqrt_gamma_[j] = 1.0 / std::sqrt(gamma);
      b.mu_[j] = wn2 / gamma;
      b.u_[j + 1] = -alpha / gamma;
      alpha *= b.mu_[j];
    }
    return b;
  }

  bool is_identity() const { return identity_; }
  Index ambient_dim() const { return ambient_; }
  Index reduced_dim() const {
    return identity_ ? ambient_ : static_cast<Index>(support_.size()) - 1;
  }
  const std::vector<Index> &support() const { return support_; }

  /// y = Phi v, supported on the face support.
  Vector apply(const Vector &v) const {
    detail::check_dim("reduced coefficient length", reduced_dim(), v.size());
    if (identity_)
      return v;
    Vector y = Vector::Zero(ambient_);
    const std::size_t k = support_.size() - 1;
    // Backward sweep: t_i = s_i + mu_i t_{i+1}, y_i = w_i (s_{i-1} + u_i t_i).
    double t = 0.0;
    double s_next = v[static_cast<Index>(k - 1)] * inv_sqrt_gamma_[k - 1];
    put(y, k, inv_w_[k] * s_next);
    for (std::size_t i = k; i-- > 0;) {
      const double s_i = s_next;
      t = s_i + mu_[i] * t;
      s_next = i > 0 ? v[static_cast<Index>(i - 1)] * inv_sqrt_gamma_[i - 1] : 0.0;
      put(y, i, inv_w_[i] * (s_next + u_[i] * t));
    }
    return y;
  }

  /// y = Phi^T v.
  Vector apply_adjoint(const Vector &v) const {
    detail::check_dim("ambient vector length", ambient_, v.size());
    if (identity_)
      return v;
    const std::size_t k = support_.size() - 1;
    Vector y(static_cast<Index>(k));
    // Forward sweep: r_j = mu_{j-1} r_{j-1} + w_j u_j v_j.
    double r = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      r = (j > 0 ? mu_[j - 1] * r : 0.0) + inv_w_[j] * u_[j] * get(v, j);
      y[static_cast<Index>(j)] = (inv_w_[j + 1] * get(v, j + 1) + r) * inv_sqrt_gamma_[j];
    }
    return y;
  }

  /// anchor + Phi c.
  Vector embed(const Vector &anchor, const Vector &c) const {
    detail::check_dim("anchor length", ambient_, anchor.size());
    return anchor + apply(c);
  }

  /// Dense n-by-k copy of Phi, built column by column.
  Eigen::MatrixXd materialize() const {
    const Index k = reduced_dim();
    Eigen::MatrixXd phi(ambient_, k);
    for (Index j = 0; j < k; ++j)
      phi.col(j) = apply(Vector::Unit(k, j));
    return phi;
  }

private:
  void put(Vector &y, std::size_t local, double value) const {
    y[support_[local]] = signs_[local] * value;
  }
  double get(const Vector &v, std::size_t local) const {
    return signs_[local] * v[support_[local]];
  }

  bool identity_ = false;
  Index ambient_ = 0;
  std::vector<Index> support_;
  std::vector<std::int8_t> signs_;
  std::vector<double> inv_w_;          // vertex scales 1 / w_i on the support
  std::vector<double> inv_sqrt_gamma_; // 1 / sqrt(gamma_j), j < k
  std::vector<double> mu_;             // w_{j+1}^2 / gamma_j
  std::vector<double> u_;              // u_0 = -1, u_{j+1} = -alpha_j / gamma_j
};

inline FaceBasis basis_init(const FaceId &face, const Vector &w) {
  if (face.is_interior())
    throw DomainError("basis_init expects a proper face; use FaceBasis::whole_space");
  return FaceBasis::for_face(face, w);
}

inline Vector apply_basis(const FaceBasis &b, const Vector &v) { return b.apply(v); }
inline Vector apply_basis_adjoint(const FaceBasis &b, const Vector &v) {
  return b.apply_adjoint(v);
}
inline Vector embed_face_point(const FaceBasis &b, const Vector &anchor, const Vector &c) {
  return b.embed(anchor, c);
}

} // namespace lassokit
