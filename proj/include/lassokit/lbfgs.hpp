#pragma once

// Limited-memory BFGS inverse-Hessian model in reduced face coordinates.

#include <cmath>
#include <deque>
#include <vector>

#include "lassokit/ball.hpp"

namespace lassokit {

inline constexpr double kCurvatureEps = 1e-12;

struct LbfgsModel {
  int memory = 8;
  double h0 = 1.0;
  std::deque<Vector> s;
  std::deque<Vector> y;
  std::deque<double> rho; // 1 / s'y

  LbfgsModel() = default;
  LbfgsModel(int mem, double scale) : memory(mem), h0(scale) {}

  std::size_t size() const { return s.size(); }
  bool empty() const { return s.empty(); }
};

/// Appends (s, y) when s'y > eps ||s|| ||y||, evicting the oldest pair at
/// capacity. Returns whether the pair was stored.
inline bool lbfgs_update(LbfgsModel &model, const Vector &s, const Vector &y) {
  const double sy = s.dot(y);
  if (!(sy > kCurvatureEps * s.norm() * y.norm()))
    return false;
  model.s.push_back(s);
  model.y.push_back(y);
  model.rho.push_back(1.0 / sy);
  while (model.s.size() > static_cast<std::size_t>(std::max(model.memory, 1))) {
    model.s.pop_front();
    model.y.pop_front();
    model.rho.pop_front();
  }
  return true;
}

/// -H g by the two-loop recursion with H_0 = h0 I.
inline Vector lbfgs_direction(const LbfgsModel &model, const Vector &g) {
  const std::size_t k = model.size();
  std::vector<double> a(k);
  Vector q = g;
  for (std::size_t j = k; j-- > 0;) {
    a[j] = model.rho[j] * model.s[j].dot(q);
    q -= a[j] * model.y[j];
  }
  Vector r = model.h0 * q;
  for (std::size_t j = 0; j < k; ++j) {
    const double beta = model.rho[j] * model.y[j].dot(r);
    r += (a[j] - beta) * model.s[j];
  }
  return -r;
}

} // namespace lassokit
