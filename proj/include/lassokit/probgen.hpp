#pragma once

// Reproducible test problems: Gaussian or coherent sphere-walk matrices with
// unit columns, sparse ground-truth signals and scaled Gaussian noise.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "lassokit/error.hpp"
#include "lassokit/model.hpp"
#include "lassokit/rng.hpp"

namespace lassokit {

enum class MatrixKind { gaussian, sphere_walk };
enum class SignalDist { pm_one, uniform, gaussian };

inline const char *to_string(MatrixKind k) {
  return k == MatrixKind::gaussian ? "gaussian" : "sphere_walk";
}

inline const char *to_string(SignalDist d) {
  switch (d) {
  case SignalDist::pm_one: return "pm_one";
  case SignalDist::uniform: return "uniform";
  case SignalDist::gaussian: return "gaussian";
  }
  return "?";
}

inline MatrixKind parse_matrix_kind(const std::string &s) {
  if (s == "gaussian")
    return MatrixKind::gaussian;
  if (s == "sphere_walk" || s == "sphere-walk")
    return MatrixKind::sphere_walk;
  throw DomainError("unknown matrix kind '" + s + "'");
}

inline SignalDist parse_signal_dist(const std::string &s) {
  if (s == "pm_one" || s == "pm-one")
    return SignalDist::pm_one;
  if (s == "uniform")
    return SignalDist::uniform;
  if (s == "gaussian")
    return SignalDist::gaussian;
  throw DomainError("unknown signal distribution '" + s + "'");
}

struct GeneratorSpec {
  Index m = 64;
  Index n = 128;
  MatrixKind kind = MatrixKind::gaussian;
  double gamma = 0.1; // sphere walk only
  SignalDist signal = SignalDist::gaussian;
  Index k = 5;
  double noise_fraction = 0.0;
  std::uint64_t seed = 1;
  double tau_mult = 0.99;
  std::optional<double> sigma_frac; // set for BPDN instances

  void validate() const {
    if (m < 1 || n < 1)
      throw DomainError("matrix dimensions must be positive");
    if (k < 0 || k > n)
      throw DomainError("sparsity k must lie in [0, n]");
    if (kind == MatrixKind::sphere_walk) {
      if (m < 2)
        throw DomainError("sphere walk needs m >= 2");
      if (!(gamma > 0.0 && gamma <= 2.0))
        throw DomainError("sphere walk needs 0 < gamma <= 2");
    }
    if (!(noise_fraction >= 0.0))
      throw DomainError("noise fraction must be nonnegative");
    if (!(tau_mult >= 0.0))
      throw DomainError("tau multiplier must be nonnegative");
    if (sigma_frac && !(*sigma_frac >= 0.0))
      throw DomainError("sigma fraction must be nonnegative");
  }
};

namespace detail {

inline Vector unit_normal(SplitMix64 &rng, Index m) {
  Vector v(m);
  do {
    for (Index i = 0; i < m; ++i)
      v[i] = rng.normal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

} // namespace detail

/// Gaussian matrix with columns scaled to unit norm.
inline Matrix gen_gaussian(Index m, Index n, SplitMix64 &rng) {
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    a.col(j) = detail::unit_normal(rng, m);
  return a;
}

/// Columns from a random walk on the unit sphere with <a_k, a_{k+1}> = 1 - gamma:
/// a_{k+1} = (1 - gamma) a_k + sqrt(1 - (1 - gamma)^2) v, v a random unit
/// vector orthogonal to a_k.
inline Matrix gen_sphere_walk(Index m, Index n, double gamma, SplitMix64 &rng) {
  if (m < 2)
    throw DomainError("sphere walk needs m >= 2");
  if (!(std::abs(1.0 - gamma) <= 1.0) || gamma == 0.0)
    throw DomainError("sphere walk needs 0 < gamma <= 2");
  const double a1 = 1.0 - gamma;
  const double a2 = std::sqrt(std::max(0.0, 1.0 - a1 * a1));
  Matrix a(m, n);
  if (n == 0)
    return a;
  a.col(0) = detail::unit_normal(rng, m);
  for (Index j = 1; j < n; ++j) {
    const Vector prev = a.col(j - 1);
    Vector v;
    double nv = 0.0;
    do {
      v = detail::unit_normal(rng, m);
      v -= v.dot(prev) * prev;
      v -= v.dot(prev) * prev; // second pass for accuracy
      nv = v.norm();
    } while (nv < 1e-8);
    a.col(j) = a1 * prev + (a2 / nv) * v;
  }
  return a;
}

inline Matrix gen_sphere_walk(Index m, Index n, double gamma, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return gen_sphere_walk(m, n, gamma, rng);
}

/// Exactly k nonzeros on a uniformly random support.
inline Vector gen_sparse_signal(Index n, Index k, SignalDist dist, SplitMix64 &rng) {
  if (k < 0 || k > n)
    throw DomainError("sparsity k must lie in [0, n]");
  Vector x = Vector::Zero(n);
  for (auto i : rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(k))) {
    double v = 0.0;
    switch (dist) {
    case SignalDist::pm_one: v = rng.uniform() < 0.5 ? -1.0 : 1.0; break;
    case SignalDist::uniform:
      do
        v = rng.uniform(-1.0, 1.0);
      while (v == 0.0);
      break;
    case SignalDist::gaussian:
      do
        v = rng.normal();
      while (v == 0.0);
      break;
    }
    x[static_cast<Index>(i)] = v;
  }
  return x;
}

inline Vector gen_sparse_signal(Index n, Index k, SignalDist dist, std::uint64_t seed) {
  SplitMix64 rng(seed);
  return gen_sparse_signal(n, k, dist, rng);
}

struct GeneratedInstance {
  GeneratorSpec spec;
  Matrix a;
  Vector b;
  Vector x0;
  double tau = 0.0;
  std::optional<double> sigma;
  double x0_norm1 = 0.0;
  double b_norm2 = 0.0;

  LassoProblem lasso() const { return LassoProblem::dense(a, b, tau); }
};

/// Matrix, signal and noise drawn in that order from one stream seeded by spec.seed.
inline GeneratedInstance gen_instance(const GeneratorSpec &spec) {
  spec.validate();
  SplitMix64 rng(spec.seed);
  GeneratedInstance g;
  g.spec = spec;
  g.a = spec.kind == MatrixKind::gaussian ? gen_gaussian(spec.m, spec.n, rng)
                                          : gen_sphere_walk(spec.m, spec.n, spec.gamma, rng);
  g.x0 = gen_sparse_signal(spec.n, spec.k, spec.signal, rng);
  const Vector clean = g.a * g.x0;
  g.b = clean;
  if (spec.noise_fraction > 0.0) {
    Vector v(spec.m);
    for (Index i = 0; i < spec.m; ++i)
      v[i] = rng.normal();
    const double vn = v.norm();
    if (vn > 0.0)
      g.b += (spec.noise_fraction * clean.norm() / vn) * v;
  }
  g.x0_norm1 = g.x0.lpNorm<1>();
  g.b_norm2 = g.b.norm();
  g.tau = spec.tau_mult * g.x0_norm1;
  if (spec.sigma_frac)
    g.sigma = *spec.sigma_frac * g.b_norm2;
  return g;
}

} // namespace lassokit
