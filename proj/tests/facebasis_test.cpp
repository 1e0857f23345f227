#include <gtest/gtest.h>

#include "lassokit/facebasis.hpp"
#include "test_util.hpp"

using namespace lassokit;
using namespace lassokit::testing;

namespace {

FaceId face_with(Index n, const std::vector<std::pair<Index, int>> &entries) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(n), 0);
  for (auto [i, sg] : entries)
    s[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(sg);
  return FaceId::from_signs(s);
}

FaceId random_face(SplitMix64 &rng, Index n, std::size_t k) {
  std::vector<std::int8_t> s(static_cast<std::size_t>(n), 0);
  for (auto i : rng.sample_indices(static_cast<std::size_t>(n), k))
    s[i] = rng.uniform() < 0.5 ? -1 : 1;
  return FaceId::from_signs(s);
}

/// Gram-Schmidt of the vertex differences v_j - v_0 via Householder QR with
/// the diagonal of R made positive, then embedded with the face signs.
Matrix dense_basis(const FaceId &face, const Vector &w) {
  const auto sup = face.support();
  const Index p = static_cast<Index>(sup.size());
  Matrix d = Matrix::Zero(p, p - 1);
  for (Index j = 1; j < p; ++j) {
    d(j, j - 1) = 1.0 / w[sup[static_cast<std::size_t>(j)]];
    d(0, j - 1) = -1.0 / w[sup[0]];
  }
  Eigen::HouseholderQR<Matrix> qr(d);
  Matrix q = qr.householderQ() * Matrix::Identity(p, p - 1);
  const Matrix r = qr.matrixQR().topRows(p - 1).triangularView<Eigen::Upper>();
  for (Index j = 0; j < p - 1; ++j)
    if (r(j, j) < 0)
      q.col(j) *= -1;
  Matrix phi = Matrix::Zero(w.size(), p - 1);
  for (Index j = 0; j < p; ++j) {
    const Index i = sup[static_cast<std::size_t>(j)];
    phi.row(i) = face.signs[static_cast<std::size_t>(i)] * q.row(j);
  }
  return phi;
}

} // namespace

TEST(FaceBasis, VertexRejected) {
  const FaceId v = face_with(3, {{1, 1}});
  try {
    basis_init(v, Vector::Ones(3));
    FAIL();
  } catch (const DomainError &e) {
    EXPECT_NE(std::string(e.what()).find("vertices"), std::string::npos);
  }
  EXPECT_THROW(basis_init(FaceId::interior(), Vector::Ones(3)), DomainError);
}

TEST(FaceBasis, EdgeWithUnitWeights) {
  const FaceId f = face_with(4, {{1, 1}, {3, -1}});
  const FaceBasis b = basis_init(f, Vector::Ones(4));
  EXPECT_EQ(b.reduced_dim(), 1);
  const Matrix phi = b.materialize();
  // (e_{i2} - e_{i1}) / sqrt 2 with the signs applied
  EXPECT_NEAR(phi(1, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(phi(3, 0), -1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(phi(0, 0), 0.0);
  EXPECT_EQ(phi(2, 0), 0.0);
  const Vector y = apply_basis(b, Vector::Constant(1, 2.5));
  EXPECT_NEAR(y[1], -2.5 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(y[3], -2.5 / std::sqrt(2.0), 1e-15);
}

TEST(FaceBasis, TriangleClosedForm) {
  const FaceId f = face_with(3, {{0, 1}, {1, 1}, {2, 1}});
  const Matrix phi = basis_init(f, Vector::Ones(3)).materialize();
  const double a = 1 / std::sqrt(2.0), c = 1 / std::sqrt(6.0);
  Matrix expect(3, 2);
  expect << -a, -c, a, -c, 0, 2 * c;
  EXPECT_LE((phi - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(FaceBasis, MatchesDenseQr) {
  SplitMix64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(25));
    const std::size_t k = 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1)));
    const FaceId f = random_face(rng, n, std::min<std::size_t>(k, static_cast<std::size_t>(n)));
    const Vector w = random_uniform(rng, n, 0.1, 5.0);
    const FaceBasis b = basis_init(f, w);
    const Matrix ref = dense_basis(f, w);
    EXPECT_LE((b.materialize() - ref).cwiseAbs().maxCoeff(), 1e-12);
    const Vector v = random_normal(rng, b.reduced_dim());
    EXPECT_LE((apply_basis(b, v) - ref * v).lpNorm<Eigen::Infinity>(), 1e-12);
    const Vector u = random_normal(rng, n);
    EXPECT_LE((apply_basis_adjoint(b, u) - ref.transpose() * u).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(FaceBasis, ZeroAndLengthChecks) {
  const FaceId f = face_with(5, {{0, 1}, {2, -1}, {4, 1}});
  const FaceBasis b = basis_init(f, Vector::Ones(5));
  EXPECT_EQ(apply_basis(b, Vector::Zero(2)).norm(), 0.0);
  EXPECT_THROW(apply_basis(b, Vector::Zero(3)), DimensionError);
  EXPECT_THROW(apply_basis_adjoint(b, Vector::Zero(4)), DimensionError);
}

TEST(FaceBasis, AdjointAnnihilatesNormalDirection) {
  SplitMix64 rng(22);
  for (int t = 0; t < 50; ++t) {
    const Index n = 3 + static_cast<Index>(rng.below(20));
    const FaceId f = random_face(rng, n, 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 2))));
    const Vector w = random_uniform(rng, n, 0.2, 4.0);
    Vector v = Vector::Zero(n);
    for (Index i : f.support())
      v[i] = f.signs[static_cast<std::size_t>(i)] * w[i];
    EXPECT_LE(apply_basis_adjoint(basis_init(f, w), v).norm(), 1e-12);
  }
}

TEST(FaceBasis, IsometryRoundTrip) {
  SplitMix64 rng(23);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(40));
    const FaceId f = random_face(rng, n, 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1))));
    const FaceBasis b = basis_init(f, random_uniform(rng, n, 0.2, 4.0));
    const Vector v = random_normal(rng, b.reduced_dim());
    EXPECT_LE((apply_basis_adjoint(b, apply_basis(b, v)) - v).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(FaceBasis, EmbedRoundTrip) {
  SplitMix64 rng(24);
  for (int t = 0; t < 100; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(49));
    const Vector w = random_uniform(rng, n, 0.2, 4.0);
    const double tau = rng.uniform(0.5, 3.0);
    const FaceId f = random_face(rng, n, 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1))));
    auto on_face = [&] {
      Vector x = Vector::Zero(n);
      double s = 0;
      for (Index i : f.support()) {
        x[i] = f.signs[static_cast<std::size_t>(i)] * rng.uniform(0.1, 1.0);
        s += w[i] * std::abs(x[i]);
      }
      return Vector(x * (tau / s));
    };
    const Vector anchor = on_face(), x = on_face();
    const FaceBasis b = basis_init(f, w);
    EXPECT_EQ(embed_face_point(b, anchor, Vector::Zero(b.reduced_dim())), anchor);
    const Vector c = apply_basis_adjoint(b, x - anchor);
    EXPECT_LE((embed_face_point(b, anchor, c) - x).lpNorm<Eigen::Infinity>(), 1e-12);
  }
}

TEST(FaceBasis, OrthonormalAndFixesVertexDifferences) {
  SplitMix64 rng(25);
  for (int t = 0; t < 50; ++t) {
    const Index n = 2 + static_cast<Index>(rng.below(100));
    const FaceId f = random_face(rng, n, 2 + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - 1))));
    const Vector w = random_uniform(rng, n, 0.1, 10.0);
    const double tau = 1.7;
    const FaceBasis b = basis_init(f, w);
    const Matrix phi = b.materialize();
    const Index k = b.reduced_dim();
    EXPECT_LE((phi.transpose() * phi - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-12);
    const auto sup = f.support();
    for (int r = 0; r < 5; ++r) {
      const Index i = sup[static_cast<std::size_t>(rng.below(sup.size()))];
      const Index j = sup[static_cast<std::size_t>(rng.below(sup.size()))];
      Vector diff = Vector::Zero(n);
      diff[i] += f.signs[static_cast<std::size_t>(i)] * tau / w[i];
      diff[j] -= f.signs[static_cast<std::size_t>(j)] * tau / w[j];
      EXPECT_LE((b.apply(b.apply_adjoint(diff)) - diff).norm(), 1e-10);
    }
  }
}

TEST(FaceBasis, WholeSpaceIsIdentity) {
  const FaceBasis b = FaceBasis::whole_space(4);
  const Vector v = Vector::LinSpaced(4, 1, 4);
  EXPECT_TRUE(b.is_identity());
  EXPECT_EQ(b.apply(v), v);
  EXPECT_EQ(b.apply_adjoint(v), v);
}
