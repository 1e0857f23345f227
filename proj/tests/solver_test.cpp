#include <gtest/gtest.h>

#include <deque>

#include "lassokit/solver.hpp"
#include "test_util.hpp"

using namespace lassokit;
using namespace lassokit::testing;

namespace {

struct Generated {
  Matrix a;
  LassoProblem p;
};

Generated sparse_instance(std::uint64_t seed, Index m, Index n, Index k, double tau_mult = 0.99) {
  SplitMix64 rng(seed);
  Generated g;
  g.a = random_matrix(rng, m, n);
  for (Index j = 0; j < n; ++j)
    g.a.col(j).normalize();
  Vector x0 = Vector::Zero(n);
  for (auto i : rng.sample_indices(static_cast<std::size_t>(n), static_cast<std::size_t>(k)))
    x0[static_cast<Index>(i)] = rng.normal();
  g.p = LassoProblem::dense(g.a, g.a * x0, tau_mult * x0.lpNorm<1>());
  return g;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-3); }

} // namespace

TEST(Spg, StartAtOptimumTakesNoIterations) {
  const LassoProblem p = LassoProblem::dense(Matrix::Identity(1, 1), Vector{{2.0}}, 1.0);
  const SolverReport r = spg_solve(p, Vector{{1.0}});
  EXPECT_EQ(r.status, SolverStatus::optimal);
  EXPECT_EQ(r.iterations, 0);
  EXPECT_EQ(r.dual_gap_relative, 0.0);
}

TEST(Spg, OneDimensionalClamp) {
  const LassoProblem p = LassoProblem::dense(Matrix::Identity(1, 1), Vector{{2.0}}, 1.0);
  const SolverReport r = spg_solve(p, Vector{{0.0}});
  EXPECT_EQ(r.status, SolverStatus::optimal);
  EXPECT_LE(r.iterations, 1);
  EXPECT_DOUBLE_EQ(r.x[0], 1.0);
  EXPECT_EQ(r.dual_gap_relative, 0.0);
}

TEST(Spg, InfeasibleStartIsProjected) {
  const LassoProblem p = LassoProblem::dense(Matrix::Identity(2, 2), Vector{{0.2, 0.1}}, 1.0);
  const SolverReport r = spg_solve(p, Vector{{5.0, 5.0}});
  EXPECT_EQ(r.status, SolverStatus::optimal);
  EXPECT_LE((r.x - Vector{{0.2, 0.1}}).norm(), 1e-6);
}

TEST(Spg, MatchesReferenceMinimizer) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Generated g = sparse_instance(seed, 64, 128, 5);
    SolverOptions opt;
    opt.opt_tol = 1e-6;
    const SolverReport r = spg_solve(g.p, Vector::Zero(128), opt);
    ASSERT_EQ(r.status, SolverStatus::optimal);
    EXPECT_LE(r.dual_gap_relative, 1e-6);
    const Vector ref = reference_minimizer(g.a, g.p.b, g.p.w, g.p.tau, 0.0, g.p.c, 20000);
    const double fref = direct_objective(g.a, g.p.b, 0.0, g.p.c, ref);
    EXPECT_LE(rel(r.f, fref), 1e-6);
  }
}

TEST(Spg, IterationLimit) {
  const Generated g = sparse_instance(4, 32, 64, 5);
  SolverOptions opt;
  opt.max_iter = 2;
  opt.opt_tol = 1e-12;
  const SolverReport r = spg_solve(g.p, Vector::Zero(64), opt);
  EXPECT_EQ(r.status, SolverStatus::iter_limit);
  EXPECT_EQ(r.iterations, 2);
}

TEST(Spg, DefaultCapIsTenTimesRows) {
  const Generated g = sparse_instance(5, 6, 12, 3);
  SolverOptions opt;
  opt.opt_tol = 1e-300;
  const SolverReport r = spg_solve(g.p, Vector::Zero(12), opt);
  EXPECT_NE(r.status, SolverStatus::optimal);
  EXPECT_LE(r.iterations, 60);
}

TEST(Spg, StalledLineSearchReportsFailure) {
  const Generated g = sparse_instance(6, 32, 64, 5);
  SolverOptions opt;
  opt.bb_min = 1e-300;
  opt.bb_max = 2e-300; // steps too small to move a dense x
  const Vector x0 = project(Vector::Ones(64), g.p.w, g.p.tau).x;
  const SolverReport r = spg_solve(g.p, x0, opt);
  EXPECT_EQ(r.status, SolverStatus::linesearch_failure);
  EXPECT_EQ(r.x.size(), 64);
  EXPECT_TRUE(std::isfinite(r.dual_obj));
}

TEST(Spg, ArcModesReachSameOptimum) {
  const Generated g = sparse_instance(7, 48, 96, 6);
  SolverOptions opt;
  // tighter gaps run into rounding of f = 1/2 ||Ax - b||^2 near its floor
  opt.opt_tol = 1e-7;
  opt.max_iter = 2000;
  const double base = spg_solve(g.p, Vector::Zero(96), opt).f;
  for (auto mode : {LineSearchMode::arc_first_local, LineSearchMode::arc_global}) {
    opt.line_search_mode = mode;
    const SolverReport r = spg_solve(g.p, Vector::Zero(96), opt);
    EXPECT_EQ(r.status, SolverStatus::optimal);
    EXPECT_LE(rel(r.f, base), 1e-8);
  }
}

TEST(Hybrid, InteriorOptimumBecomesLbfgs) {
  SplitMix64 rng(8);
  const Matrix a = random_matrix(rng, 40, 20);
  const Vector b = random_normal(rng, 40);
  const LassoProblem p = LassoProblem::dense(a, b, 1e3);
  SolverOptions opt;
  opt.opt_tol = 1e-10;
  opt.record_trace = true;
  const SolverReport r = hybrid_solve(p, Vector::Zero(20), opt);
  EXPECT_EQ(r.status, SolverStatus::optimal);
  EXPECT_LE(r.dual_gap_relative, 1e-10);
  EXPECT_GT(r.qn_steps, 0);
  const Vector ls = a.colPivHouseholderQr().solve(b);
  EXPECT_LE((r.x - ls).norm(), 1e-4 * ls.norm());
  for (const TraceRecord &t : r.trace)
    EXPECT_EQ(t.face_dim, -1);
}

TEST(Hybrid, AgreesWithSpgAndEngages) {
  int engaged = 0;
  const int runs = 10;
  for (int s = 0; s < runs; ++s) {
    const Generated g = sparse_instance(100 + static_cast<std::uint64_t>(s), 128, 256, 20);
    SolverOptions opt;
    opt.opt_tol = 1e-6;
    const SolverReport a = spg_solve(g.p, Vector::Zero(256), opt);
    const SolverReport b = hybrid_solve(g.p, Vector::Zero(256), opt);
    ASSERT_EQ(b.status, SolverStatus::optimal);
    if (a.status == SolverStatus::optimal)
      EXPECT_LE(rel(a.f, b.f), 1e-8);
    engaged += b.qn_steps > 0;
  }
  EXPECT_GE(engaged, 8);
}

TEST(Hybrid, FinishesWithQuasiNewtonOnEdge) {
  // strictly convex 2-D problem; the optimum is the midpoint of an edge
  Matrix a(2, 2);
  a << 2.0, 0.5, 0.5, 1.0;
  const Vector xs{{0.5, 0.5}};
  const Vector b = a * xs + a.transpose().inverse() * Vector{{1.0, 1.0}};
  const LassoProblem p = LassoProblem::dense(a, b, 1.0);
  SolverOptions opt;
  opt.opt_tol = 1e-14;
  opt.max_iter = 100;
  opt.record_trace = true;
  const SolverReport r = hybrid_solve(p, Vector{{0.9, -0.05}}, opt);
  EXPECT_EQ(r.status, SolverStatus::optimal);
  EXPECT_LE((r.x - xs).norm(), 1e-8);
  ASSERT_FALSE(r.trace.empty());
  EXPECT_GT(r.qn_steps, 0);
  EXPECT_EQ(r.trace.back().kind, StepKind::quasi_newton);
  EXPECT_EQ(r.trace.back().face_dim, 1);
}

TEST(Hybrid, TraceInvariants) {
  for (std::uint64_t seed : {21, 22, 23}) {
    const Generated g = sparse_instance(seed, 96, 192, 30);
    SolverOptions opt;
    opt.opt_tol = 1e-8;
    opt.record_trace = true;
    const SolverReport r = hybrid_solve(g.p, Vector::Zero(192), opt);
    EXPECT_EQ(r.status, SolverStatus::optimal);
    EXPECT_LE(weighted_l1(r.x, g.p.w), g.p.tau * (1 + 1e-9));
    std::deque<double> hist{direct_objective(g.a, g.p.b, 0.0, g.p.c, Vector::Zero(192))};
    for (const TraceRecord &t : r.trace) {
      if (t.kind == StepKind::quasi_newton) {
        hist.assign(1, t.f);
        if (!t.interior_before)
          for (Index i : t.support_after)
            EXPECT_TRUE(std::find(t.support_before.begin(), t.support_before.end(), i) !=
                        t.support_before.end());
      } else {
        EXPECT_LE(t.f, *std::max_element(hist.begin(), hist.end()) + 1e-12);
        hist.push_back(t.f);
        if (hist.size() > static_cast<std::size_t>(opt.history_M))
          hist.pop_front();
      }
    }
  }
}

TEST(Hybrid, RidgeTermAndWeights) {
  SplitMix64 rng(9);
  const Matrix a = random_matrix(rng, 10, 8);
  const Vector b = random_normal(rng, 10), w = random_uniform(rng, 8, 0.5, 2.0);
  const Vector c = 0.1 * random_normal(rng, 8);
  const LassoProblem p = LassoProblem::dense(a, b, 0.8, 0.05, w, c);
  SolverOptions opt;
  opt.opt_tol = 1e-10;
  opt.max_iter = 1000;
  const SolverReport r = hybrid_solve(p, Vector::Zero(8), opt);
  EXPECT_EQ(r.status, SolverStatus::optimal);
  const Vector ref = reference_minimizer(a, b, w, 0.8, 0.05, c);
  EXPECT_LE(rel(r.f, direct_objective(a, b, 0.05, c, ref)), 1e-8);
}
