#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "meshdn/denoise.hpp"
#include "meshdn/graph.hpp"
#include "meshdn/icosphere.hpp"
#include "meshdn/noise.hpp"

using namespace meshdn;

namespace {

struct Operators {
  SparseMatrix w_normalized;
  SparseMatrix laplacian;
};

Operators operators(const EdgeSet& es) {
  const auto w = adjacency(es);
  const auto d = degrees(w);
  return {normalized_adjacency(w, d), laplacian(w, d)};
}

Operators path3() { return operators(EdgeSet{3, {{0, 1}, {1, 2}}}); }

SignalMatrix spike() { return {{0, 0, 0}, {3, 3, 3}, {0, 0, 0}}; }

SignalMatrix random_signal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  SignalMatrix x(n);
  for (auto& r : x) r = {g(rng), g(rng), g(rng)};
  return x;
}

// Dense (I + μL)⁻¹X through Eigen's partial-pivot LU.
SignalMatrix dense_sobolev(const SparseMatrix& l, double mu, const SignalMatrix& x) {
  const Index n = l.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  for (Index i = 0; i < n; ++i) {
    const auto c = l.row_columns(i);
    const auto v = l.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) a(i, c[k]) += mu * v[k];
  }
  Eigen::MatrixXd b(n, 3);
  for (Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) b(i, c) = x[i][c];
  const Eigen::MatrixXd y = a.partialPivLu().solve(b);
  SignalMatrix out(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) out[i] = {y(i, 0), y(i, 1), y(i, 2)};
  return out;
}

double dirichlet_energy(const SparseMatrix& l, const SignalMatrix& y) {
  const auto ly = spmm(l, y);
  double s = 0;
  for (std::size_t i = 0; i < y.size(); ++i) s += dot(y[i], ly[i]);
  return s;
}

}  // namespace

TEST(FilterDenoise, ZeroIterationsIsIdentity) {
  const auto ops = path3();
  EXPECT_EQ(filter_denoise(spike(), ops.w_normalized, {0}), spike());
}

TEST(FilterDenoise, ConstantIsFixedPoint) {
  const auto m = icosphere(2);
  const auto ops = operators(extract_edges(m));
  const SignalMatrix c(m.vertex_count(), Vec3{1.5, -2, 0.25});
  const auto y = filter_denoise(c, ops.w_normalized, {25});
  for (std::size_t i = 0; i < y.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(y[i][k], c[i][k], 1e-12);
}

// Rows of W̃ for P3 are (e₂; ½e₁ + ½e₃; e₂).
TEST(FilterDenoise, PathGraphOneStep) {
  const auto ops = path3();
  const auto y = filter_denoise(spike(), ops.w_normalized, {1});
  EXPECT_EQ(y[0], (Vec3{3, 3, 3}));
  EXPECT_EQ(y[1], (Vec3{0, 0, 0}));
  EXPECT_EQ(y[2], (Vec3{3, 3, 3}));
  EXPECT_THROW(filter_denoise(SignalMatrix(2), ops.w_normalized, {1}), std::invalid_argument);
}

TEST(HeatDenoise, TauZeroIsIdentity) {
  const auto ops = path3();
  EXPECT_EQ(heat_denoise(spike(), ops.w_normalized, {0.0, 17}), spike());
}

TEST(HeatDenoise, TauOneEqualsFiltering) {
  const auto m = icosphere(3);
  const auto ops = operators(extract_edges(m));
  const auto x = add_normal_noise(m, {0.05, 4}).vertices();
  for (std::size_t k : {0u, 1u, 7u, 30u})
    EXPECT_EQ(heat_denoise(x, ops.w_normalized, {1.0, k}), filter_denoise(x, ops.w_normalized, {k}));
}

// (1 − ½)·3 + ½·0 = 1.5 in the middle; ends ½·0 + ½·3.
TEST(HeatDenoise, HalfStepOnPath) {
  const auto ops = path3();
  const auto y = heat_denoise(spike(), ops.w_normalized, {0.5, 1});
  EXPECT_EQ(y[1], (Vec3{1.5, 1.5, 1.5}));
  EXPECT_EQ(y[0], (Vec3{1.5, 1.5, 1.5}));
}

TEST(HeatDenoise, StabilityFlagAndEffectiveTime) {
  EXPECT_FALSE((HeatParams{0.5, 10}).outside_stable_range());
  EXPECT_TRUE((HeatParams{1.01, 10}).outside_stable_range());
  EXPECT_TRUE((HeatParams{-0.1, 10}).outside_stable_range());
  EXPECT_DOUBLE_EQ((HeatParams{0.25, 8}).effective_time(), 2.0);
  const auto ops = path3();
  EXPECT_NO_THROW(heat_denoise(spike(), ops.w_normalized, {1.01, 3}));
}

// Each output row is a convex combination of input rows for τ ∈ [0, 1].
TEST(HeatDenoise, MaximumPrinciple) {
  const auto m = icosphere(2);
  const auto ops = operators(extract_edges(m));
  std::mt19937_64 rng(6);
  const auto x0 = random_signal(rng, m.vertex_count());
  for (double tau : {0.0, 0.3, 0.75, 1.0}) {
    auto x = x0;
    for (int step = 0; step < 20; ++step) {
      const auto y = heat_denoise(x, ops.w_normalized, {tau, 1});
      for (int c = 0; c < 3; ++c) {
        const auto [xmin, xmax] = std::minmax_element(x.begin(), x.end(), [c](auto& a, auto& b) { return a[c] < b[c]; });
        const auto [ymin, ymax] = std::minmax_element(y.begin(), y.end(), [c](auto& a, auto& b) { return a[c] < b[c]; });
        EXPECT_LE((*ymax)[c], (*xmax)[c]);
        EXPECT_GE((*ymin)[c], (*xmin)[c]);
      }
      x = y;
    }
  }
}

TEST(SobolevDenoise, MuZeroIsIdentity) {
  const auto ops = path3();
  EXPECT_EQ(sobolev_denoise(spike(), ops.laplacian, {0.0}), spike());
  EXPECT_EQ(SobolevSolver(ops.laplacian, {0.0}).factorizations(), 0u);
}

TEST(SobolevDenoise, ConstantUnchanged) {
  const auto m = icosphere(2);
  const auto ops = operators(extract_edges(m));
  const SignalMatrix c(m.vertex_count(), Vec3{4, -1, 2});
  for (double mu : {0.5, 10.0, 1000.0}) {
    const auto y = sobolev_denoise(c, ops.laplacian, {mu});
    for (std::size_t i = 0; i < y.size(); ++i)
      for (int k = 0; k < 3; ++k) EXPECT_NEAR(y[i][k], c[i][k], 1e-10);
  }
}

TEST(SobolevDenoise, PathGraphMatchesDenseSolve) {
  const auto ops = path3();
  const auto y = sobolev_denoise(spike(), ops.laplacian, {1.0});
  const auto ref = dense_sobolev(ops.laplacian, 1.0, spike());
  EXPECT_LT(frobenius_distance(y, ref) / frobenius_norm(ref), 1e-12);
  // (I + L)Y = X.
  EXPECT_LT(frobenius_distance(spmm(identity_plus(ops.laplacian, 1.0), y), spike()), 1e-12);
}

TEST(SobolevDenoise, RandomGraphMatchesDenseSolve) {
  std::mt19937_64 rng(12);
  std::bernoulli_distribution keep(0.06);
  EdgeSet es{100, {}};
  for (VertexIndex i = 0; i < 100; ++i)
    for (VertexIndex j = i + 1; j < 100; ++j)
      if (keep(rng)) es.edges.emplace_back(i, j);
  const auto ops = operators(es);
  const auto x = random_signal(rng, 100);
  for (double mu : {0.1, 2.0, 51.0}) {
    const auto y = sobolev_denoise(x, ops.laplacian, {mu});
    const auto ref = dense_sobolev(ops.laplacian, mu, x);
    EXPECT_LT(frobenius_distance(y, ref) / frobenius_norm(ref), 1e-10);
  }
}

TEST(SobolevDenoise, CentroidPreserved) {
  const auto m = icosphere(3);
  const auto ops = operators(extract_edges(m));
  const auto x = add_normal_noise(m, {0.1, 9}).vertices();
  const auto c0 = centroid(x);
  for (double mu : {0.1, 2.0, 51.0}) {
    const auto c1 = centroid(sobolev_denoise(x, ops.laplacian, {mu}));
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(c1[k], c0[k], 1e-10);
  }
}

TEST(SobolevDenoise, SmoothingMonotoneInMu) {
  const auto m = icosphere(3);
  const auto ops = operators(extract_edges(m));
  const auto x = add_normal_noise(m, {0.1, 10}).vertices();
  double prev = dirichlet_energy(ops.laplacian, x);
  for (double mu : {0.1, 1.0, 10.0}) {
    const double e = dirichlet_energy(ops.laplacian, sobolev_denoise(x, ops.laplacian, {mu}));
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(SobolevSolver, FactorizesOnce) {
  const auto m = icosphere(3);
  const auto ops = operators(extract_edges(m));
  const SobolevSolver solver(ops.laplacian, {5.0});
  const auto a = solver.solve(add_normal_noise(m, {0.1, 1}).vertices());
  const auto b = solver.solve(add_normal_noise(m, {0.1, 2}).vertices());
  EXPECT_EQ(solver.factorizations(), 1u);
  EXPECT_NE(a, b);
  EXPECT_THROW(solver.solve(SignalMatrix(3)), std::invalid_argument);
  EXPECT_THROW(SobolevSolver(ops.laplacian, {-1.0}), std::invalid_argument);
}

TEST(Centroid, Basics) {
  EXPECT_EQ(centroid({{1, 2, 3}}), (Vec3{1, 2, 3}));
  const auto c = centroid({{1, -2, 3}, {-1, 2, -3}});
  EXPECT_EQ(c, (Vec3{0, 0, 0}));
  EXPECT_THROW(centroid({}), std::invalid_argument);
}

TEST(Centroid, MatchesDirectSummation) {
  std::mt19937_64 rng(14);
  const auto x = random_signal(rng, 1000);
  const auto c = centroid(x);
  for (int k = 0; k < 3; ++k) {
    long double s = 0;
    for (const auto& r : x) s += r[k];
    EXPECT_NEAR(c[k], static_cast<double>(s / 1000.0L), 1e-14);
  }
}
