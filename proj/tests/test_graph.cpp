#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "meshdn/graph.hpp"
#include "meshdn/icosphere.hpp"
#include "meshdn/sparse.hpp"

using namespace meshdn;

namespace {

EdgeSet path3() { return EdgeSet{3, {{0, 1}, {1, 2}}}; }

EdgeSet random_graph(std::mt19937_64& rng, std::size_t n, double p) {
  std::bernoulli_distribution keep(p);
  EdgeSet es{n, {}};
  for (VertexIndex i = 0; i < n; ++i)
    for (VertexIndex j = i + 1; j < n; ++j)
      if (keep(rng)) es.edges.emplace_back(i, j);
  return es;
}

Eigen::MatrixXd dense(const SparseMatrix& a) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    const auto c = a.row_columns(i);
    const auto v = a.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) d(i, c[k]) = v[k];
  }
  return d;
}

SparseMatrix random_sparse(std::mt19937_64& rng, Index rows, Index cols, double density) {
  std::bernoulli_distribution keep(density);
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j)
      if (keep(rng)) t.push_back({i, j, val(rng)});
  return SparseMatrix::from_triplets(rows, cols, std::move(t));
}

SignalMatrix random_signal(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g;
  SignalMatrix x(n);
  for (auto& r : x) r = {g(rng), g(rng), g(rng)};
  return x;
}

}  // namespace

TEST(SparseMatrix, RejectsBrokenStructure) {
  EXPECT_THROW(SparseMatrix(2, 2, {0, 1}, {0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 2}, {1, 0}, {1.0, 1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {2}, {1.0}), std::invalid_argument);
  EXPECT_THROW(SparseMatrix(1, 2, {0, 1}, {0}, {0.0}), std::invalid_argument);
  EXPECT_NO_THROW(SparseMatrix(1, 2, {0, 2}, {0, 1}, {1.0, 2.0}));
}

TEST(SparseMatrix, TripletsSumAndDropZeros) {
  const auto a = SparseMatrix::from_triplets(2, 2, {{1, 0, 1.0}, {0, 1, 2.0}, {1, 0, -1.0}, {0, 1, 3.0}});
  EXPECT_EQ(a.nnz(), 1);
  EXPECT_EQ(a.at(0, 1), 5.0);
  EXPECT_EQ(a.at(1, 0), 0.0);
}

TEST(Adjacency, PathGraph) {
  const auto w = adjacency(path3());
  ASSERT_EQ(w.rows(), 3);
  EXPECT_EQ(std::vector<Index>(w.row_columns(0).begin(), w.row_columns(0).end()), (std::vector<Index>{1}));
  EXPECT_EQ(std::vector<Index>(w.row_columns(1).begin(), w.row_columns(1).end()), (std::vector<Index>{0, 2}));
  EXPECT_EQ(std::vector<Index>(w.row_columns(2).begin(), w.row_columns(2).end()), (std::vector<Index>{1}));
  for (double v : w.values()) EXPECT_EQ(v, 1.0);
}

TEST(Adjacency, EmptyAndTetrahedron) {
  const auto w0 = adjacency(EdgeSet{4, {}});
  EXPECT_EQ(w0.nnz(), 0);
  const Mesh tet({{1, 1, 1}, {1, -1, -1}, {-1, 1, -1}, {-1, -1, 1}}, {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}});
  const auto w = adjacency(tet);
  EXPECT_EQ(w.nnz(), 12);
  for (Index i = 0; i < 4; ++i) EXPECT_EQ(w.at(i, i), 0.0);
}

TEST(Adjacency, SymmetricOnIcosphere) {
  const auto w = adjacency(icosphere(3));
  EXPECT_EQ(w.transpose(), w);
}

TEST(Degrees, PathAndComplete) {
  EXPECT_EQ(degrees(adjacency(path3())).d, (std::vector<Index>{1, 2, 1}));
  EdgeSet k4{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  EXPECT_EQ(degrees(adjacency(k4)).d, (std::vector<Index>{3, 3, 3, 3}));
}

TEST(NormalizedAdjacency, Rows) {
  const auto w = adjacency(path3());
  const auto wt = normalized_adjacency(w, degrees(w));
  EXPECT_EQ(wt.at(1, 0), 0.5);
  EXPECT_EQ(wt.at(1, 1), 0.0);
  EXPECT_EQ(wt.at(1, 2), 0.5);

  EdgeSet with_isolated{4, {{0, 1}, {1, 2}}};
  const auto wi = adjacency(with_isolated);
  const auto wti = normalized_adjacency(wi, degrees(wi));
  EXPECT_EQ(wti.at(3, 3), 1.0);
  EXPECT_EQ(wti.row_columns(3).size(), 1u);

  EdgeSet k4{4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  const auto wk = adjacency(k4);
  const auto wtk = normalized_adjacency(wk, degrees(wk));
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(wtk.at(i, j), i == j ? 0.0 : 1.0 / 3.0);
}

TEST(NormalizedAdjacency, RowStochasticOnRandomGraphs) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto w = adjacency(random_graph(rng, 60, 0.05));
    for (double s : normalized_adjacency(w, degrees(w)).row_sums()) EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(Laplacian, PathGraph) {
  const auto w = adjacency(path3());
  const auto l = laplacian(w, degrees(w));
  const double expected[3][3] = {{1, -1, 0}, {-1, 2, -1}, {0, -1, 1}};
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) EXPECT_EQ(l.at(i, j), expected[i][j]);
}

TEST(Laplacian, IsolatedVertex) {
  const auto w = adjacency(EdgeSet{1, {}});
  const auto l = laplacian(w, degrees(w));
  EXPECT_EQ(l.rows(), 1);
  EXPECT_EQ(l.nnz(), 0);
}

// Dense eigenvalue oracle: L is PSD.
TEST(Laplacian, PositiveSemidefiniteRandom) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 5; ++t) {
    const auto w = adjacency(random_graph(rng, 50, 0.1));
    const auto l = laplacian(w, degrees(w));
    EXPECT_EQ(l.transpose(), l);
    for (double s : l.row_sums()) EXPECT_NEAR(s, 0.0, 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense(l));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
    // xᵀLx ≥ 0 on random vectors.
    const auto x = random_signal(rng, 50);
    const auto lx = spmm(l, x);
    for (int c = 0; c < 3; ++c) {
      double q = 0;
      for (std::size_t i = 0; i < x.size(); ++i) q += x[i][c] * lx[i][c];
      EXPECT_GE(q, -1e-10);
    }
  }
}

TEST(NormalizedLaplacian, Rows) {
  EdgeSet g{4, {{0, 1}, {1, 2}}};
  const auto w = adjacency(g);
  const auto lt = normalized_laplacian(normalized_adjacency(w, degrees(w)));
  EXPECT_EQ(lt.at(1, 0), -0.5);
  EXPECT_EQ(lt.at(1, 1), 1.0);
  EXPECT_EQ(lt.at(1, 2), -0.5);
  EXPECT_EQ(lt.row_columns(3).size(), 0u);
  for (double s : lt.row_sums()) EXPECT_NEAR(s, 0.0, 1e-12);
}

TEST(NormalizedLaplacian, AnnihilatesConstantsOnConnectedGraph) {
  const auto m = icosphere(2);
  const auto w = adjacency(m);
  const auto lt = normalized_laplacian(normalized_adjacency(w, degrees(w)));
  const SignalMatrix c(m.vertex_count(), Vec3{2.5, -1.0, 7.0});
  for (const auto& r : spmm(lt, c))
    for (double v : r) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Spmm, IdentityAndZero) {
  std::mt19937_64 rng(9);
  const auto x = random_signal(rng, 12);
  EXPECT_EQ(spmm(SparseMatrix::identity(12), x), x);
  const SparseMatrix zero(12, 12, std::vector<Index>(13, 0), {}, {});
  for (const auto& r : spmm(zero, x)) EXPECT_EQ(r, (Vec3{0, 0, 0}));
  EXPECT_THROW(spmm(SparseMatrix::identity(11), x), std::invalid_argument);
}

// Dense multiplication oracle, sizes up to 200.
TEST(Spmm, MatchesDenseProduct) {
  std::mt19937_64 rng(13);
  for (Index n : {20, 75, 200}) {
    const auto a = random_sparse(rng, n, n, 0.1);
    const auto x = random_signal(rng, static_cast<std::size_t>(n));
    const auto y = spmm(a, x);
    Eigen::MatrixXd xd(n, 3);
    for (Index i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) xd(i, c) = x[i][c];
    const Eigen::MatrixXd yd = dense(a) * xd;
    double err = 0;
    for (Index i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(y[i][c] - yd(i, c)));
    EXPECT_LE(err, 1e-13 * std::max(1.0, yd.cwiseAbs().maxCoeff()));
  }
}

TEST(Spmm, RowStochasticPreservesConstants) {
  const auto m = icosphere(3);
  const auto w = adjacency(m);
  const auto wt = normalized_adjacency(w, degrees(w));
  const SignalMatrix c(m.vertex_count(), Vec3{1.25, -3.5, 0.1});
  const auto y = spmm(wt, c);
  for (std::size_t i = 0; i < y.size(); ++i)
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(y[i][k], c[i][k], 1e-12);
}

TEST(Spmm, Deterministic) {
  std::mt19937_64 rng(17);
  const auto a = random_sparse(rng, 100, 100, 0.2);
  const auto x = random_signal(rng, 100);
  EXPECT_EQ(spmm(a, x), spmm(a, x));
}

TEST(SparseAdd, IdentityPlusLaplacian) {
  const auto w = adjacency(path3());
  const auto a = identity_plus(laplacian(w, degrees(w)), 2.0);
  EXPECT_EQ(a.at(0, 0), 3.0);
  EXPECT_EQ(a.at(1, 1), 5.0);
  EXPECT_EQ(a.at(0, 1), -2.0);
  EXPECT_EQ(a.at(0, 2), 0.0);
}
