#ifndef MESHDN_DENOISE_HPP
#define MESHDN_DENOISE_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "meshdn/cholesky.hpp"
#include "meshdn/graph.hpp"
#include "meshdn/signal.hpp"
#include "meshdn/sparse.hpp"

namespace meshdn {

struct FilterParams {
  std::size_t iterations = 0;
};

struct HeatParams {
  double tau = 1.0;
  std::size_t iterations = 0;

  // Outside [0, 1] the step is no longer a convex combination; allowed, but
  // the discrete maximum principle is lost.
  bool outside_stable_range() const { return !(tau >= 0.0 && tau <= 1.0); }
  double effective_time() const { return tau * static_cast<double>(iterations); }
};

struct SobolevParams {
  double mu = 0.0;
};

namespace detail {

inline void check_operator(const SparseMatrix& op, const SignalMatrix& x, const char* who) {
  if (op.rows() != op.cols() || op.cols() != static_cast<Index>(x.size())) {
    throw std::invalid_argument(std::string(who) + ": operator is " + std::to_string(op.rows()) + "x" +
                                std::to_string(op.cols()) + " but the signal has " + std::to_string(x.size()) +
                                " rows");
  }
}

}  // namespace detail

// k applications of the averaging operator W̃.
inline SignalMatrix filter_denoise(const SignalMatrix& x, const SparseMatrix& w_normalized, FilterParams params) {
  detail::check_operator(w_normalized, x, "filter_denoise");
  SignalMatrix y = x;
  for (std::size_t k = 0; k < params.iterations; ++k) y = spmm(w_normalized, y);
  return y;
}

// Explicit Euler on dX/dt = −L̃X: X ← (1−τ)X + τ·W̃X.
inline SignalMatrix heat_denoise(const SignalMatrix& x, const SparseMatrix& w_normalized, HeatParams params) {
  detail::check_operator(w_normalized, x, "heat_denoise");
  if (!std::isfinite(params.tau)) throw std::invalid_argument("heat_denoise: tau must be finite");
  if (params.tau == 0.0) return x;
  // τ = 1 is exactly a filtering step; taking the product directly keeps the
  // two methods bit-identical (0·x + y can flip the sign of a zero).
  if (params.tau == 1.0) return filter_denoise(x, w_normalized, FilterParams{params.iterations});
  const double keep = 1.0 - params.tau;
  SignalMatrix y = x;
  for (std::size_t k = 0; k < params.iterations; ++k) {
    const SignalMatrix avg = spmm(w_normalized, y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      for (int c = 0; c < 3; ++c) y[i][c] = keep * y[i][c] + params.tau * avg[i][c];
    }
  }
  return y;
}

inline Vec3 centroid(const SignalMatrix& x) {
  if (x.empty()) throw std::invalid_argument("centroid: empty signal");
  Vec3 sum{0.0, 0.0, 0.0};
  for (const auto& row : x) sum = sum + row;
  return (1.0 / static_cast<double>(x.size())) * sum;
}

// Solves (I + μL)Y = X. The factorization of I + μL is computed once at
// construction and reused by every solve.
class SobolevSolver {
 public:
  SobolevSolver(const SparseMatrix& laplacian, SobolevParams params, Ordering ordering = Ordering::Automatic)
      : n_(laplacian.rows()), mu_(params.mu) {
    if (laplacian.rows() != laplacian.cols()) throw std::invalid_argument("sobolev: Laplacian is not square");
    if (!(mu_ >= 0.0) || !std::isfinite(mu_)) throw std::invalid_argument("sobolev: mu must be >= 0");
    if (mu_ > 0.0) {
      factor_ = sparse_cholesky(identity_plus(laplacian, mu_), ordering);
      ++factorizations_;
    }
  }

  SignalMatrix solve(const SignalMatrix& x) const {
    if (static_cast<Index>(x.size()) != n_)
      throw std::invalid_argument("sobolev: signal has " + std::to_string(x.size()) + " rows, expected " +
                                  std::to_string(n_));
    if (!factor_) return x;
    return factor_->solve(x);
  }

  double mu() const noexcept { return mu_; }
  std::size_t factorizations() const noexcept { return factorizations_; }
  const std::optional<CholeskyFactor>& factor() const noexcept { return factor_; }

 private:
  Index n_;
  double mu_;
  std::optional<CholeskyFactor> factor_;
  std::size_t factorizations_ = 0;
};

inline SignalMatrix sobolev_denoise(const SignalMatrix& x, const SparseMatrix& laplacian, SobolevParams params) {
  detail::check_operator(laplacian, x, "sobolev_denoise");
  return SobolevSolver(laplacian, params).solve(x);
}

}  // namespace meshdn

#endif  // MESHDN_DENOISE_HPP
