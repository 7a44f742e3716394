#ifndef MESHDN_TRANSPORT_HPP
#define MESHDN_TRANSPORT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace meshdn::ot {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) throw std::invalid_argument("Matrix: data size does not match shape");
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const double> data() const noexcept { return data_; }

  double max() const { return data_.empty() ? 0.0 : *std::max_element(data_.begin(), data_.end()); }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

using CostMatrix = Matrix;

// Probability weights on a finite support.
class Histogram {
 public:
  static constexpr double sum_tolerance = 1e-12;

  explicit Histogram(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty()) throw std::invalid_argument("Histogram: empty support");
    double sum = 0.0;
    for (double x : w_) {
      if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("Histogram: weights must be finite and >= 0");
      sum += x;
    }
    if (std::abs(sum - 1.0) > sum_tolerance)
      throw std::invalid_argument("Histogram: weights sum to " + std::to_string(sum) + ", not 1");
  }

  static Histogram uniform(std::size_t n) { return Histogram(std::vector<double>(n, 1.0 / static_cast<double>(n))); }

  // Scales nonnegative masses to unit total.
  static Histogram normalized(std::vector<double> masses) {
    double sum = 0.0;
    for (double x : masses) sum += x;
    if (!(sum > 0.0)) throw std::invalid_argument("Histogram: total mass must be positive");
    for (double& x : masses) x /= sum;
    return Histogram(std::move(masses));
  }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t i) const { return w_[i]; }
  const std::vector<double>& weights() const noexcept { return w_; }

  bool is_uniform(double tol = 1e-12) const {
    const double u = 1.0 / static_cast<double>(w_.size());
    return std::all_of(w_.begin(), w_.end(), [&](double x) { return std::abs(x - u) <= tol; });
  }

 private:
  std::vector<double> w_;
};

struct TransportPlan {
  Matrix gamma;
  // L1 residuals ‖γ1 − μ‖₁ and ‖γᵀ1 − ν‖₁ against the target marginals.
  double row_marginal_error = 0.0;
  double col_marginal_error = 0.0;
};

// Points in R^d, one per row.
using PointCloud = Matrix;

inline std::pair<double, double> marginal_residuals(const Matrix& gamma, const Histogram& mu, const Histogram& nu) {
  if (gamma.rows() != mu.size() || gamma.cols() != nu.size())
    throw std::invalid_argument("marginal_residuals: shape mismatch");
  std::vector<double> col(gamma.cols(), 0.0);
  double row_err = 0.0;
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      r += gamma(i, j);
      col[j] += gamma(i, j);
    }
    row_err += std::abs(r - mu[i]);
  }
  double col_err = 0.0;
  for (std::size_t j = 0; j < gamma.cols(); ++j) col_err += std::abs(col[j] - nu[j]);
  return {row_err, col_err};
}

inline std::pair<double, double> marginal_residuals(const TransportPlan& plan, const Histogram& mu,
                                                    const Histogram& nu) {
  return marginal_residuals(plan.gamma, mu, nu);
}

// μ⊗ν: always feasible.
inline TransportPlan product_plan(const Histogram& mu, const Histogram& nu) {
  TransportPlan plan{Matrix(mu.size(), nu.size())};
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) plan.gamma(i, j) = mu[i] * nu[j];
  std::tie(plan.row_marginal_error, plan.col_marginal_error) = marginal_residuals(plan, mu, nu);
  return plan;
}

inline double transport_cost(const Matrix& gamma, const CostMatrix& c) {
  if (gamma.rows() != c.rows() || gamma.cols() != c.cols()) throw std::invalid_argument("transport_cost: shape mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) sum += c(i, j) * gamma(i, j);
  return sum;
}

inline double transport_cost(const TransportPlan& plan, const CostMatrix& c) { return transport_cost(plan.gamma, c); }

struct MongeSolution {
  std::vector<std::size_t> assignment;  // x ↦ assignment[x]
  double cost = 0.0;                    // Σ_x c(x, assignment[x])
};

constexpr std::size_t monge_enumeration_limit = 9;

// Exhaustive search over all N! bijections, in lexicographic order; the
// first minimum wins, so ties resolve to the lexicographically smallest map.
inline MongeSolution monge_bruteforce(const CostMatrix& c) {
  if (c.rows() != c.cols()) throw std::invalid_argument("monge_bruteforce: cost matrix is not square");
  if (c.rows() > monge_enumeration_limit)
    throw std::invalid_argument("monge_bruteforce: N = " + std::to_string(c.rows()) + " exceeds the enumeration bound " +
                                std::to_string(monge_enumeration_limit));
  const std::size_t n = c.rows();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  MongeSolution best{perm, std::numeric_limits<double>::infinity()};
  do {
    double cost = 0.0;
    for (std::size_t x = 0; x < n; ++x) cost += c(x, perm[x]);
    if (cost < best.cost) best = {perm, cost};
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (n == 0) best.cost = 0.0;
  return best;
}

// Shannon entropy in nats, with 0·log 0 = 0.
inline double entropy(const Histogram& p) {
  double h = 0.0;
  for (double x : p.weights())
    if (x > 0.0) h -= x * std::log(x);
  return h;
}

// Σ p log(p/q); +inf when p puts mass where q has none.
inline double kl_divergence(const Histogram& p, const Histogram& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: length mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0) return std::numeric_limits<double>::infinity();
    kl += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative total for p ≈ q.
  return std::max(kl, 0.0);
}

struct GibbsKernel {
  Matrix k;
  // Some entry underflowed to exactly zero.
  bool underflow = false;
};

inline GibbsKernel gibbs_kernel(const CostMatrix& c, double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("gibbs_kernel: epsilon must be > 0");
  GibbsKernel out{Matrix(c.rows(), c.cols())};
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) {
      const double v = std::exp(-c(i, j) / epsilon);
      out.k(i, j) = v;
      out.underflow = out.underflow || v == 0.0;
    }
  return out;
}

struct SinkhornOptions {
  std::size_t max_iters = 10000;
  double tol = 1e-9;
  // Log-domain solver only: after this many plain sweeps, each iteration
  // first takes a damped Newton step on the dual potentials. The fixed point
  // is unchanged; the asymptotic rate of plain sweeps at small ε is too slow
  // to reach tight tolerances.
  std::size_t newton_after = 20;
};

struct SinkhornState {
  // Scalings in log form; u = exp(log_u), v = exp(log_v). Keeping logs lets
  // the log-domain solver report scalings beyond the double range.
  std::vector<double> log_u;
  std::vector<double> log_v;
  std::size_t iterations_run = 0;
  std::vector<std::pair<double, double>> residual_history;  // (row, col) L1
  bool converged = false;

  std::vector<double> u() const { return exp_all(log_u); }
  std::vector<double> v() const { return exp_all(log_v); }

 private:
  static std::vector<double> exp_all(const std::vector<double>& x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(), [](double t) { return std::exp(t); });
    return out;
  }
};

struct SinkhornResult {
  SinkhornState state;
  TransportPlan plan;
};

namespace detail {

inline void check_marginals(const Histogram& mu, const Histogram& nu, std::size_t rows, std::size_t cols,
                            const char* who) {
  if (mu.size() != rows || nu.size() != cols)
    throw std::invalid_argument(std::string(who) + ": marginals do not match the kernel shape");
}

inline void check_options(const SinkhornOptions& opt, const char* who) {
  if (!(opt.tol > 0.0)) throw std::invalid_argument(std::string(who) + ": tol must be > 0");
  if (opt.max_iters == 0) throw std::invalid_argument(std::string(who) + ": max_iters must be >= 1");
}

}  // namespace detail

// diag(u)·K·diag(v) from u ← μ ⊘ Kv, v ← ν ⊘ Kᵀu, starting at v = 1. The
// column marginal is exact after each v update, so each iteration records
// the residual pair of the current plan and stops when both are ≤ tol.
inline SinkhornResult sinkhorn(const Histogram& mu, const Histogram& nu, const Matrix& k, SinkhornOptions opt = {}) {
  detail::check_marginals(mu, nu, k.rows(), k.cols(), "sinkhorn");
  detail::check_options(opt, "sinkhorn");
  const std::size_t n = k.rows(), m = k.cols();
  for (double x : k.data())
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("sinkhorn: kernel entries must be finite and >= 0");
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += k(i, j);
    if (s == 0.0) throw TransportError("sinkhorn: kernel row " + std::to_string(i) + " is zero, mass cannot route");
  }
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += k(i, j);
    if (s == 0.0) throw TransportError("sinkhorn: kernel column " + std::to_string(j) + " is zero, mass cannot route");
  }

  std::vector<double> u(n, 1.0), v(m, 1.0);
  SinkhornResult out;
  auto& st = out.state;
  Matrix gamma(n, m);
  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double kv = 0.0;
      for (std::size_t j = 0; j < m; ++j) kv += k(i, j) * v[j];
      u[i] = mu[i] / kv;
    }
    for (std::size_t j = 0; j < m; ++j) {
      double ktu = 0.0;
      for (std::size_t i = 0; i < n; ++i) ktu += k(i, j) * u[i];
      v[j] = nu[j] / ktu;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!std::isfinite(u[i])) throw TransportError("sinkhorn: numerical blowup in u, use the log-domain solver");
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isfinite(v[j])) throw TransportError("sinkhorn: numerical blowup in v, use the log-domain solver");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) gamma(i, j) = u[i] * k(i, j) * v[j];
    const auto res = marginal_residuals(gamma, mu, nu);
    st.residual_history.push_back(res);
    st.iterations_run = it + 1;
    if (res.first <= opt.tol && res.second <= opt.tol) {
      st.converged = true;
      break;
    }
  }
  st.log_u.resize(n);
  st.log_v.resize(m);
  std::transform(u.begin(), u.end(), st.log_u.begin(), [](double t) { return std::log(t); });
  std::transform(v.begin(), v.end(), st.log_v.begin(), [](double t) { return std::log(t); });
  out.plan.gamma = std::move(gamma);
  std::tie(out.plan.row_marginal_error, out.plan.col_marginal_error) = st.residual_history.back();
  return out;
}

namespace detail {

inline double log_sum_exp(std::span<const double> x) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double t : x) hi = std::max(hi, t);
  if (!std::isfinite(hi)) return hi;
  double s = 0.0;
  for (double t : x) s += std::exp(t - hi);
  return hi + std::log(s);
}

inline double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

}  // namespace detail

namespace detail {

// Symmetric positive definite solve by dense Cholesky; false when a pivot
// is not positive.
inline bool dense_spd_solve(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 0.0)) return false;
    d = std::sqrt(d);
    a[j * n + j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= a[i * n + k] * b[k];
    b[i] = s / a[i * n + i];
  }
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[k * n + i] * b[k];
    b[i] = s / a[i * n + i];
  }
  return true;
}

// One damped Newton step on the scaled dual
//   Φ(a, b) = ⟨a, μ⟩ + ⟨b, ν⟩ − Σ exp(a_i + log K_ij + b_j)
// with b_{m−1} held fixed to remove the (1, −1) null direction. The step is
// accepted only if Φ increases (Armijo), with the increase evaluated
// relative to the current plan through expm1 so it stays accurate near the
// optimum. Returns false when no step was taken.
inline bool newton_dual_step(std::vector<double>& log_u, std::vector<double>& log_v, const Matrix& gamma,
                             const Histogram& mu, const Histogram& nu) {
  const std::size_t n = log_u.size(), m = log_v.size(), dim = n + m - 1;
  if (m < 1 || dim == 0 || dim > 400) return false;
  std::vector<double> r(n, 0.0), s(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      r[i] += gamma(i, j);
      s[j] += gamma(i, j);
    }
  std::vector<double> h(dim * dim, 0.0), grad(dim);
  double diag_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    h[i * dim + i] = r[i];
    grad[i] = mu[i] - r[i];
    diag_max = std::max(diag_max, r[i]);
    for (std::size_t j = 0; j + 1 < m; ++j) h[i * dim + n + j] = h[(n + j) * dim + i] = gamma(i, j);
  }
  for (std::size_t j = 0; j + 1 < m; ++j) {
    h[(n + j) * dim + n + j] = s[j];
    grad[n + j] = nu[j] - s[j];
    diag_max = std::max(diag_max, s[j]);
  }
  // A relative ridge keeps modes whose coupling has underflowed solvable.
  for (std::size_t k = 0; k < dim; ++k) h[k * dim + k] += 1e-14 * diag_max;
  std::vector<double> d = grad;
  if (!dense_spd_solve(h, d, dim)) return false;
  double slope = 0.0;
  for (std::size_t k = 0; k < dim; ++k) slope += grad[k] * d[k];
  if (!(slope > 0.0)) return false;
  auto da = [&](std::size_t i) { return d[i]; };
  auto db = [&](std::size_t j) { return j + 1 < m ? d[n + j] : 0.0; };
  for (double t = 1.0; t > 1e-10; t *= 0.5) {
    double gain = 0.0;
    for (std::size_t i = 0; i < n; ++i) gain += t * da(i) * mu[i];
    for (std::size_t j = 0; j < m; ++j) gain += t * db(j) * nu[j];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (gamma(i, j) > 0.0) gain -= gamma(i, j) * std::expm1(t * (da(i) + db(j)));
    if (std::isfinite(gain) && gain >= 1e-4 * t * slope) {
      for (std::size_t i = 0; i < n; ++i) log_u[i] += t * da(i);
      for (std::size_t j = 0; j < m; ++j) log_v[j] += t * db(j);
      return true;
    }
  }
  return false;
}

}  // namespace detail

// The same iteration carried out on log u and log v with log-sum-exp
// reductions against log K = −c/ε, so small ε does not underflow. Once
// opt.newton_after sweeps have run, a Newton step on the dual precedes
// each sweep.
inline SinkhornResult sinkhorn_log(const Histogram& mu, const Histogram& nu, const CostMatrix& c, double epsilon,
                                   SinkhornOptions opt = {}) {
  detail::check_marginals(mu, nu, c.rows(), c.cols(), "sinkhorn_log");
  detail::check_options(opt, "sinkhorn_log");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("sinkhorn_log: epsilon must be > 0");
  for (double x : c.data())
    if (!std::isfinite(x)) throw std::invalid_argument("sinkhorn_log: cost entries must be finite");
  const std::size_t n = c.rows(), m = c.cols();

  Matrix log_k(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) log_k(i, j) = -c(i, j) / epsilon;
  std::vector<double> log_mu(n), log_nu(m);
  for (std::size_t i = 0; i < n; ++i) log_mu[i] = detail::safe_log(mu[i]);
  for (std::size_t j = 0; j < m; ++j) log_nu[j] = detail::safe_log(nu[j]);

  SinkhornResult out;
  auto& st = out.state;
  st.log_u.assign(n, 0.0);
  st.log_v.assign(m, 0.0);
  std::vector<double> row(std::max(n, m));
  Matrix gamma(n, m);
  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    if (it >= opt.newton_after && it > 0) (void)detail::newton_dual_step(st.log_u, st.log_v, gamma, mu, nu);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) row[j] = log_k(i, j) + st.log_v[j];
      st.log_u[i] = log_mu[i] - detail::log_sum_exp(std::span<const double>(row.data(), m));
    }
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t i = 0; i < n; ++i) row[i] = log_k(i, j) + st.log_u[i];
      st.log_v[j] = log_nu[j] - detail::log_sum_exp(std::span<const double>(row.data(), n));
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) gamma(i, j) = std::exp(st.log_u[i] + log_k(i, j) + st.log_v[j]);
    const auto res = marginal_residuals(gamma, mu, nu);
    st.residual_history.push_back(res);
    st.iterations_run = it + 1;
    if (res.first <= opt.tol && res.second <= opt.tol) {
      st.converged = true;
      break;
    }
  }
  out.plan.gamma = std::move(gamma);
  std::tie(out.plan.row_marginal_error, out.plan.col_marginal_error) = st.residual_history.back();
  return out;
}

// Plan diag(u)·K·diag(v) rebuilt from explicit scalings.
inline Matrix scaled_plan(const std::vector<double>& u, const Matrix& k, const std::vector<double>& v) {
  if (u.size() != k.rows() || v.size() != k.cols()) throw std::invalid_argument("scaled_plan: shape mismatch");
  Matrix g(k.rows(), k.cols());
  for (std::size_t i = 0; i < k.rows(); ++i)
    for (std::size_t j = 0; j < k.cols(); ++j) g(i, j) = u[i] * k(i, j) * v[j];
  return g;
}

// c(x, y) = ‖x − y‖^p between the rows of two point clouds.
inline CostMatrix distance_cost(const PointCloud& xs, const PointCloud& ys, double p) {
  if (xs.cols() != ys.cols()) throw std::invalid_argument("distance_cost: point dimensions differ");
  CostMatrix c(xs.rows(), ys.rows());
  for (std::size_t i = 0; i < xs.rows(); ++i)
    for (std::size_t j = 0; j < ys.rows(); ++j) {
      double s = 0.0;
      for (std::size_t d = 0; d < xs.cols(); ++d) {
        const double t = xs(i, d) - ys(j, d);
        s += t * t;
      }
      c(i, j) = std::pow(std::sqrt(s), p);
    }
  return c;
}

struct WassersteinResult {
  double distance = 0.0;
  // True when the value comes from entropic Sinkhorn rather than exact
  // enumeration.
  bool approximate = false;
  bool converged = true;
};

struct WassersteinOptions {
  double epsilon = 1e-2;
  double tol = 1e-9;
  std::size_t max_iters = 10000;
};

// (optimal cost)^{1/p} under ground cost ‖x − y‖^p. Uniform equal-size
// marginals with N ≤ 9 are solved exactly by enumeration; everything else by
// log-domain Sinkhorn.
inline WassersteinResult wasserstein_p(const PointCloud& xs, const PointCloud& ys, const Histogram& mu,
                                       const Histogram& nu, double p, WassersteinOptions opt = {}) {
  if (xs.rows() != mu.size() || ys.rows() != nu.size())
    throw std::invalid_argument("wasserstein_p: support sizes do not match the histograms");
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_p: p must be >= 1");
  const CostMatrix c = distance_cost(xs, ys, p);
  WassersteinResult out;
  if (mu.size() == nu.size() && mu.size() <= monge_enumeration_limit && mu.is_uniform() && nu.is_uniform()) {
    const auto exact = monge_bruteforce(c);
    out.distance = std::pow(exact.cost / static_cast<double>(mu.size()), 1.0 / p);
    return out;
  }
  const auto res = sinkhorn_log(mu, nu, c, opt.epsilon, {opt.max_iters, opt.tol});
  out.distance = std::pow(std::max(transport_cost(res.plan, c), 0.0), 1.0 / p);
  out.approximate = true;
  out.converged = res.state.converged;
  return out;
}

struct BarycenterOptions {
  std::size_t max_iters = 10000;
  double tol = 1e-9;
};

struct BarycenterResult {
  Histogram histogram;
  std::size_t iterations_run = 0;
  bool converged = false;
};

// Iterative Bregman projections. Each input a_k keeps scalings (u_k, v_k)
// with u_k = a_k ⊘ K v_k; the shared marginal is the weighted geometric
// mean b = Π_k (v_k ⊙ Kᵀu_k)^{w_k}, after which v_k = b ⊘ Kᵀu_k. Every round
// updates all inputs from the same b, so the result does not depend on the
// order in which inputs are processed.
inline BarycenterResult barycenter(const std::vector<Histogram>& inputs, const std::vector<double>& weights,
                                   const Matrix& k, BarycenterOptions opt = {}) {
  if (inputs.empty()) throw std::invalid_argument("barycenter: no inputs");
  if (weights.size() != inputs.size()) throw std::invalid_argument("barycenter: one weight per input required");
  const std::size_t n = inputs.front().size();
  for (const auto& a : inputs)
    if (a.size() != n) throw std::invalid_argument("barycenter: inputs must share one support");
  if (k.rows() != n || k.cols() != n) throw std::invalid_argument("barycenter: kernel must be n x n");
  for (double x : k.data())
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("barycenter: kernel must be strictly positive");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw std::invalid_argument("barycenter: weights must be positive");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-12) throw std::invalid_argument("barycenter: weights must sum to 1");

  const std::size_t r = inputs.size();
  std::vector<std::vector<double>> u(r, std::vector<double>(n, 1.0)), v(r, std::vector<double>(n, 1.0)),
      ktu(r, std::vector<double>(n, 0.0));
  std::vector<double> b(n, 0.0), b_prev(n, 0.0), log_b(n);
  bool have_prev = false;
  std::size_t it = 0;
  bool converged = false;
  for (; it < opt.max_iters && !converged; ++it) {
    for (std::size_t s = 0; s < r; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double kv = 0.0;
        for (std::size_t j = 0; j < n; ++j) kv += k(i, j) * v[s][j];
        u[s][i] = inputs[s][i] / kv;
      }
      for (std::size_t j = 0; j < n; ++j) {
        double t = 0.0;
        for (std::size_t i = 0; i < n; ++i) t += k(i, j) * u[s][i];
        ktu[s][j] = t;
      }
    }
    std::fill(log_b.begin(), log_b.end(), 0.0);
    for (std::size_t s = 0; s < r; ++s)
      for (std::size_t j = 0; j < n; ++j) log_b[j] += weights[s] * detail::safe_log(v[s][j] * ktu[s][j]);
    for (std::size_t j = 0; j < n; ++j) b[j] = std::exp(log_b[j]);
    double total = 0.0;
    for (double x : b) total += x;
    if (!(total > 0.0) || !std::isfinite(total))
      throw TransportError("barycenter: iterate lost all mass, kernel too narrow for the inputs");
    for (std::size_t s = 0; s < r; ++s)
      for (std::size_t j = 0; j < n; ++j) v[s][j] = b[j] / ktu[s][j];
    if (have_prev) {
      double diff = 0.0;
      for (std::size_t j = 0; j < n; ++j) diff += std::abs(b[j] - b_prev[j]);
      converged = diff <= opt.tol;
    }
    b_prev = b;
    have_prev = true;
  }
  return {Histogram::normalized(std::move(b)), it, converged};
}

}  // namespace meshdn::ot

#endif  // MESHDN_TRANSPORT_HPP
