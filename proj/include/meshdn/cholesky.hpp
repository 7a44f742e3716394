#ifndef MESHDN_CHOLESKY_HPP
#define MESHDN_CHOLESKY_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "meshdn/signal.hpp"
#include "meshdn/sparse.hpp"

namespace meshdn {

class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(Index pivot, double value)
      : std::runtime_error("matrix is not positive definite: pivot at index " + std::to_string(pivot) +
                           " is " + std::to_string(value)),
        pivot_(pivot) {}

  // Row/column of the failing pivot in the caller's (unpermuted) numbering.
  Index pivot() const noexcept { return pivot_; }

 private:
  Index pivot_;
};

enum class Ordering {
  Natural,
  ReverseCuthillMcKee,
  NestedDissection,
  // Natural up to 1000 unknowns, nested dissection above.
  Automatic,
};

namespace detail {

// Symmetric off-diagonal adjacency built from the lower triangle only.
struct PatternGraph {
  std::vector<Index> ptr;
  std::vector<Index> adj;

  Index size() const noexcept { return static_cast<Index>(ptr.size()) - 1; }
  Index degree(Index v) const { return ptr[v + 1] - ptr[v]; }
  std::span<const Index> neighbours(Index v) const {
    return {adj.data() + ptr[v], static_cast<std::size_t>(ptr[v + 1] - ptr[v])};
  }
};

inline PatternGraph lower_pattern_graph(const SparseMatrix& a) {
  const Index n = a.rows();
  PatternGraph g;
  g.ptr.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i)
    for (Index j : a.row_columns(i))
      if (j < i) {
        ++g.ptr[i + 1];
        ++g.ptr[j + 1];
      }
  std::partial_sum(g.ptr.begin(), g.ptr.end(), g.ptr.begin());
  g.adj.resize(static_cast<std::size_t>(g.ptr.back()));
  std::vector<Index> fill(g.ptr.begin(), g.ptr.end() - 1);
  for (Index i = 0; i < n; ++i)
    for (Index j : a.row_columns(i))
      if (j < i) {
        g.adj[fill[i]++] = j;
        g.adj[fill[j]++] = i;
      }
  return g;
}

// Breadth-first level structure restricted to vertices carrying `label`.
struct LevelStructure {
  std::vector<Index> order;        // visited vertices, level by level
  std::vector<Index> level_start;  // offsets into order, one past the end included
};

inline LevelStructure bfs_levels(const PatternGraph& g, Index root, const std::vector<Index>& label, Index region,
                                 std::vector<Index>& stamp, Index stamp_value) {
  LevelStructure ls;
  ls.order.push_back(root);
  ls.level_start.push_back(0);
  stamp[root] = stamp_value;
  std::size_t head = 0;
  while (head < ls.order.size()) {
    const std::size_t level_end = ls.order.size();
    ls.level_start.push_back(static_cast<Index>(level_end));
    for (; head < level_end; ++head) {
      for (Index w : g.neighbours(ls.order[head])) {
        if (label[w] == region && stamp[w] != stamp_value) {
          stamp[w] = stamp_value;
          ls.order.push_back(w);
        }
      }
    }
  }
  // The loop pushes one trailing empty level.
  ls.level_start.pop_back();
  ls.level_start.push_back(static_cast<Index>(ls.order.size()));
  return ls;
}

// Classic George–Liu search: restart from a minimum-degree vertex of the last
// level while the eccentricity keeps growing.
inline Index pseudo_peripheral(const PatternGraph& g, Index start, const std::vector<Index>& label, Index region,
                               std::vector<Index>& stamp, Index& stamp_counter) {
  Index root = start;
  LevelStructure ls = bfs_levels(g, root, label, region, stamp, ++stamp_counter);
  for (int pass = 0; pass < 8; ++pass) {
    const auto depth = ls.level_start.size() - 1;
    Index best = ls.order[ls.level_start[depth - 1]];
    for (Index p = ls.level_start[depth - 1]; p < ls.level_start[depth]; ++p)
      if (g.degree(ls.order[p]) < g.degree(best)) best = ls.order[p];
    LevelStructure next = bfs_levels(g, best, label, region, stamp, ++stamp_counter);
    if (next.level_start.size() <= ls.level_start.size()) break;
    root = best;
    ls = std::move(next);
  }
  return root;
}

}  // namespace detail

// perm[k] is the original index placed at position k.
inline std::vector<Index> reverse_cuthill_mckee(const SparseMatrix& a) {
  const auto g = detail::lower_pattern_graph(a);
  const Index n = g.size();
  std::vector<Index> label(static_cast<std::size_t>(n), 0), stamp(static_cast<std::size_t>(n), 0);
  Index stamp_counter = 0;
  std::vector<char> placed(static_cast<std::size_t>(n), 0);
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<Index> nbrs;
  for (Index s = 0; s < n; ++s) {
    if (placed[s]) continue;
    const Index root = detail::pseudo_peripheral(g, s, label, 0, stamp, stamp_counter);
    std::size_t head = order.size();
    order.push_back(root);
    placed[root] = 1;
    while (head < order.size()) {
      const Index v = order[head++];
      nbrs.clear();
      for (Index w : g.neighbours(v))
        if (!placed[w]) {
          placed[w] = 1;
          nbrs.push_back(w);
        }
      std::stable_sort(nbrs.begin(), nbrs.end(), [&](Index x, Index y) { return g.degree(x) < g.degree(y); });
      order.insert(order.end(), nbrs.begin(), nbrs.end());
    }
  }
  std::reverse(order.begin(), order.end());
  return order;
}

// Recursive bisection with breadth-first level-set separators: the middle
// level of a rooted level structure splits a connected region into the
// levels above and below it. Parts are ordered first, separators last.
inline std::vector<Index> nested_dissection(const SparseMatrix& a, Index leaf_size = 8) {
  const auto g = detail::lower_pattern_graph(a);
  const Index n = g.size();
  std::vector<Index> label(static_cast<std::size_t>(n), 1);
  std::vector<Index> stamp(static_cast<std::size_t>(n), 0);
  Index stamp_counter = 0;
  Index next_label = 2;
  std::vector<Index> order;
  order.reserve(static_cast<std::size_t>(n));
  constexpr Index done = 0;

  auto dissect = [&](auto&& self, std::vector<Index> nodes, Index region) -> void {
    if (static_cast<Index>(nodes.size()) <= leaf_size) {
      for (Index v : nodes) label[v] = done;
      order.insert(order.end(), nodes.begin(), nodes.end());
      return;
    }
    auto ls = detail::bfs_levels(g, nodes.front(), label, region, stamp, ++stamp_counter);
    if (ls.order.size() < nodes.size()) {
      // Disconnected: order each component on its own.
      const Index seen = stamp_counter;
      std::vector<std::vector<Index>> parts{ls.order};
      for (Index v : nodes) {
        if (stamp[v] == seen || label[v] != region) continue;
        auto comp = detail::bfs_levels(g, v, label, region, stamp, seen);
        parts.push_back(std::move(comp.order));
      }
      for (auto& part : parts) {
        const Index sub = next_label++;
        for (Index v : part) label[v] = sub;
        self(self, std::move(part), sub);
      }
      return;
    }
    const Index root = detail::pseudo_peripheral(g, nodes.front(), label, region, stamp, stamp_counter);
    ls = detail::bfs_levels(g, root, label, region, stamp, ++stamp_counter);
    const auto depth = static_cast<Index>(ls.level_start.size()) - 1;
    if (depth < 3) {
      for (Index v : nodes) label[v] = done;
      order.insert(order.end(), nodes.begin(), nodes.end());
      return;
    }
    Index split = 1;
    Index best_imbalance = static_cast<Index>(nodes.size());
    for (Index m = 1; m < depth - 1; ++m) {
      const Index below = ls.level_start[m];
      const Index above = ls.level_start[depth] - ls.level_start[m + 1];
      const Index imbalance = below > above ? below - above : above - below;
      if (imbalance < best_imbalance) {
        best_imbalance = imbalance;
        split = m;
      }
    }
    const Index part_a = next_label++, part_b = next_label++, sep = next_label++;
    std::vector<Index> a_nodes, b_nodes, s_nodes;
    for (Index l = 0; l < depth; ++l) {
      const Index tag = l < split ? part_a : (l == split ? sep : part_b);
      for (Index p = ls.level_start[l]; p < ls.level_start[l + 1]; ++p) label[ls.order[p]] = tag;
    }
    // Separator vertices with no neighbour on the far side belong to part A.
    for (Index p = ls.level_start[split]; p < ls.level_start[split + 1]; ++p) {
      const Index v = ls.order[p];
      bool touches_b = false;
      for (Index w : g.neighbours(v)) touches_b = touches_b || label[w] == part_b;
      if (touches_b)
        s_nodes.push_back(v);
      else
        label[v] = part_a;
    }
    for (Index p = 0; p < ls.level_start[depth]; ++p) {
      const Index v = ls.order[p];
      if (label[v] == part_a) a_nodes.push_back(v);
      if (label[v] == part_b) b_nodes.push_back(v);
    }
    for (Index v : s_nodes) label[v] = done;
    self(self, std::move(a_nodes), part_a);
    self(self, std::move(b_nodes), part_b);
    order.insert(order.end(), s_nodes.begin(), s_nodes.end());
  };

  std::vector<Index> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), Index{0});
  if (n > 0) dissect(dissect, std::move(all), 1);
  return order;
}

// Elimination tree of a symmetric matrix given as the upper triangle in
// compressed-column form; parent[j] == -1 marks a root.
inline std::vector<Index> elimination_tree(std::span<const Index> col_ptr, std::span<const Index> row_idx) {
  const Index n = static_cast<Index>(col_ptr.size()) - 1;
  std::vector<Index> parent(static_cast<std::size_t>(n), -1), ancestor(static_cast<std::size_t>(n), -1);
  for (Index k = 0; k < n; ++k) {
    for (Index p = col_ptr[k]; p < col_ptr[k + 1]; ++p) {
      for (Index i = row_idx[p]; i != -1 && i < k;) {
        const Index next = ancestor[i];
        ancestor[i] = k;  // path compression
        if (next == -1) parent[i] = k;
        i = next;
      }
    }
  }
  return parent;
}

// A = P⁻¹·L·Lᵀ·P⁻ᵀ, with L lower triangular and a positive diagonal.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  CholeskyFactor(std::vector<Index> perm, std::vector<Index> col_ptr, std::vector<Index> row_idx,
                 std::vector<double> values)
      : perm_(std::move(perm)), col_ptr_(std::move(col_ptr)), row_idx_(std::move(row_idx)),
        values_(std::move(values)) {
    inverse_.resize(perm_.size());
    for (std::size_t k = 0; k < perm_.size(); ++k) inverse_[perm_[k]] = static_cast<Index>(k);
  }

  Index size() const noexcept { return static_cast<Index>(perm_.size()); }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

  // perm[k] = original row placed at position k.
  const std::vector<Index>& permutation() const noexcept { return perm_; }

  // The factor of P·A·Pᵀ as a CSR matrix.
  SparseMatrix lower() const {
    const Index n = size();
    return SparseMatrix(n, n, col_ptr_, row_idx_, values_).transpose();
  }

  double diagonal(Index k) const { return values_[col_ptr_[k]]; }

  // Forward then backward substitution on all three columns at once.
  SignalMatrix solve(const SignalMatrix& b) const {
    const Index n = size();
    if (static_cast<Index>(b.size()) != n)
      throw std::invalid_argument("cholesky solve: right-hand side has " + std::to_string(b.size()) +
                                  " rows, factor has " + std::to_string(n));
    SignalMatrix y(b.size());
    for (Index k = 0; k < n; ++k) y[k] = b[perm_[k]];
    for (Index j = 0; j < n; ++j) {
      const double inv = 1.0 / values_[col_ptr_[j]];
      Vec3& yj = y[j];
      yj = {yj[0] * inv, yj[1] * inv, yj[2] * inv};
      for (Index p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) {
        Vec3& yi = y[row_idx_[p]];
        const double l = values_[p];
        yi[0] -= l * yj[0];
        yi[1] -= l * yj[1];
        yi[2] -= l * yj[2];
      }
    }
    for (Index j = n - 1; j >= 0; --j) {
      double s0 = y[j][0], s1 = y[j][1], s2 = y[j][2];
      for (Index p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) {
        const Vec3& yi = y[row_idx_[p]];
        const double l = values_[p];
        s0 -= l * yi[0];
        s1 -= l * yi[1];
        s2 -= l * yi[2];
      }
      const double inv = 1.0 / values_[col_ptr_[j]];
      y[j] = {s0 * inv, s1 * inv, s2 * inv};
    }
    SignalMatrix x(b.size());
    for (Index k = 0; k < n; ++k) x[perm_[k]] = y[k];
    return x;
  }

  std::vector<double> solve(std::span<const double> b) const {
    const Index n = size();
    if (static_cast<Index>(b.size()) != n) throw std::invalid_argument("cholesky solve: size mismatch");
    std::vector<double> y(b.size());
    for (Index k = 0; k < n; ++k) y[k] = b[perm_[k]];
    for (Index j = 0; j < n; ++j) {
      y[j] /= values_[col_ptr_[j]];
      for (Index p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) y[row_idx_[p]] -= values_[p] * y[j];
    }
    for (Index j = n - 1; j >= 0; --j) {
      double s = y[j];
      for (Index p = col_ptr_[j] + 1; p < col_ptr_[j + 1]; ++p) s -= values_[p] * y[row_idx_[p]];
      y[j] = s / values_[col_ptr_[j]];
    }
    std::vector<double> x(b.size());
    for (Index k = 0; k < n; ++k) x[perm_[k]] = y[k];
    return x;
  }

 private:
  std::vector<Index> perm_;
  std::vector<Index> inverse_;
  // L in compressed-column form; the diagonal leads each column.
  std::vector<Index> col_ptr_;
  std::vector<Index> row_idx_;
  std::vector<double> values_;
};

inline std::vector<Index> fill_reducing_order(const SparseMatrix& a, Ordering ordering) {
  if (ordering == Ordering::Automatic)
    ordering = a.rows() > 1000 ? Ordering::NestedDissection : Ordering::Natural;
  switch (ordering) {
    case Ordering::ReverseCuthillMcKee:
      return reverse_cuthill_mckee(a);
    case Ordering::NestedDissection:
      return nested_dissection(a);
    default: {
      std::vector<Index> perm(static_cast<std::size_t>(a.rows()));
      std::iota(perm.begin(), perm.end(), Index{0});
      return perm;
    }
  }
}

// Up-looking sparse Cholesky. Reads only the lower triangle (j ≤ i) of A.
// Row k of the factor is found by a sparse triangular solve whose pattern is
// the reach of A's column k in the elimination tree.
inline CholeskyFactor sparse_cholesky(const SparseMatrix& a, Ordering ordering = Ordering::Automatic) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sparse_cholesky: matrix is not square");
  const Index n = a.rows();
  std::vector<Index> perm = fill_reducing_order(a, ordering);
  std::vector<Index> inv(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) inv[perm[k]] = k;

  // C = P·A·Pᵀ, upper triangle, compressed by column.
  std::vector<Index> c_ptr(static_cast<std::size_t>(n) + 1, 0);
  for (Index i = 0; i < n; ++i)
    for (Index j : a.row_columns(i))
      if (j <= i) ++c_ptr[std::max(inv[i], inv[j]) + 1];
  std::partial_sum(c_ptr.begin(), c_ptr.end(), c_ptr.begin());
  std::vector<Index> c_row(static_cast<std::size_t>(c_ptr.back()));
  std::vector<double> c_val(c_row.size());
  {
    std::vector<Index> fill(c_ptr.begin(), c_ptr.end() - 1);
    for (Index i = 0; i < n; ++i) {
      const auto cols = a.row_columns(i);
      const auto vals = a.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        if (cols[k] > i) continue;
        const Index r = inv[i], c = inv[cols[k]];
        const Index q = fill[std::max(r, c)]++;
        c_row[q] = std::min(r, c);
        c_val[q] = vals[k];
      }
    }
  }

  const auto parent = elimination_tree(c_ptr, c_row);

  // Row pattern of L(k, :) in topological order, written to stack[top..n).
  std::vector<Index> mark(static_cast<std::size_t>(n), -1), stack(static_cast<std::size_t>(n));
  auto ereach = [&](Index k) -> Index {
    Index top = n;
    mark[k] = k;
    for (Index p = c_ptr[k]; p < c_ptr[k + 1]; ++p) {
      Index i = c_row[p];
      if (i > k) continue;
      Index len = 0;
      for (; mark[i] != k; i = parent[i]) {
        stack[len++] = i;
        mark[i] = k;
      }
      while (len > 0) stack[--top] = stack[--len];
    }
    return top;
  };

  std::vector<Index> col_ptr(static_cast<std::size_t>(n) + 1, 0);
  for (Index k = 0; k < n; ++k) {
    const Index top = ereach(k);
    for (Index p = top; p < n; ++p) ++col_ptr[stack[p] + 1];
    ++col_ptr[k + 1];
  }
  std::partial_sum(col_ptr.begin(), col_ptr.end(), col_ptr.begin());
  std::fill(mark.begin(), mark.end(), -1);

  std::vector<Index> row_idx(static_cast<std::size_t>(col_ptr.back()));
  std::vector<double> values(row_idx.size());
  std::vector<Index> next(col_ptr.begin(), col_ptr.end() - 1);
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);

  for (Index k = 0; k < n; ++k) {
    const Index top = ereach(k);
    for (Index p = c_ptr[k]; p < c_ptr[k + 1]; ++p)
      if (c_row[p] <= k) x[c_row[p]] = c_val[p];
    double d = x[k];
    x[k] = 0.0;
    for (Index t = top; t < n; ++t) {
      const Index j = stack[t];
      const double lkj = x[j] / values[col_ptr[j]];
      x[j] = 0.0;
      for (Index p = col_ptr[j] + 1; p < next[j]; ++p) x[row_idx[p]] -= values[p] * lkj;
      d -= lkj * lkj;
      const Index q = next[j]++;
      row_idx[q] = k;
      values[q] = lkj;
    }
    if (!(d > 0.0)) throw NotPositiveDefinite(perm[k], d);
    const Index q = next[k]++;
    row_idx[q] = k;
    values[q] = std::sqrt(d);
  }
  return CholeskyFactor(std::move(perm), std::move(col_ptr), std::move(row_idx), std::move(values));
}

inline SignalMatrix cholesky_solve(const CholeskyFactor& factor, const SignalMatrix& b) { return factor.solve(b); }

}  // namespace meshdn

#endif  // MESHDN_CHOLESKY_HPP
