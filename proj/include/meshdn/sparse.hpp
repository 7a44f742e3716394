#ifndef MESHDN_SPARSE_HPP
#define MESHDN_SPARSE_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "meshdn/signal.hpp"

namespace meshdn {

using Index = std::int64_t;

struct Triplet {
  Index row;
  Index col;
  double value;
};

// Compressed sparse row matrix. Column indices are strictly increasing within
// each row and no stored value is exactly zero.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  // Takes ownership of CSR arrays and checks every structural invariant.
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_ptr, std::vector<Index> col_idx,
               std::vector<double> values)
      : rows_(rows), cols_(cols), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    if (rows_ < 0 || cols_ < 0) throw std::invalid_argument("SparseMatrix: negative dimension");
    if (row_ptr_.size() != static_cast<std::size_t>(rows_) + 1)
      throw std::invalid_argument("SparseMatrix: row_ptr must have rows+1 entries");
    if (row_ptr_.front() != 0) throw std::invalid_argument("SparseMatrix: row_ptr[0] must be 0");
    if (col_idx_.size() != values_.size() || static_cast<Index>(col_idx_.size()) != row_ptr_.back())
      throw std::invalid_argument("SparseMatrix: row_ptr[rows] must equal nnz");
    for (Index i = 0; i < rows_; ++i) {
      if (row_ptr_[i + 1] < row_ptr_[i]) throw std::invalid_argument("SparseMatrix: row_ptr not nondecreasing");
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        if (col_idx_[p] < 0 || col_idx_[p] >= cols_)
          throw std::invalid_argument("SparseMatrix: column index out of range in row " + std::to_string(i));
        if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
          throw std::invalid_argument("SparseMatrix: columns not strictly increasing in row " + std::to_string(i));
        if (values_[p] == 0.0)
          throw std::invalid_argument("SparseMatrix: explicit zero stored in row " + std::to_string(i));
      }
    }
  }

  // Duplicates are summed; entries that sum to zero are dropped.
  static SparseMatrix from_triplets(Index rows, Index cols, std::vector<Triplet> triplets) {
    std::sort(triplets.begin(), triplets.end(),
              [](const Triplet& a, const Triplet& b) { return std::tie(a.row, a.col) < std::tie(b.row, b.col); });
    std::vector<Index> row_ptr(static_cast<std::size_t>(rows) + 1, 0);
    std::vector<Index> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    std::size_t k = 0;
    for (Index i = 0; i < rows; ++i) {
      while (k < triplets.size() && triplets[k].row == i) {
        const Index j = triplets[k].col;
        double sum = 0.0;
        for (; k < triplets.size() && triplets[k].row == i && triplets[k].col == j; ++k) sum += triplets[k].value;
        if (sum != 0.0) {
          col_idx.push_back(j);
          values.push_back(sum);
        }
      }
      row_ptr[i + 1] = static_cast<Index>(col_idx.size());
    }
    if (k != triplets.size()) throw std::invalid_argument("from_triplets: row index out of range");
    return SparseMatrix(rows, cols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  static SparseMatrix identity(Index n) {
    std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1);
    std::iota(row_ptr.begin(), row_ptr.end(), Index{0});
    std::vector<Index> col_idx(static_cast<std::size_t>(n));
    std::iota(col_idx.begin(), col_idx.end(), Index{0});
    return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<double>(n, 1.0));
  }

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

  const std::vector<Index>& row_ptr() const noexcept { return row_ptr_; }
  const std::vector<Index>& col_idx() const noexcept { return col_idx_; }
  const std::vector<double>& values() const noexcept { return values_; }

  std::span<const Index> row_columns(Index i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  std::span<const double> row_values(Index i) const {
    return {values_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }

  // Stored value at (i, j), or 0.
  double at(Index i, Index j) const {
    const auto cols = row_columns(i);
    const auto it = std::lower_bound(cols.begin(), cols.end(), j);
    if (it == cols.end() || *it != j) return 0.0;
    return values_[row_ptr_[i] + (it - cols.begin())];
  }

  SparseMatrix transpose() const {
    std::vector<Index> row_ptr(static_cast<std::size_t>(cols_) + 1, 0);
    for (Index c : col_idx_) ++row_ptr[c + 1];
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    std::vector<Index> next(row_ptr.begin(), row_ptr.end() - 1);
    std::vector<Index> col_idx(col_idx_.size());
    std::vector<double> values(values_.size());
    for (Index i = 0; i < rows_; ++i) {
      for (Index p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
        const Index q = next[col_idx_[p]]++;
        col_idx[q] = i;
        values[q] = values_[p];
      }
    }
    return SparseMatrix(cols_, rows_, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  std::vector<double> row_sums() const {
    std::vector<double> out(static_cast<std::size_t>(rows_), 0.0);
    for (Index i = 0; i < rows_; ++i)
      for (double v : row_values(i)) out[i] += v;
    return out;
  }

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
  std::vector<double> values_;
};

// alpha·A + beta·B for equal-shape matrices; exact zeros are dropped.
inline SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha = 1.0, double beta = 1.0) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("add: shape mismatch");
  std::vector<Index> row_ptr(static_cast<std::size_t>(a.rows()) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(a.nnz() + b.nnz());
  values.reserve(a.nnz() + b.nnz());
  auto emit = [&](Index j, double v) {
    if (v != 0.0) {
      col_idx.push_back(j);
      values.push_back(v);
    }
  };
  for (Index i = 0; i < a.rows(); ++i) {
    const auto ac = a.row_columns(i), bc = b.row_columns(i);
    const auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        emit(ac[p], alpha * av[p]);
        ++p;
      } else if (p == ac.size() || bc[q] < ac[p]) {
        emit(bc[q], beta * bv[q]);
        ++q;
      } else {
        emit(ac[p], alpha * av[p] + beta * bv[q]);
        ++p;
        ++q;
      }
    }
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

// Sparse × dense n×3 product. Each output row accumulates in column-index
// order, so results are bit-reproducible.
inline SignalMatrix spmm(const SparseMatrix& a, const SignalMatrix& x) {
  if (static_cast<Index>(x.size()) != a.cols())
    throw std::invalid_argument("spmm: matrix has " + std::to_string(a.cols()) + " columns but signal has " +
                                std::to_string(x.size()) + " rows");
  SignalMatrix y(static_cast<std::size_t>(a.rows()));
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& va = a.values();
  for (Index i = 0; i < a.rows(); ++i) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (Index p = rp[i]; p < rp[i + 1]; ++p) {
      const Vec3& r = x[ci[p]];
      s0 += va[p] * r[0];
      s1 += va[p] * r[1];
      s2 += va[p] * r[2];
    }
    y[i] = {s0, s1, s2};
  }
  return y;
}

}  // namespace meshdn

#endif  // MESHDN_SPARSE_HPP
