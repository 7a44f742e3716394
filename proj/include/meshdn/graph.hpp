#ifndef MESHDN_GRAPH_HPP
#define MESHDN_GRAPH_HPP

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "meshdn/mesh.hpp"
#include "meshdn/sparse.hpp"

namespace meshdn {

struct DegreeVector {
  std::vector<Index> d;

  std::size_t size() const noexcept { return d.size(); }
  Index operator[](std::size_t i) const { return d[i]; }
};

// Symmetric 0/1 adjacency with zero diagonal. Mesh edges are undirected, so
// each edge {i, j} sets both W(i,j) and W(j,i).
inline SparseMatrix adjacency(const EdgeSet& edges) {
  const auto n = static_cast<Index>(edges.vertex_count);
  std::vector<Index> row_ptr(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [i, j] : edges.edges) {
    if (i >= j || static_cast<Index>(j) >= n) throw std::invalid_argument("adjacency: invalid edge");
    ++row_ptr[i + 1];
    ++row_ptr[j + 1];
  }
  for (Index i = 0; i < n; ++i) row_ptr[i + 1] += row_ptr[i];
  std::vector<Index> fill(row_ptr.begin(), row_ptr.end() - 1);
  std::vector<Index> col_idx(static_cast<std::size_t>(row_ptr.back()));
  // Edges are sorted by (i, j). Row r first receives its lower neighbours
  // (r as the j of earlier pairs, in increasing i) and then its upper ones,
  // but the two streams interleave, so sort each row afterwards.
  for (const auto& [i, j] : edges.edges) {
    col_idx[fill[i]++] = j;
    col_idx[fill[j]++] = i;
  }
  for (Index r = 0; r < n; ++r) std::sort(col_idx.begin() + row_ptr[r], col_idx.begin() + row_ptr[r + 1]);
  std::vector<double> values(col_idx.size(), 1.0);
  return SparseMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

inline SparseMatrix adjacency(const Mesh& mesh) { return adjacency(extract_edges(mesh)); }

inline DegreeVector degrees(const SparseMatrix& w) {
  DegreeVector out;
  out.d.resize(static_cast<std::size_t>(w.rows()));
  for (Index i = 0; i < w.rows(); ++i) out.d[i] = w.row_ptr()[i + 1] - w.row_ptr()[i];
  return out;
}

// D⁻¹W. A row with no neighbours becomes the unit row e_i so the operator
// stays row-stochastic and leaves isolated vertices in place.
inline SparseMatrix normalized_adjacency(const SparseMatrix& w, const DegreeVector& d) {
  if (static_cast<Index>(d.size()) != w.rows()) throw std::invalid_argument("normalized_adjacency: size mismatch");
  std::vector<Index> row_ptr(static_cast<std::size_t>(w.rows()) + 1, 0);
  std::vector<Index> col_idx;
  std::vector<double> values;
  col_idx.reserve(w.nnz());
  values.reserve(w.nnz());
  for (Index i = 0; i < w.rows(); ++i) {
    if (d[i] == 0) {
      col_idx.push_back(i);
      values.push_back(1.0);
    } else {
      const double inv = 1.0 / static_cast<double>(d[i]);
      const auto cols = w.row_columns(i);
      const auto vals = w.row_values(i);
      for (std::size_t k = 0; k < cols.size(); ++k) {
        col_idx.push_back(cols[k]);
        values.push_back(vals[k] * inv);
      }
    }
    row_ptr[i + 1] = static_cast<Index>(col_idx.size());
  }
  return SparseMatrix(w.rows(), w.cols(), std::move(row_ptr), std::move(col_idx), std::move(values));
}

// L = D − W.
inline SparseMatrix laplacian(const SparseMatrix& w, const DegreeVector& d) {
  if (static_cast<Index>(d.size()) != w.rows()) throw std::invalid_argument("laplacian: size mismatch");
  std::vector<Triplet> diag;
  diag.reserve(d.size());
  for (Index i = 0; i < w.rows(); ++i)
    if (d[i] != 0) diag.push_back({i, i, static_cast<double>(d[i])});
  return add(SparseMatrix::from_triplets(w.rows(), w.cols(), std::move(diag)), w, 1.0, -1.0);
}

// L̃ = I − W̃.
inline SparseMatrix normalized_laplacian(const SparseMatrix& w_normalized) {
  return add(SparseMatrix::identity(w_normalized.rows()), w_normalized, 1.0, -1.0);
}

// I + μL, the Sobolev system matrix.
inline SparseMatrix identity_plus(const SparseMatrix& l, double mu) {
  return add(SparseMatrix::identity(l.rows()), l, 1.0, mu);
}

}  // namespace meshdn

#endif  // MESHDN_GRAPH_HPP
