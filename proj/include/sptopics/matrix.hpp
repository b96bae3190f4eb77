#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sptopics {

using Index = std::uint32_t;

// One sparse row: parallel arrays sorted by column index, no explicit zeros.
struct SparseRow {
  std::vector<Index> cols;
  std::vector<double> vals;

  std::size_t nnz() const { return cols.size(); }
  double sum() const;
  double squared_norm() const;
  // Value at `col`, 0.0 if the entry is not stored.
  double value_at(Index col) const;
};

// Dot product of two column-sorted sparse vectors.
double sparse_dot(std::span<const Index> a_cols, std::span<const double> a_vals,
                  std::span<const Index> b_cols, std::span<const double> b_vals);

// Raw term counts, one row per document. Rows must carry at least one
// positive entry; zero entries are never stored.
class TermFrequencyMatrix {
 public:
  TermFrequencyMatrix(std::size_t n_terms, std::vector<SparseRow> rows);

  std::size_t n_docs() const { return rows_.size(); }
  std::size_t n_terms() const { return n_terms_; }
  std::size_t nnz() const;
  const SparseRow& row(std::size_t i) const { return rows_[i]; }
  const std::vector<SparseRow>& rows() const { return rows_; }

  // Per-row category identifiers; used only by prediction and evaluation.
  const std::optional<std::vector<std::string>>& doc_labels() const { return doc_labels_; }
  void set_doc_labels(std::vector<std::string> labels);

 private:
  std::size_t n_terms_;
  std::vector<SparseRow> rows_;
  std::optional<std::vector<std::string>> doc_labels_;
};

// Row-normalized counts: every row sums to 1.
class HistogramMatrix {
 public:
  HistogramMatrix(std::size_t n_terms, std::vector<SparseRow> rows);

  std::size_t n_docs() const { return rows_.size(); }
  std::size_t n_terms() const { return n_terms_; }
  const SparseRow& row(std::size_t i) const { return rows_[i]; }
  const std::vector<SparseRow>& rows() const { return rows_; }

 private:
  std::size_t n_terms_;
  std::vector<SparseRow> rows_;
};

// Nonnegative per-term weights.
struct WeightVector {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  void validate() const;
};

// The weighted data matrix the solver operates on. Sparse by row; rows are
// shared read-only across threads, the kernels never mutate.
class WeightedMatrix {
 public:
  WeightedMatrix(std::size_t n_terms, std::vector<SparseRow> rows);

  static WeightedMatrix from_dense(std::size_t n_rows, std::size_t n_cols,
                                   std::span<const double> row_major);

  std::size_t n_docs() const { return rows_.size(); }
  std::size_t n_terms() const { return n_terms_; }
  std::size_t nnz() const;
  const SparseRow& row(std::size_t i) const { return rows_[i]; }
  const std::vector<SparseRow>& rows() const { return rows_; }

  // y = A x. Parallelizes over rows; each entry is a fixed-order sum, so the
  // result is identical for any thread count.
  std::vector<double> multiply(std::span<const double> x) const;

  // z = A^T y. Serial scatter over rows in row order: one fixed-order
  // accumulation per column.
  std::vector<double> transpose_multiply(std::span<const double> y) const;

  double frobenius_norm() const;
  std::vector<double> column_squared_norms() const;

  // Submatrix of the given columns, reindexed to 0..cols.size()-1.
  WeightedMatrix select_columns(std::span<const Index> cols) const;
  // Submatrix of the given rows, in the given order.
  WeightedMatrix select_rows(std::span<const Index> docs) const;

 private:
  std::size_t n_terms_;
  std::vector<SparseRow> rows_;
};

}  // namespace sptopics
