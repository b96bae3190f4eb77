#include "sptopics/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "sptopics/error.hpp"

namespace sptopics {

double SparseRow::sum() const {
  double acc = 0.0;
  for (double v : vals) acc += v;
  return acc;
}

double SparseRow::squared_norm() const {
  double acc = 0.0;
  for (double v : vals) acc += v * v;
  return acc;
}

double SparseRow::value_at(Index col) const {
  auto it = std::lower_bound(cols.begin(), cols.end(), col);
  if (it == cols.end() || *it != col) return 0.0;
  return vals[static_cast<std::size_t>(it - cols.begin())];
}

double sparse_dot(std::span<const Index> a_cols, std::span<const double> a_vals,
                  std::span<const Index> b_cols, std::span<const double> b_vals) {
  double acc = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a_cols.size() && j < b_cols.size()) {
    if (a_cols[i] < b_cols[j]) {
      ++i;
    } else if (a_cols[i] > b_cols[j]) {
      ++j;
    } else {
      acc += a_vals[i] * b_vals[j];
      ++i;
      ++j;
    }
  }
  return acc;
}

namespace {

void check_rows(const std::vector<SparseRow>& rows, std::size_t n_terms,
                bool require_positive_row) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SparseRow& r = rows[i];
    if (r.cols.size() != r.vals.size())
      fail(ErrorKind::Shape, "row " + std::to_string(i) +
                                 ": column/value arrays differ in length");
    bool has_positive = false;
    for (std::size_t e = 0; e < r.cols.size(); ++e) {
      if (r.cols[e] >= n_terms)
        fail(ErrorKind::Shape, "row " + std::to_string(i) + ": column " +
                                   std::to_string(r.cols[e]) + " out of range");
      if (e > 0 && r.cols[e] <= r.cols[e - 1])
        fail(ErrorKind::Shape,
             "row " + std::to_string(i) + ": columns not strictly increasing");
      if (!std::isfinite(r.vals[e]))
        fail(ErrorKind::Data,
             "row " + std::to_string(i) + ": non-finite value");
      if (r.vals[e] > 0.0) has_positive = true;
    }
    if (require_positive_row && !has_positive)
      fail(ErrorKind::EmptyDocument,
           "document row " + std::to_string(i) + " has no positive entry");
  }
}

}  // namespace

TermFrequencyMatrix::TermFrequencyMatrix(std::size_t n_terms,
                                         std::vector<SparseRow> rows)
    : n_terms_(n_terms), rows_(std::move(rows)) {
  // Counts must be nonnegative; explicit zeros are dropped rather than stored.
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    SparseRow& r = rows_[i];
    for (double v : r.vals)
      if (!(v >= 0.0) || !std::isfinite(v))
        fail(ErrorKind::Data, "row " + std::to_string(i) +
                                  ": negative or non-finite count");
    std::size_t kept = 0;
    for (std::size_t e = 0; e < r.cols.size(); ++e) {
      if (r.vals[e] != 0.0) {
        r.cols[kept] = r.cols[e];
        r.vals[kept] = r.vals[e];
        ++kept;
      }
    }
    r.cols.resize(kept);
    r.vals.resize(kept);
  }
  check_rows(rows_, n_terms_, /*require_positive_row=*/true);
}

std::size_t TermFrequencyMatrix::nnz() const {
  std::size_t acc = 0;
  for (const auto& r : rows_) acc += r.nnz();
  return acc;
}

void TermFrequencyMatrix::set_doc_labels(std::vector<std::string> labels) {
  if (labels.size() != rows_.size())
    fail(ErrorKind::Shape, "label count " + std::to_string(labels.size()) +
                               " does not match document count " +
                               std::to_string(rows_.size()));
  doc_labels_ = std::move(labels);
}

HistogramMatrix::HistogramMatrix(std::size_t n_terms, std::vector<SparseRow> rows)
    : n_terms_(n_terms), rows_(std::move(rows)) {
  check_rows(rows_, n_terms_, /*require_positive_row=*/true);
  for (std::size_t i = 0; i < rows_.size(); ++i)
    if (std::abs(rows_[i].sum() - 1.0) > 1e-12)
      fail(ErrorKind::Data,
           "histogram row " + std::to_string(i) + " does not sum to 1");
}

void WeightVector::validate() const {
  for (double w : weights)
    if (!(w >= 0.0) || !std::isfinite(w))
      fail(ErrorKind::Data, "weight vector has a negative or non-finite entry");
}

WeightedMatrix::WeightedMatrix(std::size_t n_terms, std::vector<SparseRow> rows)
    : n_terms_(n_terms), rows_(std::move(rows)) {
  check_rows(rows_, n_terms_, /*require_positive_row=*/false);
}

WeightedMatrix WeightedMatrix::from_dense(std::size_t n_rows, std::size_t n_cols,
                                          std::span<const double> row_major) {
  if (row_major.size() != n_rows * n_cols)
    fail(ErrorKind::Shape, "dense buffer does not match the stated shape");
  std::vector<SparseRow> rows(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) {
    for (std::size_t j = 0; j < n_cols; ++j) {
      const double v = row_major[i * n_cols + j];
      if (v != 0.0) {
        rows[i].cols.push_back(static_cast<Index>(j));
        rows[i].vals.push_back(v);
      }
    }
  }
  return WeightedMatrix(n_cols, std::move(rows));
}

std::size_t WeightedMatrix::nnz() const {
  std::size_t acc = 0;
  for (const auto& r : rows_) acc += r.nnz();
  return acc;
}

std::vector<double> WeightedMatrix::multiply(std::span<const double> x) const {
  if (x.size() != n_terms_)
    fail(ErrorKind::Shape, "multiply: vector length does not match n_terms");
  const auto n = static_cast<std::ptrdiff_t>(rows_.size());
  std::vector<double> y(rows_.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const SparseRow& r = rows_[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (std::size_t e = 0; e < r.cols.size(); ++e) acc += r.vals[e] * x[r.cols[e]];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> WeightedMatrix::transpose_multiply(
    std::span<const double> y) const {
  if (y.size() != rows_.size())
    fail(ErrorKind::Shape, "transpose_multiply: vector length does not match n_docs");
  std::vector<double> z(n_terms_, 0.0);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const SparseRow& r = rows_[i];
    const double yi = y[i];
    if (yi == 0.0) continue;
    for (std::size_t e = 0; e < r.cols.size(); ++e) z[r.cols[e]] += r.vals[e] * yi;
  }
  return z;
}

double WeightedMatrix::frobenius_norm() const {
  double acc = 0.0;
  for (const auto& r : rows_) acc += r.squared_norm();
  return std::sqrt(acc);
}

std::vector<double> WeightedMatrix::column_squared_norms() const {
  std::vector<double> norms(n_terms_, 0.0);
  for (const auto& r : rows_)
    for (std::size_t e = 0; e < r.cols.size(); ++e)
      norms[r.cols[e]] += r.vals[e] * r.vals[e];
  return norms;
}

WeightedMatrix WeightedMatrix::select_columns(std::span<const Index> cols) const {
  std::vector<Index> sorted(cols.begin(), cols.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= n_terms_)
      fail(ErrorKind::Shape, "select_columns: column out of range");
    if (i > 0 && sorted[i] == sorted[i - 1])
      fail(ErrorKind::Shape, "select_columns: duplicate column");
  }
  std::vector<SparseRow> out(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    const SparseRow& r = rows_[i];
    std::size_t e = 0;
    for (std::size_t c = 0; c < sorted.size(); ++c) {
      while (e < r.cols.size() && r.cols[e] < sorted[c]) ++e;
      if (e < r.cols.size() && r.cols[e] == sorted[c]) {
        out[i].cols.push_back(static_cast<Index>(c));
        out[i].vals.push_back(r.vals[e]);
      }
    }
  }
  return WeightedMatrix(sorted.size(), std::move(out));
}

WeightedMatrix WeightedMatrix::select_rows(std::span<const Index> docs) const {
  std::vector<SparseRow> out;
  out.reserve(docs.size());
  for (Index d : docs) {
    if (d >= rows_.size()) fail(ErrorKind::Shape, "select_rows: row out of range");
    out.push_back(rows_[d]);
  }
  return WeightedMatrix(n_terms_, std::move(out));
}

}  // namespace sptopics
