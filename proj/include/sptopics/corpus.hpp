#pragma once

#include <string>
#include <vector>

#include "sptopics/matrix.hpp"

namespace sptopics {

enum class MatrixFormat { MatrixMarket, DenseCsv };

// Reads a term-frequency matrix. Matrix Market coordinate files use 1-based
// indices; dense CSV has one document per line (an optional header row is
// detected by a non-numeric first token). Rejects negative or non-finite
// values and rows without a positive entry.
TermFrequencyMatrix load_matrix(const std::string& path, MatrixFormat format);

// Writes in Matrix Market coordinate format with full double precision, so a
// write/load round trip is entry-identical.
void write_matrix_market(const std::string& path, const TermFrequencyMatrix& tf);

// One category identifier per line, aligned with document rows.
std::vector<std::string> load_labels(const std::string& path, std::size_t n_docs);
void write_labels(const std::string& path, std::span<const std::string> labels);

// h^i = f^i / sum_j f^i_j.
HistogramMatrix normalize_rows(const TermFrequencyMatrix& tf);

// w_j = ln(n / n_j) with n_j the number of documents containing term j.
// Terms present in every document get weight exactly 0; so do terms present
// in none (an absent term carries no signal and must not dominate).
WeightVector compute_tfidf(const HistogramMatrix& h);

// The all-ones weighting.
WeightVector unit_weights(std::size_t n_terms);

// A = H Diag(w). Stored entries are the nonzeros of h^i restricted to the
// support of w.
WeightedMatrix apply_weights(const HistogramMatrix& h, const WeightVector& w);

}  // namespace sptopics
