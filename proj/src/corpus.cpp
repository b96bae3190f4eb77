#include "sptopics/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sptopics/error.hpp"

namespace sptopics {

namespace {

std::string line_tag(const std::string& path, std::size_t line_no) {
  return path + ":" + std::to_string(line_no);
}

bool parse_double(std::string_view token, double& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

bool parse_size(std::string_view token, std::size_t& out) {
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

void check_count(double v, const std::string& where) {
  if (!std::isfinite(v)) fail(ErrorKind::Data, where + ": non-finite value");
  if (v < 0.0) fail(ErrorKind::Data, where + ": negative value");
}

TermFrequencyMatrix load_matrix_market(const std::string& path, std::ifstream& in) {
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line))
    fail(ErrorKind::Format, line_tag(path, 1) + ": empty file");
  ++line_no;
  {
    std::istringstream header(line);
    std::string banner, object, fmt, field, symmetry;
    header >> banner >> object >> fmt >> field >> symmetry;
    if (banner != "%%MatrixMarket" || object != "matrix" || fmt != "coordinate" ||
        field != "real" || symmetry != "general")
      fail(ErrorKind::Format,
           line_tag(path, line_no) +
               ": expected header '%%MatrixMarket matrix coordinate real general'");
  }

  // Skip comment lines, then read the size line.
  std::size_t n_docs = 0, n_terms = 0, n_entries = 0;
  for (;;) {
    if (!std::getline(in, line))
      fail(ErrorKind::Format, line_tag(path, line_no) + ": missing size line");
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    auto tokens = split_ws(t);
    if (tokens.size() != 3 || !parse_size(tokens[0], n_docs) ||
        !parse_size(tokens[1], n_terms) || !parse_size(tokens[2], n_entries))
      fail(ErrorKind::Format,
           line_tag(path, line_no) + ": size line must be 'rows cols nnz'");
    break;
  }

  std::vector<std::vector<std::pair<Index, double>>> entries(n_docs);
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    auto tokens = split_ws(t);
    std::size_t i = 0, j = 0;
    double v = 0.0;
    if (tokens.size() != 3 || !parse_size(tokens[0], i) ||
        !parse_size(tokens[1], j) || !parse_double(tokens[2], v))
      fail(ErrorKind::Format,
           line_tag(path, line_no) + ": entry line must be 'row col value'");
    if (i < 1 || i > n_docs || j < 1 || j > n_terms)
      fail(ErrorKind::Format, line_tag(path, line_no) + ": index out of range");
    check_count(v, line_tag(path, line_no));
    entries[i - 1].emplace_back(static_cast<Index>(j - 1), v);
    ++seen;
  }
  if (seen != n_entries)
    fail(ErrorKind::Format, path + ": header promises " + std::to_string(n_entries) +
                                " entries, file has " + std::to_string(seen));

  std::vector<SparseRow> rows(n_docs);
  for (std::size_t i = 0; i < n_docs; ++i) {
    auto& e = entries[i];
    std::sort(e.begin(), e.end());
    for (std::size_t k = 1; k < e.size(); ++k)
      if (e[k].first == e[k - 1].first)
        fail(ErrorKind::Format, path + ": duplicate entry for row " +
                                    std::to_string(i + 1) + ", col " +
                                    std::to_string(e[k].first + 1));
    for (auto& [c, v] : e) {
      rows[i].cols.push_back(c);
      rows[i].vals.push_back(v);
    }
  }
  return TermFrequencyMatrix(n_terms, std::move(rows));
}

TermFrequencyMatrix load_dense_csv(const std::string& path, std::ifstream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<SparseRow> rows;
  std::size_t n_terms = 0;
  bool saw_data = false;
  bool header_skipped = false;

  while (std::getline(in, line)) {
    ++line_no;
    auto t = trim(line);
    if (t.empty()) continue;

    // The optional header row is detected by a non-numeric first token.
    if (!saw_data && !header_skipped) {
      std::size_t comma = t.find(',');
      auto first = trim(t.substr(0, comma));
      double probe = 0.0;
      if (!parse_double(first, probe)) {
        header_skipped = true;
        continue;
      }
    }

    std::vector<double> values;
    std::size_t start = 0;
    for (;;) {
      std::size_t comma = t.find(',', start);
      auto tok = trim(t.substr(start, comma == std::string_view::npos
                                          ? std::string_view::npos
                                          : comma - start));
      double v = 0.0;
      if (!parse_double(tok, v))
        fail(ErrorKind::Format, line_tag(path, line_no) + ": non-numeric token");
      values.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    saw_data = true;
    if (n_terms == 0) {
      n_terms = values.size();
    } else if (values.size() != n_terms) {
      fail(ErrorKind::Format, line_tag(path, line_no) + ": expected " +
                                  std::to_string(n_terms) + " columns, found " +
                                  std::to_string(values.size()));
    }
    SparseRow r;
    for (std::size_t j = 0; j < values.size(); ++j) {
      check_count(values[j], line_tag(path, line_no));
      if (values[j] != 0.0) {
        r.cols.push_back(static_cast<Index>(j));
        r.vals.push_back(values[j]);
      }
    }
    rows.push_back(std::move(r));
  }
  if (!saw_data) fail(ErrorKind::Format, path + ": no data rows");
  return TermFrequencyMatrix(n_terms, std::move(rows));
}

}  // namespace

TermFrequencyMatrix load_matrix(const std::string& path, MatrixFormat format) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  switch (format) {
    case MatrixFormat::MatrixMarket: return load_matrix_market(path, in);
    case MatrixFormat::DenseCsv: return load_dense_csv(path, in);
  }
  fail(ErrorKind::Config, "unknown matrix format");
}

void write_matrix_market(const std::string& path, const TermFrequencyMatrix& tf) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << tf.n_docs() << " " << tf.n_terms() << " " << tf.nnz() << "\n";
  char buf[64];
  for (std::size_t i = 0; i < tf.n_docs(); ++i) {
    const SparseRow& r = tf.row(i);
    for (std::size_t e = 0; e < r.cols.size(); ++e) {
      std::snprintf(buf, sizeof(buf), "%zu %u %.17g\n", i + 1, r.cols[e] + 1,
                    r.vals[e]);
      out << buf;
    }
  }
  if (!out) fail(ErrorKind::Io, "failed writing " + path);
}

std::vector<std::string> load_labels(const std::string& path, std::size_t n_docs) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open " + path);
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto t = trim(line);
    if (t.empty() && labels.size() >= n_docs) continue;  // trailing blank lines
    labels.emplace_back(t);
  }
  if (labels.size() != n_docs)
    fail(ErrorKind::Data, path + ": " + std::to_string(labels.size()) +
                              " labels for " + std::to_string(n_docs) + " documents");
  return labels;
}

void write_labels(const std::string& path, std::span<const std::string> labels) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write " + path);
  for (const auto& l : labels) out << l << "\n";
}

HistogramMatrix normalize_rows(const TermFrequencyMatrix& tf) {
  std::vector<SparseRow> rows(tf.n_docs());
  for (std::size_t i = 0; i < tf.n_docs(); ++i) {
    const SparseRow& r = tf.row(i);
    const double total = r.sum();
    if (!(total > 0.0))
      fail(ErrorKind::EmptyDocument,
           "document row " + std::to_string(i) + " has zero total count");
    rows[i].cols = r.cols;
    rows[i].vals.resize(r.vals.size());
    for (std::size_t e = 0; e < r.vals.size(); ++e)
      rows[i].vals[e] = r.vals[e] / total;
  }
  return HistogramMatrix(tf.n_terms(), std::move(rows));
}

WeightVector compute_tfidf(const HistogramMatrix& h) {
  const std::size_t n = h.n_docs();
  if (n < 1) fail(ErrorKind::Config, "tf-idf requires at least one document");
  std::vector<std::size_t> doc_freq(h.n_terms(), 0);
  for (const auto& r : h.rows())
    for (std::size_t e = 0; e < r.cols.size(); ++e)
      if (r.vals[e] > 0.0) ++doc_freq[r.cols[e]];

  WeightVector w;
  w.weights.resize(h.n_terms());
  for (std::size_t j = 0; j < h.n_terms(); ++j) {
    const std::size_t nj = doc_freq[j];
    // nj == n gives ln(1); pinned to exactly 0 so ubiquitous terms drop out.
    // nj == 0 would be +inf; an absent term carries no signal, weight 0.
    w.weights[j] =
        (nj == 0 || nj == n)
            ? 0.0
            : std::log(static_cast<double>(n) / static_cast<double>(nj));
  }
  return w;
}

WeightVector unit_weights(std::size_t n_terms) {
  WeightVector w;
  w.weights.assign(n_terms, 1.0);
  return w;
}

WeightedMatrix apply_weights(const HistogramMatrix& h, const WeightVector& w) {
  if (w.size() != h.n_terms())
    fail(ErrorKind::Shape, "weight vector length " + std::to_string(w.size()) +
                               " does not match n_terms " +
                               std::to_string(h.n_terms()));
  w.validate();
  std::vector<SparseRow> rows(h.n_docs());
  for (std::size_t i = 0; i < h.n_docs(); ++i) {
    const SparseRow& r = h.row(i);
    for (std::size_t e = 0; e < r.cols.size(); ++e) {
      const double v = r.vals[e] * w.weights[r.cols[e]];
      if (v != 0.0) {
        rows[i].cols.push_back(r.cols[e]);
        rows[i].vals.push_back(v);
      }
    }
  }
  return WeightedMatrix(h.n_terms(), std::move(rows));
}

}  // namespace sptopics
