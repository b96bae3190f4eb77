#include "sptopics/predict.hpp"

#include <algorithm>
#include <cstddef>
#include <exception>
#include <set>
#include <string>

#include "sptopics/corpus.hpp"
#include "sptopics/error.hpp"
#include "sptopics/topics.hpp"

namespace sptopics {

namespace {

void check_indices(std::span<const Index> docs, std::size_t n_docs,
                   const char* name) {
  std::vector<Index> sorted(docs.begin(), docs.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i] >= n_docs)
      fail(ErrorKind::Shape, std::string(name) + " set references document " +
                                 std::to_string(sorted[i]) + " of " +
                                 std::to_string(n_docs));
    if (i > 0 && sorted[i] == sorted[i - 1])
      fail(ErrorKind::Data, std::string(name) + " set lists document " +
                                std::to_string(sorted[i]) + " twice");
  }
}

const std::string& label_of(std::span<const std::string> labels, Index doc) {
  const std::string& label = labels[doc];
  if (label.empty())
    fail(ErrorKind::Data, "document " + std::to_string(doc) + " has no label");
  return label;
}

std::vector<Index> sorted_copy(std::span<const Index> docs) {
  std::vector<Index> out(docs.begin(), docs.end());
  std::sort(out.begin(), out.end());
  return out;
}

// L1 distance between two sparse rows over the columns allowed by `mask`
// (empty mask = all columns).
double l1_distance(const SparseRow& a, const SparseRow& b,
                   std::span<const char> mask) {
  const bool all = mask.empty();
  double dist = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.nnz() || ib < b.nnz()) {
    Index col;
    double diff;
    if (ib == b.nnz() || (ia < a.nnz() && a.cols[ia] < b.cols[ib])) {
      col = a.cols[ia];
      diff = a.vals[ia];
      ++ia;
    } else if (ia == a.nnz() || b.cols[ib] < a.cols[ia]) {
      col = b.cols[ib];
      diff = b.vals[ib];
      ++ib;
    } else {
      col = a.cols[ia];
      diff = a.vals[ia] - b.vals[ib];
      ++ia;
      ++ib;
    }
    if (all || mask[col]) dist += std::abs(diff);
  }
  return dist;
}

WeightedMatrix weighted_rows(const HistogramMatrix& h, const WeightVector& w,
                             std::span<const Index> docs) {
  return apply_weights(h, w).select_rows(docs);
}

SolverConfig with_shape(const SolverConfig& config, std::size_t s,
                        std::size_t k) {
  SolverConfig c = config;
  c.sparsity = s;
  c.n_components = k;
  return c;
}

std::set<Index> union_of_supports(std::span<const SparseComponent> comps) {
  std::set<Index> support;
  for (const auto& c : comps) support.insert(c.support.begin(), c.support.end());
  return support;
}

}  // namespace

void LabeledSplit::validate(std::size_t n_docs) const {
  if (labels.size() != n_docs)
    fail(ErrorKind::Shape, "expected " + std::to_string(n_docs) +
                               " labels, got " + std::to_string(labels.size()));
  check_indices(learn, n_docs, "learning");
  check_indices(match, n_docs, "matching");
  check_indices(test, n_docs, "testing");

  std::set<Index> match_set(match.begin(), match.end());
  for (Index t : test)
    if (match_set.count(t))
      fail(ErrorKind::Data, "document " + std::to_string(t) +
                                " appears in both matching and testing sets");

  std::set<std::string> match_cats;
  for (Index m : match) match_cats.insert(label_of(labels, m));
  for (Index t : test) {
    const std::string& cat = label_of(labels, t);
    if (!match_cats.count(cat))
      fail(ErrorKind::Data,
           "test category '" + cat + "' has no matching documents");
  }
}

PredictionReport l1_nearest(const HistogramMatrix& h, const LabeledSplit& split,
                            const SupportSet* restrict) {
  split.validate(h.n_docs());
  if (split.match.empty())
    fail(ErrorKind::Config, "matching set is empty");
  if (split.test.empty())
    fail(ErrorKind::Config, "testing set is empty");

  std::vector<char> mask;
  if (restrict != nullptr) {
    if (restrict->indices.empty())
      fail(ErrorKind::Config, "support restriction is empty");
    mask.assign(h.n_terms(), 0);
    for (Index j : restrict->indices) {
      if (j >= h.n_terms())
        fail(ErrorKind::Shape, "support index " + std::to_string(j) +
                                   " outside the " +
                                   std::to_string(h.n_terms()) + "-term range");
      mask[j] = 1;
    }
  }

  const std::vector<Index> match = sorted_copy(split.match);
  const std::vector<Index> test = sorted_copy(split.test);

  std::vector<std::pair<Index, Index>> assignments(test.size());
  std::vector<std::exception_ptr> errors(test.size());
  const auto nt = static_cast<std::ptrdiff_t>(test.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ti = 0; ti < nt; ++ti) {
    try {
      const Index t = test[static_cast<std::size_t>(ti)];
      const SparseRow& row_t = h.row(t);
      Index best_doc = match.front();
      double best_dist = l1_distance(row_t, h.row(best_doc), mask);
      for (std::size_t mi = 1; mi < match.size(); ++mi) {
        const double dist = l1_distance(row_t, h.row(match[mi]), mask);
        if (dist < best_dist) {  // ties keep the lowest matching doc index
          best_dist = dist;
          best_doc = match[mi];
        }
      }
      assignments[static_cast<std::size_t>(ti)] = {t, best_doc};
    } catch (...) {
      errors[static_cast<std::size_t>(ti)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  return evaluate_accuracy(assignments, split.labels);
}

SupportSet per_category_support_union(const HistogramMatrix& h,
                                      const WeightVector& w,
                                      const LabeledSplit& split, std::size_t s,
                                      std::size_t n_comp_per_cat,
                                      const SolverConfig& config) {
  split.validate(h.n_docs());
  if (split.learn.empty())
    fail(ErrorKind::Config, "learning set is empty");

  std::set<std::string> categories;
  for (Index d : split.learn) categories.insert(label_of(split.labels, d));
  for (Index d : split.match) categories.insert(label_of(split.labels, d));
  for (Index d : split.test) categories.insert(label_of(split.labels, d));

  const std::vector<Index> learn = sorted_copy(split.learn);
  const SolverConfig cat_config = with_shape(config, s, n_comp_per_cat);

  std::set<Index> support;
  for (const std::string& cat : categories) {
    std::vector<Index> docs;
    for (Index d : learn)
      if (split.labels[d] == cat) docs.push_back(d);
    if (docs.empty())
      fail(ErrorKind::Data,
           "category '" + cat + "' has no learning documents");

    const WeightedMatrix a_c = weighted_rows(h, w, docs);
    const TopkResult result = solve_topk(a_c, cat_config);
    const std::set<Index> cat_support = union_of_supports(result.components);
    support.insert(cat_support.begin(), cat_support.end());
  }

  if (support.empty())
    fail(ErrorKind::NoComponent, "no support extracted from any category");
  SupportSet out;
  out.indices.assign(support.begin(), support.end());
  out.provenance = SupportProvenance::PerCategoryUnion;
  return out;
}

SupportSet global_support_union(const HistogramMatrix& h, const WeightVector& w,
                                const LabeledSplit& split, std::size_t s,
                                std::size_t k, const SolverConfig& config) {
  split.validate(h.n_docs());
  if (split.learn.empty())
    fail(ErrorKind::Config, "learning set is empty");

  const WeightedMatrix a_l = weighted_rows(h, w, sorted_copy(split.learn));
  const TopkResult result = solve_topk(a_l, with_shape(config, s, k));
  const std::set<Index> support = union_of_supports(result.components);
  if (support.empty())
    fail(ErrorKind::NoComponent, "no support extracted from the learning set");

  SupportSet out;
  out.indices.assign(support.begin(), support.end());
  out.provenance = SupportProvenance::GlobalUnion;
  return out;
}

PredictionReport interference_match(const HistogramMatrix& h,
                                    const WeightVector& w,
                                    const LabeledSplit& split, std::size_t s,
                                    std::size_t k, const SolverConfig& config) {
  split.validate(h.n_docs());
  if (split.learn.empty())
    fail(ErrorKind::Config, "learning set is empty");
  if (split.match.empty())
    fail(ErrorKind::Config, "matching set is empty");
  if (split.test.empty())
    fail(ErrorKind::Config, "testing set is empty");

  const std::vector<Index> match = sorted_copy(split.match);
  const std::vector<Index> test = sorted_copy(split.test);

  const WeightedMatrix a_l = weighted_rows(h, w, sorted_copy(split.learn));
  const TopkResult extracted = solve_topk(a_l, with_shape(config, s, k));
  const std::span<const SparseComponent> comps(extracted.components);
  if (comps.empty())
    fail(ErrorKind::NoComponent, "no components extracted from the learning set");

  const WeightedMatrix weighted = apply_weights(h, w);
  const InterferenceTable match_table =
      interference_table(weighted.select_rows(match), comps);
  const InterferenceTable test_table =
      interference_table(weighted.select_rows(test), comps);

  // Each component is owned by the matching document of highest interference.
  std::vector<Index> owner(comps.size());
  for (std::size_t l = 0; l < comps.size(); ++l) {
    std::size_t best = 0;
    for (std::size_t mi = 1; mi < match.size(); ++mi)
      if (match_table.at(mi, l) > match_table.at(best, l)) best = mi;
    owner[l] = match[best];
  }

  PredictionReport report;
  std::vector<std::pair<Index, Index>> assignments(test.size());
  std::vector<Index> zero_interference;
  for (std::size_t ti = 0; ti < test.size(); ++ti) {
    std::size_t best = 0;
    for (std::size_t l = 1; l < comps.size(); ++l)
      if (test_table.at(ti, l) > test_table.at(ti, best)) best = l;
    if (test_table.at(ti, best) == 0.0)
      zero_interference.push_back(test[ti]);
    assignments[ti] = {test[ti], owner[best]};
  }

  report = evaluate_accuracy(assignments, split.labels);
  report.zero_interference = std::move(zero_interference);
  return report;
}

PredictionReport evaluate_accuracy(
    std::span<const std::pair<Index, Index>> assignments,
    std::span<const std::string> labels) {
  if (assignments.empty())
    fail(ErrorKind::Config, "no assignments to evaluate");

  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;  // correct, total
  std::size_t correct = 0;
  for (const auto& [test_doc, match_doc] : assignments) {
    if (test_doc >= labels.size() || match_doc >= labels.size())
      fail(ErrorKind::Shape, "assignment references a document without a label");
    const std::string& truth = label_of(labels, test_doc);
    const std::string& predicted = label_of(labels, match_doc);
    auto& [cat_correct, cat_total] = counts[truth];
    ++cat_total;
    if (truth == predicted) {
      ++cat_correct;
      ++correct;
    }
  }

  PredictionReport report;
  report.assignments.assign(assignments.begin(), assignments.end());
  for (const auto& [cat, pair] : counts)
    report.per_category[cat] =
        static_cast<double>(pair.first) / static_cast<double>(pair.second);
  report.total = static_cast<double>(correct) / static_cast<double>(assignments.size());
  return report;
}

}  // namespace sptopics
