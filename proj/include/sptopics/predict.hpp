#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sptopics/matrix.hpp"
#include "sptopics/spca.hpp"

namespace sptopics {

// Learning / matching / testing document split. Labels are aligned with the
// full document range; learn-set labels are only consulted by the
// per-category classifier.
struct LabeledSplit {
  std::vector<Index> learn;
  std::vector<Index> match;
  std::vector<Index> test;
  std::vector<std::string> labels;

  // Checks index ranges, match/test disjointness, and that every category in
  // the test set also appears in the matching set.
  void validate(std::size_t n_docs) const;
};

enum class SupportProvenance { PerCategoryUnion, GlobalUnion };

struct SupportSet {
  std::vector<Index> indices;  // sorted
  SupportProvenance provenance = SupportProvenance::GlobalUnion;
};

struct PredictionReport {
  std::map<std::string, double> per_category;           // accuracy per category
  double total = 0.0;
  std::vector<std::pair<Index, Index>> assignments;     // (test doc, matched doc)
  // Test documents whose interference with every component was zero; matched
  // through the tie rule and counted normally.
  std::vector<Index> zero_interference;
};

// Nearest matching document under L1 distance of normalized histograms,
// optionally restricted to a support set. Ties keep the lowest matching
// document index.
PredictionReport l1_nearest(const HistogramMatrix& h, const LabeledSplit& split,
                            const SupportSet* restrict = nullptr);

// For each category, extracts components from the weighted learn rows of that
// category and unions all supports.
SupportSet per_category_support_union(const HistogramMatrix& h,
                                      const WeightVector& w,
                                      const LabeledSplit& split, std::size_t s,
                                      std::size_t n_comp_per_cat,
                                      const SolverConfig& config);

// Extracts k components from all weighted learn rows (labels unused) and
// unions their supports.
SupportSet global_support_union(const HistogramMatrix& h, const WeightVector& w,
                                const LabeledSplit& split, std::size_t s,
                                std::size_t k, const SolverConfig& config);

// Component-interference classifier: each component is owned by the matching
// document with the highest interference; a test document is routed to its
// highest-interference component and through it to that owner.
PredictionReport interference_match(const HistogramMatrix& h,
                                    const WeightVector& w,
                                    const LabeledSplit& split, std::size_t s,
                                    std::size_t k, const SolverConfig& config);

// Per-category and total accuracy of an assignment map.
PredictionReport evaluate_accuracy(
    std::span<const std::pair<Index, Index>> assignments,
    std::span<const std::string> labels);

}  // namespace sptopics
