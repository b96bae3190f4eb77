#pragma once

#include <span>
#include <vector>

#include "sptopics/matrix.hpp"
#include "sptopics/spca.hpp"

namespace sptopics {

// |a^i . x|, iterating only the support of x.
double interference(const SparseRow& weighted_row, const SparseComponent& comp,
                    std::size_t n_terms);

// n x k matrix of interferences, row-major.
class InterferenceTable {
 public:
  InterferenceTable(std::size_t n_docs, std::size_t n_components,
                    std::vector<double> values);

  std::size_t n_docs() const { return n_docs_; }
  std::size_t n_components() const { return n_components_; }
  double at(std::size_t doc, std::size_t comp) const {
    return values_[doc * n_components_ + comp];
  }
  std::vector<double> column(std::size_t comp) const;

 private:
  std::size_t n_docs_;
  std::size_t n_components_;
  std::vector<double> values_;
};

InterferenceTable interference_table(const WeightedMatrix& A,
                                     std::span<const SparseComponent> comps);

struct SplitResult {
  double threshold = 0.0;      // midpoint of the separating gap
  double gap = 0.0;            // min(high cluster) - max(low cluster)
  std::size_t low_count = 0;   // size of the low cluster
};

// Exact 1-D two-cluster k-means: scans every split of the sorted values and
// keeps the one minimizing within-cluster sum of squares (lowest split index
// on ties). Throws ErrorKind::DegenerateTopic when all values are equal.
SplitResult split_threshold(std::span<const double> values);

struct ThresholdPolicy {
  enum class Mode { Auto, Fixed, TopM };
  Mode mode = Mode::Auto;
  std::vector<double> fixed;  // length k, used in Fixed mode
  std::size_t top_m = 0;      // used in TopM mode
};

struct TopicInfo {
  std::size_t component = 0;
  double threshold = 0.0;
  double gap = 0.0;
  bool degenerate = false;          // auto mode found no separation
  std::vector<Index> members;       // sorted document indices
};

// Sets may overlap and need not cover all documents; no partition is forced.
struct TopicAssignment {
  std::vector<TopicInfo> topics;
};

// Auto mode derives each threshold via split_threshold; a degenerate column
// flags its topic and leaves the others intact. Fixed mode applies the given
// thresholds. TopM picks the m documents of largest interference per topic
// (ties to the lower document index).
TopicAssignment assign_topics(const InterferenceTable& table,
                              const ThresholdPolicy& policy);

}  // namespace sptopics
