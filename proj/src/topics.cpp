#include "sptopics/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>

#include "sptopics/error.hpp"

namespace sptopics {

double interference(const SparseRow& weighted_row, const SparseComponent& comp,
                    std::size_t n_terms) {
  if (comp.loading.size() != n_terms)
    fail(ErrorKind::Shape, "component dimension does not match row dimension");
  double acc = 0.0;
  for (Index j : comp.support) acc += weighted_row.value_at(j) * comp.loading[j];
  return std::abs(acc);
}

InterferenceTable::InterferenceTable(std::size_t n_docs, std::size_t n_components,
                                     std::vector<double> values)
    : n_docs_(n_docs), n_components_(n_components), values_(std::move(values)) {
  if (values_.size() != n_docs_ * n_components_)
    fail(ErrorKind::Shape, "interference table buffer does not match its shape");
}

std::vector<double> InterferenceTable::column(std::size_t comp) const {
  std::vector<double> col(n_docs_);
  for (std::size_t i = 0; i < n_docs_; ++i) col[i] = at(i, comp);
  return col;
}

InterferenceTable interference_table(const WeightedMatrix& A,
                                     std::span<const SparseComponent> comps) {
  const std::size_t n = A.n_docs();
  const std::size_t k = comps.size();
  for (const auto& c : comps)
    if (c.loading.size() != A.n_terms())
      fail(ErrorKind::Shape, "component dimension does not match matrix");

  std::vector<double> values(n * k, 0.0);
  const auto kk = static_cast<std::ptrdiff_t>(k);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t l = 0; l < kk; ++l) {
    const auto& comp = comps[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < n; ++i)
      values[i * k + static_cast<std::size_t>(l)] =
          interference(A.row(i), comp, A.n_terms());
  }
  return InterferenceTable(n, k, std::move(values));
}

SplitResult split_threshold(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2)
    fail(ErrorKind::Config, "two-cluster split needs at least two values");

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back())
    fail(ErrorKind::DegenerateTopic, "all interference values are equal");

  // Prefix sums make the within-cluster SSE of every split O(1):
  // SSE = sum v^2 - S_low^2/|low| - S_high^2/|high|.
  std::vector<double> prefix(n + 1, 0.0), prefix_sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] + sorted[i];
    prefix_sq[i + 1] = prefix_sq[i] + sorted[i] * sorted[i];
  }

  std::size_t best_m = 0;
  double best_sse = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m + 1 < n; ++m) {
    const double low_n = static_cast<double>(m + 1);
    const double high_n = static_cast<double>(n - m - 1);
    const double s_low = prefix[m + 1];
    const double s_high = prefix[n] - prefix[m + 1];
    const double sse =
        prefix_sq[n] - s_low * s_low / low_n - s_high * s_high / high_n;
    if (sse < best_sse) {
      best_sse = sse;
      best_m = m;
    }
  }

  SplitResult result;
  result.gap = sorted[best_m + 1] - sorted[best_m];
  result.threshold = 0.5 * (sorted[best_m] + sorted[best_m + 1]);
  result.low_count = best_m + 1;
  return result;
}

namespace {

TopicInfo members_above(const InterferenceTable& table, std::size_t l,
                        double threshold, double gap) {
  TopicInfo info;
  info.component = l;
  info.threshold = threshold;
  info.gap = gap;
  for (std::size_t i = 0; i < table.n_docs(); ++i)
    if (table.at(i, l) > threshold) info.members.push_back(static_cast<Index>(i));
  return info;
}

TopicInfo top_m_members(const InterferenceTable& table, std::size_t l,
                        std::size_t m) {
  const std::size_t n = table.n_docs();
  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  // Interference descending, lower document index on ties.
  std::stable_sort(order.begin(), order.end(), [&](Index lhs, Index rhs) {
    return table.at(lhs, l) > table.at(rhs, l);
  });

  TopicInfo info;
  info.component = l;
  const std::size_t take = std::min(m, n);
  info.members.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));
  std::sort(info.members.begin(), info.members.end());

  // Report the implied threshold: the midpoint below the weakest member.
  const double boundary = take > 0 ? table.at(order[take - 1], l) : 0.0;
  const double below = take < n ? table.at(order[take], l) : 0.0;
  info.threshold = take < n ? 0.5 * (boundary + below) : 0.5 * boundary;
  info.gap = take < n ? boundary - below : 0.0;
  return info;
}

}  // namespace

TopicAssignment assign_topics(const InterferenceTable& table,
                              const ThresholdPolicy& policy) {
  const std::size_t k = table.n_components();
  TopicAssignment assignment;
  assignment.topics.reserve(k);

  switch (policy.mode) {
    case ThresholdPolicy::Mode::Auto:
      for (std::size_t l = 0; l < k; ++l) {
        std::vector<double> col = table.column(l);
        try {
          const SplitResult split = split_threshold(col);
          assignment.topics.push_back(
              members_above(table, l, split.threshold, split.gap));
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::DegenerateTopic) throw;
          TopicInfo info;
          info.component = l;
          info.degenerate = true;
          assignment.topics.push_back(std::move(info));
        }
      }
      break;

    case ThresholdPolicy::Mode::Fixed:
      if (policy.fixed.size() != k)
        fail(ErrorKind::Config, "fixed thresholds: expected " + std::to_string(k) +
                                    " values, got " +
                                    std::to_string(policy.fixed.size()));
      for (double t : policy.fixed)
        if (!(t > 0.0))
          fail(ErrorKind::Config, "topic thresholds must be positive");
      for (std::size_t l = 0; l < k; ++l)
        assignment.topics.push_back(members_above(table, l, policy.fixed[l], 0.0));
      break;

    case ThresholdPolicy::Mode::TopM:
      if (policy.top_m < 1)
        fail(ErrorKind::Config, "top-m mode needs m >= 1");
      for (std::size_t l = 0; l < k; ++l)
        assignment.topics.push_back(top_m_members(table, l, policy.top_m));
      break;
  }
  return assignment;
}

}  // namespace sptopics
