#include "sptopics/synth.hpp"

#include <numeric>
#include <string>

#include "sptopics/error.hpp"
#include "sptopics/rng.hpp"

namespace sptopics {

TermFrequencyMatrix gen_block_diagonal(std::size_t n_blocks,
                                       std::size_t docs_per_block,
                                       std::span<const std::size_t> terms_per_block,
                                       double noise, std::uint64_t seed) {
  if (n_blocks == 0) fail(ErrorKind::Config, "need at least one block");
  if (docs_per_block == 0) fail(ErrorKind::Config, "need at least one document per block");
  if (terms_per_block.size() != n_blocks)
    fail(ErrorKind::Config, "terms_per_block must list one count per block");
  for (std::size_t t : terms_per_block)
    if (t == 0) fail(ErrorKind::Config, "every block needs at least one term");
  if (!(noise >= 0.0 && noise < 1.0))
    fail(ErrorKind::Config, "noise must lie in [0, 1)");

  std::vector<std::size_t> offset(n_blocks + 1, 0);
  for (std::size_t b = 0; b < n_blocks; ++b)
    offset[b + 1] = offset[b] + terms_per_block[b];
  const std::size_t n_terms = offset[n_blocks];

  std::vector<SparseRow> rows;
  rows.reserve(n_blocks * docs_per_block);
  std::vector<std::string> labels;
  labels.reserve(n_blocks * docs_per_block);

  for (std::size_t b = 0; b < n_blocks; ++b) {
    const std::size_t lo = offset[b];
    const std::size_t hi = offset[b + 1];
    const std::size_t in_block = hi - lo;
    const std::size_t out_block = n_terms - in_block;

    for (std::size_t d = 0; d < docs_per_block; ++d) {
      const std::size_t doc = b * docs_per_block + d;
      SparseRow row;

      if (noise == 0.0 || out_block == 0) {
        // Exactly separable regime: unit count on every in-block term.
        row.cols.resize(in_block);
        row.vals.assign(in_block, 1.0);
        std::iota(row.cols.begin(), row.cols.end(), static_cast<Index>(lo));
      } else {
        // A `noise` fraction of the row's mass moves out of the block, split
        // over the out-of-block terms with seeded uniform proportions. One
        // stream per document keeps rows independent of generation order.
        Rng rng(seed, doc);
        std::vector<double> props(out_block);
        double total = 0.0;
        for (double& u : props) {
          u = rng.uniform();
          total += u;
        }
        if (total == 0.0) {
          props.assign(out_block, 1.0);
          total = static_cast<double>(out_block);
        }

        const double mass = static_cast<double>(in_block);
        const double scatter = noise * mass / total;
        const double in_value = 1.0 - noise;

        row.cols.reserve(n_terms);
        row.vals.reserve(n_terms);
        std::size_t out_pos = 0;
        for (std::size_t j = 0; j < n_terms; ++j) {
          double v;
          if (j >= lo && j < hi) {
            v = in_value;
          } else {
            v = props[out_pos++] * scatter;
          }
          if (v > 0.0) {
            row.cols.push_back(static_cast<Index>(j));
            row.vals.push_back(v);
          }
        }
      }

      rows.push_back(std::move(row));
      labels.push_back("block-" + std::to_string(b));
    }
  }

  TermFrequencyMatrix matrix(n_terms, std::move(rows));
  matrix.set_doc_labels(std::move(labels));
  return matrix;
}

}  // namespace sptopics
