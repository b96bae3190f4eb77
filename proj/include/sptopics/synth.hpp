#pragma once

#include <cstdint>
#include <span>

#include "sptopics/matrix.hpp"

namespace sptopics {

// Synthetic corpus with block structure: block b holds docs_per_block
// documents drawing unit counts from its own terms_per_block[b] terms. With
// noise > 0, a `noise` fraction of each row's mass is scattered over
// out-of-block terms with seeded uniform proportions; noise = 0 yields an
// exactly block-diagonal matrix. Document labels are the block indices.
TermFrequencyMatrix gen_block_diagonal(std::size_t n_blocks,
                                       std::size_t docs_per_block,
                                       std::span<const std::size_t> terms_per_block,
                                       double noise, std::uint64_t seed);

}  // namespace sptopics
