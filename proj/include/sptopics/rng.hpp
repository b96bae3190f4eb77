#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sptopics {

// Expands one user-facing seed into independent stream seeds.
std::uint64_t splitmix64(std::uint64_t state);

// All randomness in the library flows through this generator: an mt19937_64
// bit stream with explicit conversions to doubles, so a given seed produces
// the same sequence on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream `stream` derived from `seed`.
  Rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1))) {}

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Standard normal via the Marsaglia polar method.
  double normal();

  // Uniform point on the unit sphere in `dim` dimensions.
  std::vector<double> unit_sphere(std::size_t dim);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sptopics
