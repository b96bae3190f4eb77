#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sptopics/matrix.hpp"

namespace sptopics {

enum class DeflationScheme {
  Projection,        // A <- A (I - x x^T), row-wise a^i <- a^i - (a^i.x) x
  HotellingLiteral,  // rejected at validation; kept so configs name it explicitly
};

struct SolverConfig {
  std::size_t sparsity = 1;      // s, nonzero budget per component
  std::size_t n_components = 1;  // k
  std::size_t max_iters = 200;
  double rel_tol = 1e-6;
  std::size_t n_restarts = 16;
  std::uint64_t seed = 0;
  DeflationScheme deflation = DeflationScheme::Projection;

  // Throws ErrorKind::Config on violation of any bound.
  void validate(std::size_t n_docs, std::size_t n_terms) const;
};

// A unit-norm loading with at most s nonzeros and its explained variance
// against the matrix it was extracted from.
struct SparseComponent {
  std::vector<double> loading;      // dense length-p
  std::vector<Index> support;       // sorted indices of the nonzeros
  double explained_variance = 0.0;  // ||A x||^2
  std::size_t iterations_used = 0;
  std::size_t restart_index = 0;

  // Unit norm within 1e-10 and |support| <= s; throws on violation.
  void check_feasible(std::size_t s) const;
};

struct VarianceReport {
  double f_sparse = 0.0;  // ||A x||^2 of the sparse loading
  double f_star = 0.0;    // ||A x*||^2 of the dense leading PC
  double ratio = 0.0;     // f_sparse / f_star, in (0, 1]
};

// Keeps the s entries of largest absolute value and zeroes the rest. Equal
// magnitudes keep the lowest index, so results do not depend on platform
// sort order.
std::vector<double> hard_threshold(std::span<const double> a, std::size_t s);

// One alternating-maximization run. The start x0 seeds the first y-step and
// may be dense; afterwards
//   y = A x / ||A x||,  x <- T_s(A^T y) / ||T_s(A^T y)||
// until the relative change of ||A x|| drops below rel_tol or max_iters is
// reached. Every produced iterate is s-sparse and unit, so the objective
// sequence ||A x^(1)||, ||A x^(2)||, ... is nondecreasing; when a trace
// vector is supplied it receives exactly that sequence.
SparseComponent am_solve_single(const WeightedMatrix& A, std::size_t s,
                                std::span<const double> x0,
                                std::size_t max_iters, double rel_tol,
                                std::vector<double>* objective_trace = nullptr);

// Best of n_restarts runs. Restart r < min(n_restarts, p) starts from the
// basis vector of the column with the (r+1)-th largest norm; remaining
// restarts start from seeded uniform-sphere vectors. Deterministic given the
// seed; ties on variance keep the lowest restart index.
SparseComponent am_solve_restarts(const WeightedMatrix& A, std::size_t s,
                                  const SolverConfig& config);

struct PowerResult {
  std::vector<double> x;  // approximate leading right singular vector
  double f_star = 0.0;    // ||A x||^2
  std::size_t iterations = 0;
};

// Power iteration on A^T A for the dense (unconstrained) leading component.
PowerResult power_method_dense(const WeightedMatrix& A,
                               std::size_t max_iters = 20000,
                               double rel_tol = 1e-14);

// Projection deflation. Only rows with a^i.x != 0 are touched; fill-in is
// confined to support(x), and untouched rows are copied bit-for-bit.
WeightedMatrix deflate(const WeightedMatrix& A, const SparseComponent& x,
                       DeflationScheme scheme = DeflationScheme::Projection);

struct TopkResult {
  std::vector<SparseComponent> components;  // in extraction order
  // ||A_{l+1} x^l||_2 recorded after each deflation step.
  std::vector<double> deflation_residuals;
  bool truncated = false;
  std::string truncation_reason;
};

// Extracts config.n_components components, deflating between extractions.
// Stops early with a truncation notice when the deflated matrix reaches zero.
TopkResult solve_topk(const WeightedMatrix& A, const SolverConfig& config);

struct OracleResult {
  std::vector<Index> support;
  double objective = 0.0;  // sigma_1^2 of the best column submatrix
};

// Exhaustive search over all supports of size s; the exact optimum of the
// cardinality-constrained problem. Guarded to C(p, s) <= 1e6. Ties on the
// objective (within the numerical slack of the per-support power iteration)
// keep the lexicographically smallest support.
OracleResult brute_force_oracle(const WeightedMatrix& A, std::size_t s);

// f_sparse = ||A x||^2 against f_star of the dense leading component.
VarianceReport variance_ratio(const WeightedMatrix& A, const SparseComponent& x);

}  // namespace sptopics
