#include "sptopics/spca.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numeric>

#include "sptopics/error.hpp"
#include "sptopics/rng.hpp"

namespace sptopics {

namespace {

constexpr double kObjectiveFloor = 1e-30;
// Relative Frobenius threshold below which a deflated matrix counts as zero.
constexpr double kZeroMatrixRel = 1e-12;

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

void scale(std::vector<double>& v, double factor) {
  for (double& x : v) x *= factor;
}

// Dot of a sparse row with a component, touching only the component support.
double support_dot(const SparseRow& row, const SparseComponent& comp) {
  double acc = 0.0;
  for (Index j : comp.support) acc += row.value_at(j) * comp.loading[j];
  return acc;
}

}  // namespace

void SolverConfig::validate(std::size_t n_docs, std::size_t n_terms) const {
  if (sparsity < 1 || sparsity > n_terms)
    fail(ErrorKind::Config, "sparsity must be in [1, " + std::to_string(n_terms) +
                                "], got " + std::to_string(sparsity));
  if (n_components < 1 || n_components > std::min(n_docs, n_terms))
    fail(ErrorKind::Config,
         "n_components must be in [1, " + std::to_string(std::min(n_docs, n_terms)) +
             "], got " + std::to_string(n_components));
  if (max_iters < 1) fail(ErrorKind::Config, "max_iters must be at least 1");
  if (!(rel_tol > 0.0)) fail(ErrorKind::Config, "rel_tol must be positive");
  if (n_restarts < 1) fail(ErrorKind::Config, "n_restarts must be at least 1");
  if (deflation == DeflationScheme::HotellingLiteral)
    fail(ErrorKind::Config,
         "hotelling-literal deflation is not supported; use projection");
}

void SparseComponent::check_feasible(std::size_t s) const {
  const double n = norm2(loading);
  if (std::abs(n - 1.0) > 1e-10)
    fail(ErrorKind::Degenerate, "component loading is not unit norm");
  if (support.size() > s)
    fail(ErrorKind::Degenerate, "component support exceeds the sparsity budget");
  if (!(explained_variance >= 0.0))
    fail(ErrorKind::Degenerate, "negative explained variance");
}

std::vector<double> hard_threshold(std::span<const double> a, std::size_t s) {
  const std::size_t p = a.size();
  if (s < 1 || s > p)
    fail(ErrorKind::Config, "hard_threshold: s must be in [1, p]");
  if (s == p) return std::vector<double>(a.begin(), a.end());

  std::vector<Index> order(p);
  std::iota(order.begin(), order.end(), Index{0});
  // Magnitude descending, lowest index first on equal magnitude.
  auto by_magnitude = [&a](Index lhs, Index rhs) {
    const double la = std::abs(a[lhs]);
    const double ra = std::abs(a[rhs]);
    if (la != ra) return la > ra;
    return lhs < rhs;
  };
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(s - 1),
                   order.end(), by_magnitude);

  std::vector<double> out(p, 0.0);
  for (std::size_t r = 0; r < s; ++r) out[order[r]] = a[order[r]];
  return out;
}

SparseComponent am_solve_single(const WeightedMatrix& A, std::size_t s,
                                std::span<const double> x0,
                                std::size_t max_iters, double rel_tol,
                                std::vector<double>* objective_trace) {
  const std::size_t p = A.n_terms();
  if (x0.size() != p) fail(ErrorKind::Shape, "start vector length mismatch");
  if (s < 1 || s > p) fail(ErrorKind::Config, "sparsity out of range");

  // x0 seeds the first y-step only and may be dense; every iterate the loop
  // produces is s-sparse and unit, so the traced objective sequence is
  // nondecreasing (the start objective would not be comparable and is not
  // recorded).
  std::vector<double> x(x0.begin(), x0.end());
  std::vector<double> ax = A.multiply(x);
  double obj = norm2(ax);
  if (obj == 0.0)
    fail(ErrorKind::Degenerate, "degenerate start: A x0 = 0");
  if (objective_trace) objective_trace->clear();

  std::size_t iters = 0;
  for (std::size_t t = 0; t < max_iters; ++t) {
    scale(ax, 1.0 / obj);  // y = A x / ||A x||
    std::vector<double> z = A.transpose_multiply(ax);
    std::vector<double> zt = hard_threshold(z, s);
    const double zt_norm = norm2(zt);
    if (zt_norm == 0.0)
      fail(ErrorKind::Degenerate, "degenerate iterate: T_s(A^T y) = 0");
    scale(zt, 1.0 / zt_norm);
    x = std::move(zt);

    ax = A.multiply(x);
    const double next_obj = norm2(ax);
    if (objective_trace) objective_trace->push_back(next_obj);
    ++iters;
    const bool converged =
        std::abs(next_obj - obj) <= rel_tol * std::max(obj, kObjectiveFloor);
    obj = next_obj;
    if (converged) break;
  }

  SparseComponent comp;
  comp.loading = std::move(x);
  for (std::size_t j = 0; j < p; ++j)
    if (comp.loading[j] != 0.0) comp.support.push_back(static_cast<Index>(j));
  comp.explained_variance = obj * obj;
  comp.iterations_used = iters;
  comp.check_feasible(s);
  return comp;
}

SparseComponent am_solve_restarts(const WeightedMatrix& A, std::size_t s,
                                  const SolverConfig& config) {
  const std::size_t p = A.n_terms();
  if (s < 1 || s > p) fail(ErrorKind::Config, "sparsity out of range");
  if (config.max_iters < 1 || !(config.rel_tol > 0.0) || config.n_restarts < 1)
    fail(ErrorKind::Config, "invalid solver configuration");

  // Greedy starts: basis vectors of the largest columns, ties by index.
  const std::vector<double> col_norms = A.column_squared_norms();
  std::vector<Index> col_order(p);
  std::iota(col_order.begin(), col_order.end(), Index{0});
  std::stable_sort(col_order.begin(), col_order.end(), [&](Index lhs, Index rhs) {
    return col_norms[lhs] > col_norms[rhs];
  });

  const std::size_t n_restarts = config.n_restarts;
  const std::size_t n_column_starts = std::min(n_restarts, p);

  std::vector<SparseComponent> results(n_restarts);
  std::vector<char> ok(n_restarts, 0);
  std::vector<std::exception_ptr> errors(n_restarts);

  const auto run = [&](std::size_t r) {
    std::vector<double> x0;
    if (r < n_column_starts) {
      if (col_norms[col_order[r]] == 0.0) return;  // degenerate start, skip
      x0.assign(p, 0.0);
      x0[col_order[r]] = 1.0;
    } else {
      Rng rng(config.seed, r);
      x0 = rng.unit_sphere(p);
    }
    try {
      results[r] = am_solve_single(A, s, x0, config.max_iters, config.rel_tol);
      results[r].restart_index = r;
      ok[r] = 1;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate) errors[r] = std::current_exception();
    } catch (...) {
      errors[r] = std::current_exception();
    }
  };

  const auto n = static_cast<std::ptrdiff_t>(n_restarts);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t r = 0; r < n; ++r) run(static_cast<std::size_t>(r));

  for (const auto& err : errors)
    if (err) std::rethrow_exception(err);

  std::ptrdiff_t best = -1;
  for (std::size_t r = 0; r < n_restarts; ++r) {
    if (!ok[r]) continue;
    if (best < 0 || results[r].explained_variance >
                        results[static_cast<std::size_t>(best)].explained_variance)
      best = static_cast<std::ptrdiff_t>(r);
  }
  if (best < 0)
    fail(ErrorKind::NoComponent, "every restart was degenerate (zero matrix)");
  return results[static_cast<std::size_t>(best)];
}

PowerResult power_method_dense(const WeightedMatrix& A, std::size_t max_iters,
                               double rel_tol) {
  const std::size_t p = A.n_terms();
  std::vector<double> col_norms = A.column_squared_norms();
  const double total = std::accumulate(col_norms.begin(), col_norms.end(), 0.0);
  if (total == 0.0) fail(ErrorKind::Degenerate, "power method on a zero matrix");

  // Deterministic start: the column-norm profile, falling back to the
  // heaviest basis vector if the profile happens to lie in the null space.
  std::vector<double> x(p);
  for (std::size_t j = 0; j < p; ++j) x[j] = std::sqrt(col_norms[j]);
  scale(x, 1.0 / norm2(x));

  std::vector<double> ax = A.multiply(x);
  double obj = norm2(ax);
  if (obj == 0.0) {
    const std::size_t heaviest = static_cast<std::size_t>(
        std::max_element(col_norms.begin(), col_norms.end()) - col_norms.begin());
    x.assign(p, 0.0);
    x[heaviest] = 1.0;
    ax = A.multiply(x);
    obj = norm2(ax);
  }

  std::size_t iters = 0;
  for (std::size_t t = 0; t < max_iters; ++t) {
    scale(ax, 1.0 / obj);
    std::vector<double> z = A.transpose_multiply(ax);
    const double z_norm = norm2(z);
    if (z_norm == 0.0) break;
    scale(z, 1.0 / z_norm);
    x = std::move(z);

    ax = A.multiply(x);
    const double next_obj = norm2(ax);
    ++iters;
    const bool converged =
        std::abs(next_obj - obj) <= rel_tol * std::max(obj, kObjectiveFloor);
    obj = next_obj;
    if (converged) break;
  }

  PowerResult result;
  result.x = std::move(x);
  result.f_star = obj * obj;
  result.iterations = iters;
  return result;
}

WeightedMatrix deflate(const WeightedMatrix& A, const SparseComponent& x,
                       DeflationScheme scheme) {
  if (scheme != DeflationScheme::Projection)
    fail(ErrorKind::Config, "unsupported deflation scheme");
  if (x.loading.size() != A.n_terms())
    fail(ErrorKind::Shape, "component dimension does not match matrix");

  std::vector<SparseRow> rows(A.n_docs());
  const auto& support = x.support;
  for (std::size_t i = 0; i < A.n_docs(); ++i) {
    const SparseRow& r = A.row(i);
    const double dot = support_dot(r, x);
    if (dot == 0.0) {
      rows[i] = r;  // untouched rows are copied verbatim
      continue;
    }
    // Merge the row pattern with support(x); only support columns change.
    SparseRow out;
    out.cols.reserve(r.nnz() + support.size());
    out.vals.reserve(r.nnz() + support.size());
    std::size_t e = 0, k = 0;
    while (e < r.cols.size() || k < support.size()) {
      Index col;
      double val;
      if (k == support.size() ||
          (e < r.cols.size() && r.cols[e] < support[k])) {
        col = r.cols[e];
        val = r.vals[e];
        ++e;
      } else if (e == r.cols.size() || support[k] < r.cols[e]) {
        col = support[k];
        val = -dot * x.loading[col];
        ++k;
      } else {
        col = r.cols[e];
        val = r.vals[e] - dot * x.loading[col];
        ++e;
        ++k;
      }
      if (val != 0.0) {
        out.cols.push_back(col);
        out.vals.push_back(val);
      }
    }
    rows[i] = std::move(out);
  }
  return WeightedMatrix(A.n_terms(), std::move(rows));
}

TopkResult solve_topk(const WeightedMatrix& A, const SolverConfig& config) {
  config.validate(A.n_docs(), A.n_terms());
  const double norm_a1 = A.frobenius_norm();
  if (norm_a1 == 0.0) fail(ErrorKind::NoComponent, "input matrix is zero");

  TopkResult result;
  WeightedMatrix current = A;
  for (std::size_t l = 0; l < config.n_components; ++l) {
    if (current.frobenius_norm() <= kZeroMatrixRel * norm_a1) {
      result.truncated = true;
      result.truncation_reason = "deflated matrix reached zero after " +
                                 std::to_string(l) + " component(s)";
      break;
    }
    SparseComponent comp;
    try {
      comp = am_solve_restarts(current, config.sparsity, config);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoComponent) throw;
      result.truncated = true;
      result.truncation_reason = "deflated matrix reached zero after " +
                                 std::to_string(l) + " component(s)";
      break;
    }
    WeightedMatrix next = deflate(current, comp, config.deflation);
    const std::vector<double> residual = next.multiply(comp.loading);
    result.deflation_residuals.push_back(norm2(residual));
    result.components.push_back(std::move(comp));
    current = std::move(next);
  }
  return result;
}

OracleResult brute_force_oracle(const WeightedMatrix& A, std::size_t s) {
  const std::size_t p = A.n_terms();
  if (s < 1 || s > p) fail(ErrorKind::Config, "sparsity out of range");

  // Guard C(p, s) before enumerating.
  double combos = 1.0;
  for (std::size_t i = 0; i < s; ++i) {
    combos *= static_cast<double>(p - i) / static_cast<double>(i + 1);
    if (combos > 1e6)
      fail(ErrorKind::Size, "C(p, s) exceeds the 1e6 enumeration guard");
  }

  std::vector<Index> support(s);
  std::iota(support.begin(), support.end(), Index{0});

  // Power iteration approaches sigma_1^2 from below with a residual that
  // depends on the submatrix spectrum, so exact ties arrive as near-ties.
  // Anything inside this band counts as a tie and the earlier support wins.
  constexpr double kTieRel = 1e-11;

  OracleResult best;
  best.objective = -1.0;
  for (;;) {
    WeightedMatrix sub = A.select_columns(support);
    double objective = 0.0;
    if (sub.nnz() > 0) objective = power_method_dense(sub).f_star;
    // Lexicographic enumeration: the first support of a tie band is kept.
    if (objective > best.objective + kTieRel * std::abs(best.objective)) {
      best.objective = objective;
      best.support = support;
    }
    // Advance to the next combination in lexicographic order.
    std::ptrdiff_t i = static_cast<std::ptrdiff_t>(s) - 1;
    while (i >= 0 && support[static_cast<std::size_t>(i)] ==
                         static_cast<Index>(p - s + static_cast<std::size_t>(i)))
      --i;
    if (i < 0) return best;
    ++support[static_cast<std::size_t>(i)];
    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < s; ++j)
      support[j] = support[j - 1] + 1;
  }
}

VarianceReport variance_ratio(const WeightedMatrix& A, const SparseComponent& x) {
  if (x.loading.size() != A.n_terms())
    fail(ErrorKind::Shape, "component dimension does not match matrix");
  VarianceReport report;
  const std::vector<double> ax = A.multiply(x.loading);
  const double n = norm2(ax);
  report.f_sparse = n * n;
  report.f_star = power_method_dense(A).f_star;
  report.ratio = report.f_sparse / report.f_star;
  return report;
}

}  // namespace sptopics
