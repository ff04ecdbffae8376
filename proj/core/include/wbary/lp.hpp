#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace wbary::lp {

/// Column-oriented view of an equality-form LP  min c'x  s.t. Ax = b, x >= 0.
/// Columns are generated on demand so that very wide problems (product
/// supports) never materialize A.
class ColumnSource {
 public:
  virtual ~ColumnSource() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t columns() const = 0;
  virtual double cost(std::size_t k) const = 0;
  /// Appends the nonzeros (row, value) of column k to `out` (cleared first).
  virtual void column(std::size_t k, std::vector<std::pair<std::size_t, double>>& out) const = 0;
  /// a_k . y ; the default goes through column().
  virtual double dot(std::size_t k, std::span<const double> y) const;
  /// out[k] = cost(k) - a_k . y for every column; defaults to the per-column calls.
  virtual void reduced_costs(std::span<const double> y, std::span<double> out) const;
};

struct Options {
  double optimality_tol = 1e-9;
  /// Entries of the pivot column below this never leave the basis.
  double pivot_tol = 1e-11;
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 5'000'000;
  std::size_t refactor_interval = 64;
  /// Consecutive degenerate pivots before entering columns are chosen by
  /// Bland's rule; a strictly improving pivot switches back to Dantzig.
  std::size_t bland_after = 32;
};

struct Result {
  /// Basic column indices, one per row.
  std::vector<std::size_t> basis;
  /// values[r] is the level of column basis[r]. Indices >= columns() are
  /// artificials left on redundant rows at level 0.
  std::vector<double> values;
  /// Simplex multipliers y with c_B' = y' B.
  std::vector<double> duals;
  double objective = 0.0;
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  /// Min reduced cost over all columns at termination.
  double min_reduced_cost = 0.0;
};

/// Revised simplex with an explicit dense basis inverse and periodic
/// refactorization. Entering columns follow Dantzig's rule, dropping to
/// Bland's rule during long degenerate stretches; ties in the ratio test
/// go to the smallest basic index.
/// If `initial_basis` is empty a phase with artificial columns finds a
/// feasible basis first; otherwise it must be a feasible basis of A.
/// A must have full row rank. Throws Error(NumericalFailure) on singular
/// bases, unboundedness, infeasibility or when max_iterations is exceeded.
Result solve(const ColumnSource& src, std::span<const double> rhs, const std::vector<std::size_t>& initial_basis,
             const Options& opts = {});

}  // namespace wbary::lp
