#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wbary/frechet.hpp"
#include "wbary/lp.hpp"
#include "wbary/measure.hpp"

namespace wbary {

struct MultiCoupling {
  struct Entry {
    std::vector<std::size_t> index;  // (i_1, ..., i_J)
    double mass = 0.0;
  };
  std::vector<Entry> entries;
  /// sum over entries of mass * mm_cost(index)
  double objective = 0.0;
  /// LP dual bound; equals objective at a certified optimum.
  double dual_objective = 0.0;
  std::size_t iterations = 0;
  /// Number of cost evaluations whose Frechet solve hit its iteration cap.
  std::size_t nonconverged_costs = 0;

  /// Per-measure marginals of the coupling.
  std::vector<std::vector<double>> marginals(std::span<const std::size_t> sizes) const;
};

struct MultimarginalOptions {
  std::size_t max_product_size = 1'000'000;
  lp::Options lp;
  FrechetOptions frechet;
  double weight_tol = 1e-9;
};

struct MultiCost {
  double cost = 0.0;
  Point minimizer;
  bool converged = true;
};

/// inf_x sum_i lam_i d(x_i, x)^p together with the barycenter map value
/// T(x_1, ..., x_J).
MultiCost mm_cost(const Space& s, double p, std::span<const double> lam, std::span<const Point> atoms,
                  const FrechetOptions& opts = {});

/// Optimal vertex of the multi-marginal transportation polytope
/// Gamma(mu_1, ..., mu_J) for the cost tensor mm_cost. Costs are evaluated
/// lazily and memoized per index tuple. The LP keeps one row per atom
/// except the last atom of measures 2..J (those rows are implied).
/// Throws ProductSizeExceeded or InfeasibleWeights.
MultiCoupling solve_multimarginal(const Space& s, double p, const MeasureEnsemble& ens,
                                  const MultimarginalOptions& opts = {});

/// The comonotone coupling of J measures on the line: all quantile
/// functions evaluated on the common refinement of the cumulative-weight
/// breakpoints. At most sum_j n_j - J + 1 entries, and an optimal
/// multi-marginal coupling when p = 2. Throws UnsupportedSpace off the line.
MultiCoupling comonotone_coupling(const Space& s, double p, const MeasureEnsemble& ens,
                                  const FrechetOptions& opts = {});

/// nu = T#gamma: atoms T(x_{i_1}, ..., x_{i_J}) weighted by entry masses,
/// merged within 1e-12.
DiscreteMeasure pushforward_barycenter(const Space& s, double p, const MeasureEnsemble& ens, const MultiCoupling& gamma,
                                       const FrechetOptions& opts = {});

/// Test oracle: the same LP built as an explicit dense constraint matrix
/// (all sum_j n_j rows, redundancy included) and solved by an independent
/// two-phase tableau simplex. Throws ProductSizeExceeded above `max_product`.
MultiCoupling brute_force_multimarginal(const Space& s, double p, const MeasureEnsemble& ens,
                                        std::size_t max_product = 10'000, const FrechetOptions& opts = {});

/// prod_j n_j, saturating.
std::size_t product_size(const MeasureEnsemble& ens) noexcept;

}  // namespace wbary
