#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wbary/matrix.hpp"
#include "wbary/measure.hpp"

namespace wbary {

struct TransportOptions {
  /// Basis is optimal once every reduced cost is >= -optimality_tol.
  double optimality_tol = 1e-9;
  /// Accepted |sum(src) - sum(tgt)|.
  double feasibility_tol = 1e-9;
  std::size_t max_iterations = 10'000'000;
  /// Upper bound on n * m.
  std::size_t max_entries = 100'000'000;
};

struct TransportPlan {
  Matrix plan;
  double cost = 0.0;
  /// Dual potentials: cost(i,j) - u[i] - v[j] >= -tol, with equality on basic cells.
  std::vector<double> u;
  std::vector<double> v;
  std::size_t iterations = 0;
  /// min over all cells of the reduced cost at termination.
  double min_reduced_cost = 0.0;

  struct Triplet {
    std::size_t i;
    std::size_t j;
    double mass;
  };
  /// Cells with positive mass, row-major order.
  std::vector<Triplet> triplets() const;
};

/// Exact transportation simplex: north-west-corner start, u-v potentials on
/// the spanning-tree basis, Bland's rule for the entering cell and
/// lexicographic epsilon perturbation of the supplies (s_i + eps, last demand
/// + n*eps) so that no basis is degenerate. Throws InfeasibleWeights,
/// InvalidArgument (bad cost entries or size guard) or NumericalFailure.
TransportPlan solve_transport(const Matrix& cost, std::span<const double> w_src, std::span<const double> w_tgt,
                              const TransportOptions& opts = {});

/// cost(i,j) = d(mu_i, nu_j)^p
Matrix ground_cost(const Space& s, const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

struct WassersteinResult {
  double value = 0.0;  // W_p
  TransportPlan plan;
};

/// W_p via the transportation LP; the plan is indexed by the atoms of mu
/// (rows) and nu (columns) as given.
WassersteinResult wasserstein(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const TransportOptions& opts = {});

/// W_p on the line by integrating |F_mu^-1(u) - F_nu^-1(u)|^p over the
/// common refinement of cumulative-weight breakpoints. Exact for discrete
/// inputs. Throws UnsupportedSpace unless `s` is Euclidean(1).
double wasserstein_1d(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// W_p^p without the round trip through the p-th root: the quantile
/// integral on the line, the LP optimum otherwise.
double wasserstein_pow(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const TransportOptions& opts = {});

/// wasserstein_1d when `s` is the line, the LP otherwise.
double wasserstein_value(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const TransportOptions& opts = {});

}  // namespace wbary
