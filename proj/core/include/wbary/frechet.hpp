#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wbary/space.hpp"

namespace wbary {

struct FrechetOptions {
  double step_tol = 1e-10;
  std::size_t max_iterations = 100'000;
  /// Objective gap under which two candidates count as tied.
  double tie_tol = 1e-12;
};

struct FrechetResult {
  Point point;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = true;
};

/// sum_j lam_j d(x, pts_j)^p
double frechet_objective(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam,
                         std::span<const double> x);

/// A minimizer of x -> sum_j lam_j d(x, pts_j)^p.
///
///   p = 2, Euclidean   closed form sum_j lam_j pts_j
///   p = 1, Euclidean   Weiszfeld with the subgradient test at data points
///   other p            gradient descent with Armijo backtracking, projected
///                      on the bounding box of the points
///   metric matrix      exhaustive argmin over the listed points
///
/// Among candidates whose objectives tie within tie_tol the
/// lexicographically smallest point wins. Non-convergence is reported
/// through `converged`, never thrown; the best iterate is returned.
FrechetResult frechet_mean(const Space& s, double p, std::span<const Point> pts, std::span<const double> lam,
                           const FrechetOptions& opts = {});

}  // namespace wbary
