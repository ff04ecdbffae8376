#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wbary/space.hpp"

namespace wbary {

/// Finitely supported probability measure: sum_i weights[i] * delta(atoms[i]).
/// Atoms may repeat; merge_atoms() gives the canonical form.
struct DiscreteMeasure {
  std::vector<Point> atoms;
  std::vector<double> weights;

  std::size_t size() const noexcept { return atoms.size(); }

  static DiscreteMeasure dirac(Point x) { return {{std::move(x)}, {1.0}}; }
  /// Uniform weights over `atoms`.
  static DiscreteMeasure uniform(std::vector<Point> atoms);
};

/// P = sum_j lambda[j] * delta(measures[j]), all measures over `space`.
struct MeasureEnsemble {
  Space space;
  std::vector<DiscreteMeasure> measures;
  std::vector<double> lambda;

  std::size_t size() const noexcept { return measures.size(); }
};

struct WeightTolerance {
  /// Accepted deviation of sum(weights) from 1.
  double accept = 1e-9;
  /// Deviation after renormalization.
  double renormalized = 1e-12;
};

/// Checks atoms against `s` and weights against the simplex; renormalizes
/// when the sum is within `tol.accept` of 1. Throws NegativeWeight,
/// DimensionMismatch or WeightSumOutOfTolerance.
DiscreteMeasure validate_measure(const DiscreteMeasure& m, const Space& s, WeightTolerance tol = {});

/// Validates every member and lambda (same simplex rule as weights).
MeasureEnsemble validate_ensemble(const MeasureEnsemble& e, WeightTolerance tol = {});

/// Canonical form: atoms whose coordinates agree within `tol` (max-norm)
/// are merged, zero-weight atoms dropped, atoms sorted lexicographically.
DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tol = 1e-12);

/// Compares canonical forms: same atom count, coordinates within `coord_tol`
/// and weights within `weight_tol`.
bool canonically_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double coord_tol = 1e-12,
                       double weight_tol = 1e-12);

/// Atoms mapped pointwise, weights untouched.
DiscreteMeasure pushforward(const DiscreteMeasure& m, const std::function<Point(const Point&)>& map);

/// n i.i.d. draws by inverse-CDF over the weight vector, each with mass 1/n.
/// Output atoms are in draw order (duplicates kept).
DiscreteMeasure sample_empirical(const DiscreteMeasure& m, std::size_t n, std::uint64_t seed);

/// sum_i w_i d(atom_i, x0)^p
double pth_moment(const Space& s, const DiscreteMeasure& m, std::span<const double> x0, double p);

}  // namespace wbary
