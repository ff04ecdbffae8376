#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wbary/measure.hpp"
#include "wbary/rng.hpp"

namespace wbary {

/// Law of a scalar parameter. `two_point` draws +-value; when `balanced`
/// the sign alternates with the draw index instead of being random.
struct ScalarLaw {
  enum class Kind { Constant, Uniform, Normal, LogNormal, TwoPoint };
  Kind kind = Kind::Constant;
  double a = 0.0;  // constant value | uniform low | normal mean | lognormal log-mean | two-point magnitude
  double b = 0.0;  // uniform high | normal sd | lognormal log-sd
  bool balanced = false;

  static ScalarLaw constant(double v) { return {Kind::Constant, v, 0.0, false}; }
  static ScalarLaw uniform(double lo, double hi) { return {Kind::Uniform, lo, hi, false}; }
  static ScalarLaw normal(double mean, double sd) { return {Kind::Normal, mean, sd, false}; }
  static ScalarLaw two_point(double c, bool balanced = false) { return {Kind::TwoPoint, c, 0.0, balanced}; }

  double draw(SplitMix64& rng, std::uint64_t draw_index) const;
};

/// Random deformation family T applied to a template: mu_j = (T_j)#mu.
struct DeformationSpec {
  enum class Kind { Identity, Translation, Scaling, Affine, MonotoneSpline };
  Kind kind = Kind::Identity;
  std::size_t dim = 1;
  /// Translation: per-coordinate shift. Affine: shift part.
  ScalarLaw shift;
  /// Scaling: factor about `center`. Must be strictly positive.
  ScalarLaw factor = ScalarLaw::constant(1.0);
  Point center;
  /// Affine: matrix = I + perturbation entries drawn i.i.d. from this law.
  ScalarLaw perturbation;
  /// Monotone spline: knot positions (strictly increasing) and the law of
  /// the log-slope on each segment.
  std::vector<double> knots;
  ScalarLaw log_slope;
  std::uint64_t seed = 0;

  /// Throws InvalidConfig for laws that can violate the invariants
  /// (nonpositive scaling factors, unordered knots).
  void validate() const;
};

/// A drawn deformation T_j: x -> T_j(x).
class Deformation {
 public:
  static Deformation identity(std::size_t dim);
  static Deformation translation(Point shift);
  static Deformation scaling(double factor, Point center);
  /// Throws InvalidArgument when `matrix` (row-major dim x dim) is singular.
  static Deformation affine(std::vector<double> matrix, Point shift);
  /// Piecewise-linear increasing map through (knots[k], values[k]),
  /// extended linearly with the end slopes.
  static Deformation monotone_spline(std::vector<double> knots, std::vector<double> values);

  Point operator()(const Point& x) const;
  std::size_t dim() const noexcept { return dim_; }

 private:
  DeformationSpec::Kind kind_ = DeformationSpec::Kind::Identity;
  std::size_t dim_ = 1;
  std::vector<double> matrix_;
  Point shift_;
  double factor_ = 1.0;
  Point center_;
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Draws the j-th realization (0-based) of `spec`; deterministic in
/// (spec.seed, j).
Deformation draw_deformation(const DeformationSpec& spec, std::size_t j);

/// J measures T_j#template with uniform lambda.
MeasureEnsemble generate_deformation_ensemble(const Space& space, const DiscreteMeasure& templ,
                                              const DeformationSpec& spec, std::size_t count);

}  // namespace wbary
