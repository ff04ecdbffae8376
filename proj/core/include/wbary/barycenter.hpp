#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wbary/multimarginal.hpp"
#include "wbary/transport.hpp"

namespace wbary {

enum class BarycenterMethod {
  /// Exact multi-marginal LP and T#gamma.
  Multimarginal,
  /// Comonotone coupling and T#gamma; exact on the line for p = 2.
  Comonotone,
  /// Weights on a fixed support, one joint LP.
  FixedSupport,
};

std::string_view to_string(BarycenterMethod m) noexcept;

struct BarycenterResult {
  DiscreteMeasure measure;
  /// sum_j lambda_j W_p^p(measure, mu_j), recomputed from `measure`.
  double objective = 0.0;
  BarycenterMethod method = BarycenterMethod::Multimarginal;
  /// W_p(measure, mu_j) per member.
  std::vector<double> distances;
  /// Value reported by the solver that produced the measure (LP optimum
  /// of the multi-marginal or fixed-support problem).
  double solver_objective = 0.0;
  /// True when the method only yields an upper bound on the variance.
  bool upper_bound = false;
  std::size_t iterations = 0;
};

struct BarycenterOptions {
  MultimarginalOptions mm;
  TransportOptions transport;
  /// Atom cap for the automatic fixed-support grid.
  std::size_t auto_support_cap = 200;
  std::uint64_t seed = 0;
};

/// sum_j lambda_j W_p^p(nu, mu_j)
double ensemble_objective(const Space& s, double p, const MeasureEnsemble& ens, const DiscreteMeasure& nu,
                          const TransportOptions& opts = {}, std::vector<double>* distances = nullptr);

/// Exact barycenter T#gamma of a finite ensemble via the multi-marginal LP.
/// Throws ProductSizeExceeded when prod_j n_j exceeds the cap.
BarycenterResult barycenter_finite(const Space& s, double p, const MeasureEnsemble& ens,
                                   const BarycenterOptions& opts = {});

/// T#gamma for the comonotone coupling (Euclidean(1) only).
BarycenterResult barycenter_comonotone(const Space& s, double p, const MeasureEnsemble& ens,
                                       const BarycenterOptions& opts = {});

/// Optimal weights on `support` minimizing sum_j lambda_j W_p^p(nu_w, mu_j),
/// solved as a single LP over J couplings that share their support marginal.
BarycenterResult barycenter_fixed_support(const Space& s, double p, const MeasureEnsemble& ens,
                                          const std::vector<Point>& support, const BarycenterOptions& opts = {});

/// Multi-marginal when the product fits under the cap; otherwise the
/// comonotone route on the line with p = 2; otherwise fixed support on the
/// (quantized) union of the member supports.
BarycenterResult barycenter_auto(const Space& s, double p, const MeasureEnsemble& ens,
                                 const BarycenterOptions& opts = {});

struct VarianceResult {
  double value = 0.0;
  BarycenterMethod method = BarycenterMethod::Multimarginal;
  bool upper_bound = false;
};

/// inf_nu sum_j lambda_j W_p^p(nu, mu_j) through barycenter_auto.
VarianceResult variance(const Space& s, double p, const MeasureEnsemble& ens, const BarycenterOptions& opts = {});

/// k-atom reduction: greedy farthest-point centers (first center drawn with
/// probability proportional to weight), every atom's mass moved to its
/// nearest center. Centers are nested in k for a fixed seed, so W_p(m, .)
/// is nonincreasing in k.
DiscreteMeasure quantize(const Space& s, const DiscreteMeasure& m, std::size_t k, std::uint64_t seed = 0);

}  // namespace wbary
