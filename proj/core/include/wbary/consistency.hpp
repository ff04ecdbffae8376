#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "wbary/barycenter.hpp"
#include "wbary/deformation.hpp"

namespace wbary {

enum class Framework { GrowingEnsemble, EmpiricalSampling, Deformation };

std::string_view to_string(Framework f) noexcept;

struct ExperimentConfig {
  Framework framework = Framework::EmpiricalSampling;
  double p = 2.0;
  std::uint64_t seed = 0;
  /// Sample sizes n (empirical) or ensemble sizes J (growing, deformation).
  std::vector<std::size_t> sizes;
  std::size_t replications = 1;
  /// Reference ensemble (empirical, growing).
  std::optional<MeasureEnsemble> ensemble;
  /// Template for deformation-generated ensembles.
  std::optional<DiscreteMeasure> templ;
  std::optional<DeformationSpec> deformation;
  /// Size of the generated reference ensemble when `ensemble` is absent.
  std::size_t reference_size = 0;
  Space space;
  BarycenterOptions bary;

  /// Throws Error(InvalidConfig) naming the offending field.
  void validate() const;
};

struct ReportRow {
  Framework framework = Framework::EmpiricalSampling;
  std::size_t size = 0;
  std::size_t replication = 0;
  std::optional<double> dist_to_ref;
  std::optional<double> ensemble_dist;
  std::optional<double> objective;
  double wall_ms = 0.0;
  /// "ok" or the solver error for this row.
  std::string status = "ok";
  /// Intermediate barycenter, kept for artifact dumps.
  std::optional<DiscreteMeasure> barycenter;
};

struct SizeSummary {
  std::size_t size = 0;
  std::size_t ok_rows = 0;
  double median = 0.0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ConsistencyReport {
  std::vector<ReportRow> rows;
  std::vector<SizeSummary> summary;
  /// Reference barycenter (or template for the deformation framework).
  DiscreteMeasure reference;
  /// Set when two exact methods return barycenters with equal objectives
  /// that differ in W_p by more than 1e-6.
  bool reference_nonunique = false;
};

struct RunOptions {
  bool record_timing = false;
};

/// Framework 2: each mu_j replaced by its empirical version of size n
/// (stream seed derived from (seed, j, replication)); distance measured to
/// the barycenter of the exact ensemble.
ConsistencyReport run_empirical_consistency(const ExperimentConfig& cfg, const RunOptions& run = {});

/// Framework 1: P_J from the first J members with renormalized weights;
/// records W_p(bary_J, bary_ref) and the nested ensemble distance
/// W_p(P_J, P_ref).
ConsistencyReport run_growing_ensemble(const ExperimentConfig& cfg, const RunOptions& run = {});

/// Deformation model: J deformed copies of the template; distance measured
/// from bary_J to the template itself.
ConsistencyReport run_deformation(const ExperimentConfig& cfg, const RunOptions& run = {});

/// Dispatches on cfg.framework.
ConsistencyReport run_experiment(const ExperimentConfig& cfg, const RunOptions& run = {});

/// W_p between two finite ensembles as an outer transportation LP whose
/// costs are the inner W_p^p between member measures.
double ensemble_distance(const Space& s, double p, const MeasureEnsemble& a, const MeasureEnsemble& b,
                         const TransportOptions& opts = {});

/// Per-size statistics over the successful rows.
std::vector<SizeSummary> summarize(const std::vector<ReportRow>& rows);

}  // namespace wbary
