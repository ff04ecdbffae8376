#include "wbary/consistency.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <future>
#include <numeric>
#include <string>
#include <thread>

#include "wbary/error.hpp"
#include "wbary/rng.hpp"

namespace wbary {

std::string_view to_string(Framework f) noexcept {
  switch (f) {
    case Framework::GrowingEnsemble: return "growing_ensemble";
    case Framework::EmpiricalSampling: return "empirical_sampling";
    case Framework::Deformation: return "deformation";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); };
  if (!(p >= 1.0)) bad("p must be >= 1");
  if (sizes.empty()) bad("sizes must be a nonempty list");
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    if (sizes[k] == 0) bad("sizes[" + std::to_string(k) + "] must be positive");
    if (k > 0 && sizes[k] <= sizes[k - 1]) bad("sizes must be strictly increasing");
  }
  if (replications == 0) bad("replications must be >= 1");
  const bool generated = templ.has_value() && deformation.has_value();
  switch (framework) {
    case Framework::EmpiricalSampling:
      if (!ensemble && !generated) {
        bad("empirical_sampling needs an 'ensemble' or a 'template' with a 'deformation'");
      }
      if (!ensemble && reference_size == 0) bad("reference_size must be positive for generated ensembles");
      break;
    case Framework::GrowingEnsemble: {
      if (!ensemble && !generated) bad("growing_ensemble needs an 'ensemble' or a 'template' with a 'deformation'");
      const std::size_t ref = ensemble ? ensemble->size() : reference_size;
      if (!ensemble && reference_size == 0) bad("reference_size must be positive for generated ensembles");
      if (sizes.back() > ref) {
        bad("sizes exceed the reference ensemble size " + std::to_string(ref));
      }
      break;
    }
    case Framework::Deformation:
      if (!generated) bad("deformation framework needs a 'template' and a 'deformation'");
      break;
  }
  if (deformation) deformation->validate();
}

namespace {

using Clock = std::chrono::steady_clock;

// Runs work(0..count) and keeps results in index order.
template <typename T>
std::vector<T> ordered_map(std::size_t count, const std::function<T(std::size_t)>& work) {
  std::vector<T> out(count);
  const std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || count < 2) {
    for (std::size_t k = 0; k < count; ++k) out[k] = work(k);
    return out;
  }
  for (std::size_t base = 0; base < count; base += threads) {
    std::vector<std::future<T>> jobs;
    for (std::size_t k = base; k < std::min(count, base + threads); ++k)
      jobs.push_back(std::async(std::launch::async, work, k));
    for (std::size_t k = 0; k < jobs.size(); ++k) out[base + k] = jobs[k].get();
  }
  return out;
}

bool on_line(const Space& s) { return s.is_euclidean() && s.point_dim() == 1; }

MeasureEnsemble prefix(const MeasureEnsemble& ens, std::size_t count) {
  MeasureEnsemble out;
  out.space = ens.space;
  out.measures.assign(ens.measures.begin(), ens.measures.begin() + static_cast<std::ptrdiff_t>(count));
  out.lambda.assign(ens.lambda.begin(), ens.lambda.begin() + static_cast<std::ptrdiff_t>(count));
  const double total = std::accumulate(out.lambda.begin(), out.lambda.end(), 0.0);
  for (double& l : out.lambda) l /= total;
  return out;
}

// Nested distances are skipped when an inner LP would be too large.
bool nested_affordable(const MeasureEnsemble& a, const MeasureEnsemble& b) {
  if (on_line(a.space)) return true;
  std::size_t na = 0, nb = 0;
  for (const auto& m : a.measures) na = std::max(na, m.size());
  for (const auto& m : b.measures) nb = std::max(nb, m.size());
  return na * nb <= 250'000;
}

DeformationSpec replication_spec(const ExperimentConfig& cfg, std::size_t rep) {
  DeformationSpec spec = *cfg.deformation;
  spec.seed = derive_seed(cfg.seed, {spec.seed, static_cast<std::uint64_t>(rep)});
  return spec;
}

MeasureEnsemble reference_ensemble(const ExperimentConfig& cfg, std::size_t rep) {
  if (cfg.ensemble) return *cfg.ensemble;
  return generate_deformation_ensemble(cfg.space, *cfg.templ, replication_spec(cfg, rep), cfg.reference_size);
}

struct Reference {
  DiscreteMeasure measure;
  bool nonunique = false;
};

Reference reference_barycenter(const ExperimentConfig& cfg, const MeasureEnsemble& ens) {
  const BarycenterResult ref = barycenter_auto(cfg.space, cfg.p, ens, cfg.bary);
  Reference out{ref.measure, false};
  if (ref.method == BarycenterMethod::Multimarginal && on_line(cfg.space) && cfg.p == 2.0) {
    const BarycenterResult alt = barycenter_comonotone(cfg.space, cfg.p, ens, cfg.bary);
    const double scale = 1.0 + std::abs(ref.objective);
    if (std::abs(alt.objective - ref.objective) <= 1e-8 * scale &&
        wasserstein_value(cfg.space, cfg.p, alt.measure, ref.measure) > 1e-6) {
      out.nonunique = true;
    }
  }
  return out;
}

ReportRow fill_row(const ExperimentConfig& cfg, const RunOptions& run, std::size_t size, std::size_t rep,
                   const std::function<void(ReportRow&)>& body) {
  ReportRow row;
  row.framework = cfg.framework;
  row.size = size;
  row.replication = rep;
  const auto t0 = Clock::now();
  try {
    body(row);
  } catch (const std::exception& e) {
    row.status = e.what();
    row.dist_to_ref.reset();
    row.ensemble_dist.reset();
    row.objective.reset();
    row.barycenter.reset();
  }
  if (run.record_timing) {
    row.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  }
  return row;
}

ConsistencyReport finish(std::vector<ReportRow> rows, Reference ref) {
  ConsistencyReport report;
  report.rows = std::move(rows);
  report.summary = summarize(report.rows);
  report.reference = std::move(ref.measure);
  report.reference_nonunique = ref.nonunique;
  return report;
}

}  // namespace

double ensemble_distance(const Space& s, double p, const MeasureEnsemble& a, const MeasureEnsemble& b,
                         const TransportOptions& opts) {
  Matrix cost(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t l = 0; l < b.size(); ++l) cost(k, l) = wasserstein_pow(s, p, a.measures[k], b.measures[l], opts);
  const TransportPlan outer = solve_transport(cost, a.lambda, b.lambda, opts);
  return std::pow(std::max(0.0, outer.cost), 1.0 / p);
}

std::vector<SizeSummary> summarize(const std::vector<ReportRow>& rows) {
  std::vector<std::size_t> sizes;
  for (const auto& r : rows)
    if (std::find(sizes.begin(), sizes.end(), r.size) == sizes.end()) sizes.push_back(r.size);
  std::vector<SizeSummary> out;
  for (std::size_t size : sizes) {
    std::vector<double> d;
    for (const auto& r : rows)
      if (r.size == size && r.status == "ok" && r.dist_to_ref) d.push_back(*r.dist_to_ref);
    SizeSummary s;
    s.size = size;
    s.ok_rows = d.size();
    if (!d.empty()) {
      std::sort(d.begin(), d.end());
      const std::size_t h = d.size() / 2;
      s.median = d.size() % 2 == 1 ? d[h] : 0.5 * (d[h - 1] + d[h]);
      s.mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
      s.min = d.front();
      s.max = d.back();
    }
    out.push_back(s);
  }
  return out;
}

ConsistencyReport run_empirical_consistency(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  if (cfg.framework != Framework::EmpiricalSampling) {
    throw Error(ErrorKind::InvalidConfig, "framework must be empirical_sampling");
  }
  const MeasureEnsemble ens = reference_ensemble(cfg, 0);
  Reference ref = reference_barycenter(cfg, ens);

  const std::size_t reps = cfg.replications;
  auto rows = ordered_map<ReportRow>(cfg.sizes.size() * reps, [&](std::size_t item) {
    const std::size_t n = cfg.sizes[item / reps];
    const std::size_t rep = item % reps;
    return fill_row(cfg, run, n, rep, [&](ReportRow& row) {
      MeasureEnsemble sampled;
      sampled.space = ens.space;
      sampled.lambda = ens.lambda;
      for (std::size_t j = 0; j < ens.size(); ++j) {
        const auto seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(j), static_cast<std::uint64_t>(rep)});
        sampled.measures.push_back(merge_atoms(sample_empirical(ens.measures[j], n, seed)));
      }
      const BarycenterResult bary = barycenter_auto(cfg.space, cfg.p, sampled, cfg.bary);
      row.dist_to_ref = wasserstein_value(cfg.space, cfg.p, bary.measure, ref.measure, cfg.bary.transport);
      if (nested_affordable(sampled, ens)) {
        row.ensemble_dist = ensemble_distance(cfg.space, cfg.p, sampled, ens, cfg.bary.transport);
      }
      row.objective = bary.objective;
      row.barycenter = bary.measure;
    });
  });
  return finish(std::move(rows), std::move(ref));
}

ConsistencyReport run_growing_ensemble(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  if (cfg.framework != Framework::GrowingEnsemble) {
    throw Error(ErrorKind::InvalidConfig, "framework must be growing_ensemble");
  }
  const std::size_t reps = cfg.replications;
  std::vector<MeasureEnsemble> refs;
  std::vector<Reference> ref_bary;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    refs.push_back(reference_ensemble(cfg, rep));
    ref_bary.push_back(reference_barycenter(cfg, refs.back()));
  }

  auto rows = ordered_map<ReportRow>(cfg.sizes.size() * reps, [&](std::size_t item) {
    const std::size_t J = cfg.sizes[item / reps];
    const std::size_t rep = item % reps;
    return fill_row(cfg, run, J, rep, [&](ReportRow& row) {
      const MeasureEnsemble pj = prefix(refs[rep], J);
      const BarycenterResult bary = barycenter_auto(cfg.space, cfg.p, pj, cfg.bary);
      row.dist_to_ref = wasserstein_value(cfg.space, cfg.p, bary.measure, ref_bary[rep].measure, cfg.bary.transport);
      if (nested_affordable(pj, refs[rep])) {
        row.ensemble_dist = ensemble_distance(cfg.space, cfg.p, pj, refs[rep], cfg.bary.transport);
      }
      row.objective = bary.objective;
      row.barycenter = bary.measure;
    });
  });
  Reference first = ref_bary.front();
  for (const auto& r : ref_bary) first.nonunique = first.nonunique || r.nonunique;
  return finish(std::move(rows), std::move(first));
}

ConsistencyReport run_deformation(const ExperimentConfig& cfg, const RunOptions& run) {
  cfg.validate();
  if (cfg.framework != Framework::Deformation) throw Error(ErrorKind::InvalidConfig, "framework must be deformation");
  const std::size_t reps = cfg.replications;
  const std::size_t largest = cfg.sizes.back();
  std::vector<MeasureEnsemble> pool;
  for (std::size_t rep = 0; rep < reps; ++rep) {
    pool.push_back(generate_deformation_ensemble(cfg.space, *cfg.templ, replication_spec(cfg, rep), largest));
  }

  auto rows = ordered_map<ReportRow>(cfg.sizes.size() * reps, [&](std::size_t item) {
    const std::size_t J = cfg.sizes[item / reps];
    const std::size_t rep = item % reps;
    return fill_row(cfg, run, J, rep, [&](ReportRow& row) {
      const MeasureEnsemble pj = prefix(pool[rep], J);
      const BarycenterResult bary = barycenter_auto(cfg.space, cfg.p, pj, cfg.bary);
      row.dist_to_ref = wasserstein_value(cfg.space, cfg.p, bary.measure, *cfg.templ, cfg.bary.transport);
      row.objective = bary.objective;
      row.barycenter = bary.measure;
    });
  });
  return finish(std::move(rows), Reference{*cfg.templ, false});
}

ConsistencyReport run_experiment(const ExperimentConfig& cfg, const RunOptions& run) {
  switch (cfg.framework) {
    case Framework::EmpiricalSampling: return run_empirical_consistency(cfg, run);
    case Framework::GrowingEnsemble: return run_growing_ensemble(cfg, run);
    case Framework::Deformation: return run_deformation(cfg, run);
  }
  throw Error(ErrorKind::InvalidConfig, "unknown framework");
}

}  // namespace wbary
