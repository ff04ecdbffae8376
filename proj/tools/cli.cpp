#include "cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "wbary/barycenter.hpp"
#include "wbary/consistency.hpp"
#include "wbary/error.hpp"
#include "wbary/io.hpp"

namespace wbary::cli {

namespace {

using nlohmann::json;

constexpr const char* kUniquenessNote =
    "barycenters of finitely supported measures need not be unique; this is the one selected by the "
    "lexicographic barycenter map and the deterministic pivot rule";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ProductSizeExceeded:
    case ErrorKind::NumericalFailure:
    case ErrorKind::InfeasibleWeights: return kSolverError;
    case ErrorKind::InvalidConfig: return kConfigError;
    default: return kValidationError;
  }
}

struct Globals {
  double p = 2.0;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::size_t max_product_size = 1'000'000;
  bool seed_given = false;

  WeightTolerance weights() const { return {tol, 1e-12}; }

  BarycenterOptions bary() const {
    BarycenterOptions o;
    o.mm.max_product_size = max_product_size;
    o.mm.weight_tol = tol;
    o.mm.lp.optimality_tol = tol;
    o.mm.lp.feasibility_tol = tol;
    o.transport = transport();
    o.seed = seed;
    return o;
  }

  TransportOptions transport() const {
    TransportOptions o;
    o.optimality_tol = tol;
    o.feasibility_tol = tol;
    return o;
  }
};

void emit(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

MeasureEnsemble load_ensemble(const std::string& path, const Globals& g) {
  try {
    return io::parse_ensemble(io::read_file(path), g.weights());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

io::MeasureFile load_measure(const std::string& path, const Globals& g) {
  try {
    return io::parse_measure(io::read_file(path), g.weights());
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.detail());
  }
}

int cmd_dist(const Globals& g, const std::string& a_path, const std::string& b_path, const std::string& plan_path,
             std::ostream& out) {
  const io::MeasureFile a = load_measure(a_path, g);
  const io::MeasureFile b = load_measure(b_path, g);
  if (!(a.space == b.space)) throw Error(ErrorKind::DimensionMismatch, "the two measures live in different spaces");
  const WassersteinResult w = wasserstein(a.space, g.p, a.measure, b.measure, g.transport());
  if (!plan_path.empty()) io::write_file(plan_path, io::dump_plan(w.plan));
  emit(out, {{"w_p", w.value}, {"p", g.p}});
  return kOk;
}

int cmd_bary(const Globals& g, const std::string& in, const std::string& out_path, const std::string& method,
             const std::string& support_path, std::ostream& out) {
  const MeasureEnsemble ens = load_ensemble(in, g);
  const BarycenterOptions opts = g.bary();
  BarycenterResult res;
  if (method == "fixed") {
    if (support_path.empty()) throw Error(ErrorKind::InvalidArgument, "--method fixed needs --support");
    std::vector<Point> support;
    try {
      support = io::parse_support(io::read_file(support_path), ens.space);
    } catch (const Error& e) {
      throw Error(e.kind(), support_path + ": " + e.detail());
    }
    res = barycenter_fixed_support(ens.space, g.p, ens, support, opts);
  } else if (method == "mmot") {
    res = barycenter_finite(ens.space, g.p, ens, opts);
  } else {
    res = barycenter_auto(ens.space, g.p, ens, opts);
  }
  if (!out_path.empty()) io::write_file(out_path, io::dump_measure(ens.space, res.measure));
  json summary = {{"objective", res.objective},
                  {"p", g.p},
                  {"method", std::string(to_string(res.method))},
                  {"solver_objective", res.solver_objective},
                  {"upper_bound", res.upper_bound},
                  {"atoms", res.measure.size()},
                  {"distances", res.distances},
                  {"note", kUniquenessNote}};
  emit(out, summary);
  return kOk;
}

int cmd_mmot(const Globals& g, const std::string& in, const std::string& out_path, const std::string& bary_path,
             std::ostream& out) {
  const MeasureEnsemble ens = load_ensemble(in, g);
  const BarycenterOptions opts = g.bary();
  const MultiCoupling gamma = solve_multimarginal(ens.space, g.p, ens, opts.mm);
  io::write_file(out_path, io::dump_coupling(gamma));
  if (!bary_path.empty()) {
    const DiscreteMeasure nu = pushforward_barycenter(ens.space, g.p, ens, gamma, opts.mm.frechet);
    io::write_file(bary_path, io::dump_measure(ens.space, nu));
  }
  emit(out, {{"objective", gamma.objective},
             {"dual_objective", gamma.dual_objective},
             {"entries", gamma.entries.size()},
             {"iterations", gamma.iterations},
             {"p", g.p}});
  return kOk;
}

int cmd_variance(const Globals& g, const std::string& in, std::ostream& out) {
  const MeasureEnsemble ens = load_ensemble(in, g);
  const VarianceResult v = variance(ens.space, g.p, ens, g.bary());
  emit(out, {{"variance", v.value},
             {"p", g.p},
             {"method", std::string(to_string(v.method))},
             {"upper_bound", v.upper_bound}});
  return kOk;
}

int cmd_quantize(const Globals& g, const std::string& in, std::size_t k, const std::string& out_path,
                 std::ostream& out) {
  const io::MeasureFile m = load_measure(in, g);
  const DiscreteMeasure q = quantize(m.space, m.measure, k, g.seed);
  io::write_file(out_path, io::dump_measure(m.space, q));
  emit(out, {{"atoms", q.size()}, {"k", k}, {"w_p", wasserstein_value(m.space, g.p, m.measure, q)}, {"p", g.p}});
  return kOk;
}

int cmd_experiment(const Globals& g, const std::string& config_path, const std::string& out_path,
                   const std::string& artifacts, bool timing, std::ostream& out) {
  ExperimentConfig cfg;
  bool config_sets_cap = false;
  try {
    const std::string text = io::read_file(config_path);
    cfg = io::parse_experiment_config(text);
    config_sets_cap = json::parse(text).contains("max_product_size");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(ErrorKind::InvalidConfig, config_path + ": " + e.detail());
  }
  if (g.seed_given) cfg.seed = g.seed;
  const std::size_t cap = cfg.bary.mm.max_product_size;
  cfg.bary = g.bary();
  if (config_sets_cap) cfg.bary.mm.max_product_size = cap;
  cfg.bary.seed = cfg.seed;

  RunOptions run;
  run.record_timing = timing;
  const ConsistencyReport report = run_experiment(cfg, run);
  io::write_file(out_path, io::report_csv(report));

  if (!artifacts.empty()) {
    std::filesystem::create_directories(artifacts);
    const std::filesystem::path dir(artifacts);
    io::write_file(dir / "reference.json", io::dump_measure(cfg.space, report.reference));
    for (const auto& row : report.rows) {
      if (!row.barycenter) continue;
      const std::string name = "bary_" + std::to_string(row.size) + "_" + std::to_string(row.replication) + ".json";
      io::write_file(dir / name, io::dump_measure(cfg.space, *row.barycenter));
    }
  }

  json summary = json::array();
  std::size_t failed = 0;
  for (const auto& r : report.rows)
    if (r.status != "ok") ++failed;
  for (const auto& s : report.summary) {
    summary.push_back({{"size", s.size},
                       {"ok_rows", s.ok_rows},
                       {"median", s.median},
                       {"mean", s.mean},
                       {"min", s.min},
                       {"max", s.max}});
  }
  emit(out, {{"framework", std::string(to_string(cfg.framework))},
             {"p", cfg.p},
             {"seed", cfg.seed},
             {"rows", report.rows.size()},
             {"failed_rows", failed},
             {"reference_nonunique", report.reference_nonunique},
             {"summary", summary}});
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact Wasserstein distances and barycenters of finitely supported measures", "wbary"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--p", g.p, "Transport cost exponent (>= 1)")->default_val(2.0)->check(CLI::Range(1.0, 1e6));
  auto* seed_opt = app.add_option("--seed", g.seed, "Master seed for all randomness")->default_val(0);
  app.add_option("--tol", g.tol, "Weight and optimality tolerance")->default_val(1e-9)->check(CLI::PositiveNumber);
  app.add_option("--max-product-size", g.max_product_size, "Cap on prod_j n_j for the multi-marginal LP")
      ->default_val(1'000'000);

  std::string in_a, in_b, plan, in, out_path, bary_out, method = "mmot", support, config, artifacts;
  std::size_t k = 1;
  bool timing = false;

  auto* dist = app.add_subcommand("dist", "W_p between two measure files");
  dist->add_option("--in-a", in_a, "First measure")->required();
  dist->add_option("--in-b", in_b, "Second measure")->required();
  dist->add_option("--plan", plan, "Write the optimal plan as (i, j, mass) triplets");

  auto* bary = app.add_subcommand("bary", "Barycenter of an ensemble");
  bary->add_option("--in", in, "Ensemble file")->required();
  bary->add_option("--out", out_path, "Barycenter measure file")->required();
  bary->add_option("--method", method, "auto | mmot | fixed")
      ->check(CLI::IsMember({"auto", "mmot", "fixed"}))
      ->default_val("mmot");
  bary->add_option("--support", support, "Support file for --method fixed");

  auto* mmot = app.add_subcommand("mmot", "Multi-marginal optimal coupling");
  mmot->add_option("--in", in, "Ensemble file")->required();
  mmot->add_option("--out", out_path, "Coupling file")->required();
  mmot->add_option("--bary", bary_out, "Also write T#gamma");

  auto* var = app.add_subcommand("variance", "Wasserstein variance of an ensemble");
  var->add_option("--in", in, "Ensemble file")->required();

  auto* exp = app.add_subcommand("experiment", "Consistency experiment");
  exp->add_option("--config", config, "Experiment config")->required();
  exp->add_option("--out", out_path, "CSV report")->required();
  exp->add_option("--keep-artifacts", artifacts, "Directory for intermediate measures");
  exp->add_flag("--timing", timing, "Fill wall_ms (makes the report nondeterministic)");

  auto* quant = app.add_subcommand("quantize", "Reduce a measure to k atoms");
  quant->add_option("--in", in, "Measure file")->required();
  quant->add_option("--k", k, "Number of atoms")->required()->check(CLI::PositiveNumber);
  quant->add_option("--out", out_path, "Output measure file")->required();

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationError;
  }
  g.seed_given = seed_opt->count() > 0;

  try {
    if (*dist) return cmd_dist(g, in_a, in_b, plan, out);
    if (*bary) return cmd_bary(g, in, out_path, method, support, out);
    if (*mmot) return cmd_mmot(g, in, out_path, bary_out, out);
    if (*var) return cmd_variance(g, in, out);
    if (*exp) return cmd_experiment(g, config, out_path, artifacts, timing, out);
    if (*quant) return cmd_quantize(g, in, k, out_path, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kSolverError;
  }
  return kValidationError;
}

}  // namespace wbary::cli
