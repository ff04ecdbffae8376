// Acceptance gate: one line per criterion, nonzero exit if any fails.
//   acceptance <wbary-executable> <scratch-dir> <reference-config>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "wbary/barycenter.hpp"
#include "wbary/consistency.hpp"
#include "wbary/io.hpp"
#include "wbary/multimarginal.hpp"
#include "wbary/transport.hpp"

using namespace wbary;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Verdict()> body;
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

MeasureEnsemble random_ensemble(std::mt19937_64& g, std::size_t J, std::size_t dim, std::size_t max_atoms) {
  MeasureEnsemble e;
  e.space = Space::euclidean(dim);
  for (std::size_t j = 0; j < J; ++j)
    e.measures.push_back(testutil::random_measure(g, dim, testutil::pick(g, 1, max_atoms)));
  e.lambda = testutil::random_simplex(g, J);
  return e;
}

Verdict metric_axioms() {
  std::mt19937_64 g(1001);
  double worst_sym = 0.0, worst_tri = -1e300;
  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 3);
    const Space s = Space::euclidean(dim);
    const double p = std::vector{1.0, 2.0, 3.0}[testutil::pick(g, 0, 2)];
    const DiscreteMeasure a = testutil::random_measure(g, dim, testutil::pick(g, 1, 20));
    const DiscreteMeasure b = testutil::random_measure(g, dim, testutil::pick(g, 1, 20));
    const DiscreteMeasure c = testutil::random_measure(g, dim, testutil::pick(g, 1, 20));
    const double ab = wasserstein(s, p, a, b).value, ba = wasserstein(s, p, b, a).value;
    const double bc = wasserstein(s, p, b, c).value, ac = wasserstein(s, p, a, c).value;
    worst_sym = std::max(worst_sym, std::abs(ab - ba));
    worst_tri = std::max(worst_tri, ac - ab - bc);
  }
  return {worst_sym <= 1e-8 && worst_tri <= 1e-8,
          "max |W(a,b)-W(b,a)| = " + fmt(worst_sym) + ", max triangle excess = " + fmt(worst_tri)};
}

Verdict oracle_1d() {
  std::mt19937_64 g(1002);
  const Space line = Space::euclidean(1);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const double p = std::vector{1.0, 2.0, 3.0}[t % 3];
    const DiscreteMeasure a = testutil::random_measure(g, 1, testutil::pick(g, 1, 50));
    const DiscreteMeasure b = testutil::random_measure(g, 1, testutil::pick(g, 1, 50));
    const double lp = wasserstein(line, p, a, b).value;
    const double q = std::pow(
        oracle::quantile_wpp(testutil::coords_1d(a), a.weights, testutil::coords_1d(b), b.weights, p), 1.0 / p);
    worst = std::max({worst, std::abs(lp - q), std::abs(lp - wasserstein_1d(line, p, a, b))});
  }
  return {worst <= 1e-8, "max |LP - quantile| = " + fmt(worst)};
}

Verdict multimarginal_oracle() {
  std::mt19937_64 g(1003);
  double worst = 0.0, worst_pair = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t J = testutil::pick(g, 2, 3), dim = testutil::pick(g, 1, 2);
    const double p = std::vector{1.0, 2.0, 3.0}[t % 3];
    const MeasureEnsemble e = random_ensemble(g, J, dim, 4);
    const MultiCoupling prod = solve_multimarginal(e.space, p, e);
    const MultiCoupling ref = brute_force_multimarginal(e.space, p, e);
    worst = std::max(worst, std::abs(prod.objective - ref.objective));
    if (J == 2) {
      const auto& a = e.measures[0];
      const auto& b = e.measures[1];
      Matrix cost(a.size(), b.size());
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
          const std::vector<Point> tuple{a.atoms[i], b.atoms[j]};
          cost(i, j) = mm_cost(e.space, p, e.lambda, tuple).cost;
        }
      worst_pair = std::max(worst_pair, std::abs(prod.objective - solve_transport(cost, a.weights, b.weights).cost));
    }
  }
  return {worst <= 1e-8 && worst_pair <= 1e-8,
          "max |production - dense oracle| = " + fmt(worst) + ", J=2 max |mm - pairwise| = " + fmt(worst_pair)};
}

Verdict optimality_inequalities() {
  std::mt19937_64 g(1004);
  double worst_upper = -1e300, worst_lower = -1e300;
  for (int t = 0; t < 50; ++t) {
    const std::size_t J = testutil::pick(g, 2, 3), dim = testutil::pick(g, 1, 2);
    const double p = std::vector{1.0, 2.0, 3.0}[t % 3];
    const MeasureEnsemble e = random_ensemble(g, J, dim, 4);
    const MultiCoupling c = solve_multimarginal(e.space, p, e);
    const DiscreteMeasure nu = pushforward_barycenter(e.space, p, e, c);
    worst_upper = std::max(worst_upper, ensemble_objective(e.space, p, e, nu) - c.objective);
    for (int k = 0; k < 100; ++k) {
      const DiscreteMeasure cand = testutil::random_measure(g, dim, testutil::pick(g, 1, 10));
      worst_lower = std::max(worst_lower, c.objective - ensemble_objective(e.space, p, e, cand));
    }
  }
  return {worst_upper <= 1e-8 && worst_lower <= 1e-8,
          "max (objective(T#gamma) - LP) = " + fmt(worst_upper) + ", max (LP - objective(candidate)) = " +
              fmt(worst_lower)};
}

Verdict quantile_barycenter() {
  std::mt19937_64 g(1005);
  const Space line = Space::euclidean(1);
  double worst = 0.0;
  for (int t = 0; t < 30; ++t) {
    // the first instance is the largest allowed size
    const std::size_t J = t == 0 ? 4 : testutil::pick(g, 2, 4), n = t == 0 ? 20 : testutil::pick(g, 1, 20);
    MeasureEnsemble e;
    e.space = line;
    std::vector<oracle::Vec> samples;
    for (std::size_t j = 0; j < J; ++j) {
      e.measures.push_back(testutil::random_uniform_measure(g, 1, n));
      samples.push_back(testutil::coords_1d(e.measures.back()));
    }
    e.lambda.assign(J, 1.0 / static_cast<double>(J));
    const BarycenterResult r = barycenter_finite(line, 2.0, e);
    worst = std::max(worst, std::abs(r.objective - oracle::quantile_average_objective(samples, e.lambda)));
  }
  return {worst <= 1e-8, "max |barycenter objective - quantile-average objective| = " + fmt(worst)};
}

Verdict consistency(const fs::path& config) {
  const ExperimentConfig cfg = io::parse_experiment_config(io::read_file(config));
  const ConsistencyReport r = run_experiment(cfg);
  double m10 = -1, m1000 = -1;
  std::size_t failed = 0;
  for (const auto& row : r.rows) failed += row.status != "ok";
  for (const auto& s : r.summary) {
    if (s.size == 10) m10 = s.median;
    if (s.size == 1000) m1000 = s.median;
  }
  const bool ok = failed == 0 && m10 > 0 && m1000 >= 0 && m1000 < 0.5 * m10 && m1000 < 0.1 &&
                  cfg.replications == 20 && cfg.p == 2.0;
  return {ok, "median W2 n=10: " + fmt(m10) + ", n=1000: " + fmt(m1000) + " (ratio " + fmt(m1000 / m10) +
                  "), failed rows " + std::to_string(failed)};
}

Verdict equivariance() {
  std::mt19937_64 g(1007);
  double worst_shift = 0.0, worst_scale = 0.0;
  bool shapes = true;
  for (int t = 0; t < 50; ++t) {
    const std::size_t J = testutil::pick(g, 2, 3), dim = testutil::pick(g, 1, 3);
    const MeasureEnsemble e = random_ensemble(g, J, dim, 4);
    const Point v = testutil::random_point(g, dim);
    MeasureEnsemble moved = e;
    for (auto& m : moved.measures)
      for (auto& x : m.atoms)
        for (std::size_t k = 0; k < dim; ++k) x[k] += v[k];
    const DiscreteMeasure a = barycenter_finite(e.space, 2.0, e).measure;
    const DiscreteMeasure b = barycenter_finite(e.space, 2.0, moved).measure;
    if (a.size() != b.size()) {
      shapes = false;
      continue;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      worst_shift = std::max(worst_shift, std::abs(a.weights[i] - b.weights[i]));
      for (std::size_t k = 0; k < dim; ++k)
        worst_shift = std::max(worst_shift, std::abs(b.atoms[i][k] - a.atoms[i][k] - v[k]));
    }

    const double p = std::vector{1.0, 2.0, 3.0}[t % 3];
    const double factor = std::uniform_real_distribution<double>(0.1, 10.0)(g);
    DiscreteMeasure m0 = e.measures[0], m1 = e.measures[1];
    const double w = wasserstein(e.space, p, m0, m1).value;
    for (auto* m : {&m0, &m1})
      for (auto& x : m->atoms)
        for (auto& c : x) c *= factor;
    const double ws = wasserstein(e.space, p, m0, m1).value;
    worst_scale = std::max(worst_scale, std::abs(ws - factor * w) / std::max(1.0, factor * w));
  }
  return {shapes && worst_shift <= 1e-9 && worst_scale <= 1e-9,
          "max translation defect = " + fmt(worst_shift) + ", max relative scaling defect = " + fmt(worst_scale)};
}

std::string slurp(const fs::path& p) { return fs::exists(p) ? io::read_file(p) : std::string("<missing>"); }

Verdict determinism(const std::string& exe, const fs::path& scratch, const fs::path& config) {
  fs::remove_all(scratch);
  fs::create_directories(scratch);
  const auto put = [&](const std::string& name, const std::string& text) {
    io::write_file(scratch / name, text);
    return (scratch / name).string();
  };
  std::mt19937_64 g(1008);
  const Space plane = Space::euclidean(2);
  const auto a = put("a.json", io::dump_measure(plane, testutil::random_measure(g, 2, 12)));
  const auto b = put("b.json", io::dump_measure(plane, testutil::random_measure(g, 2, 9)));
  const auto ens = put("ens.json", io::dump_ensemble(random_ensemble(g, 3, 2, 5)));
  const auto grid = put("grid.json", R"({"points":[[0,0],[1,0],[0,1],[1,1],[-1,-1]]})");

  struct Cmd {
    std::string args;
    std::vector<std::string> files;
  };
  const std::vector<Cmd> cmds = {
      {"dist --p 1.5 --in-a " + a + " --in-b " + b + " --plan @plan.json", {"plan.json"}},
      {"bary --in " + ens + " --out @bary.json", {"bary.json"}},
      {"bary --p 3 --in " + ens + " --out @fixed.json --method fixed --support " + grid, {"fixed.json"}},
      {"bary --in " + ens + " --out @auto.json --method auto --max-product-size 10 --seed 5", {"auto.json"}},
      {"mmot --p 1 --in " + ens + " --out @coupling.json --bary @mmbary.json", {"coupling.json", "mmbary.json"}},
      {"variance --p 3 --in " + ens, {}},
      {"quantize --in " + a + " --k 4 --seed 9 --out @q.json", {"q.json"}},
      {"experiment --config " + config.string() + " --seed 11 --out @report.csv --keep-artifacts @art",
       {"report.csv", "art/reference.json", "art/bary_1000_19.json"}},
  };
  std::size_t diffs = 0, failures = 0;
  std::string first_bad;
  for (std::size_t c = 0; c < cmds.size(); ++c) {
    std::vector<std::string> outputs[2];
    for (int round = 0; round < 2; ++round) {
      const fs::path dir = scratch / ("run" + std::to_string(round)) / std::to_string(c);
      fs::create_directories(dir);
      std::string args = cmds[c].args;
      for (std::size_t at; (at = args.find('@')) != std::string::npos;) args.replace(at, 1, dir.string() + "/");
      const fs::path out = dir / "stdout.txt";
      const std::string line = "\"" + exe + "\" " + args + " > \"" + out.string() + "\" 2>&1";
      if (std::system(line.c_str()) != 0) ++failures;
      outputs[round].push_back(slurp(out));
      for (const auto& f : cmds[c].files) outputs[round].push_back(slurp(dir / f));
    }
    if (outputs[0] != outputs[1]) {
      ++diffs;
      if (first_bad.empty()) first_bad = cmds[c].args.substr(0, cmds[c].args.find(' '));
    }
    for (const auto& o : outputs[0])
      if (o == "<missing>") ++failures;
  }
  return {diffs == 0 && failures == 0, std::to_string(cmds.size()) + " commands rerun, " + std::to_string(diffs) +
                                           " differing, " + std::to_string(failures) + " failed" +
                                           (first_bad.empty() ? "" : " (first: " + first_bad + ")")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 4) {
    std::fprintf(stderr, "usage: %s <wbary-executable> <scratch-dir> <reference-config>\n", argv[0]);
    return 2;
  }
  const std::string exe = argv[1];
  const fs::path scratch = argv[2];
  const fs::path config = argv[3];

  const std::vector<Criterion> criteria = {
      {1, "metric axioms", 60, metric_axioms},
      {2, "1D oracle agreement", 30, oracle_1d},
      {3, "multi-marginal oracle equivalence", 60, multimarginal_oracle},
      {4, "pushforward barycenter inequalities", 300, optimality_inequalities},
      {5, "1D p=2 quantile-average barycenter", 120, quantile_barycenter},
      {6, "empirical consistency", 600, [&] { return consistency(config); }},
      {7, "equivariance", 60, equivariance},
      {8, "CLI determinism", 600, [&] { return determinism(exe, scratch, config); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = v.ok && in_time;
    failed += !pass;
    std::printf("[%s] criterion %d (%s): %s; %.2fs (limit %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), v.detail.c_str(), secs, c.limit_s, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
