#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "wbary/barycenter.hpp"
#include "wbary/error.hpp"

using namespace wbary;

namespace {

const Space line = Space::euclidean(1);

MeasureEnsemble uniform_1d_ensemble(std::mt19937_64& g, std::size_t J, std::size_t n) {
  MeasureEnsemble e;
  e.space = line;
  for (std::size_t j = 0; j < J; ++j) e.measures.push_back(testutil::random_uniform_measure(g, 1, n));
  e.lambda.assign(J, 1.0 / static_cast<double>(J));
  return e;
}

}  // namespace

TEST_CASE("ensemble_objective examples") {
  const DiscreteMeasure mu{{{0.0}, {1.0}}, {0.4, 0.6}};
  MeasureEnsemble same{line, {mu, mu}, {0.3, 0.7}};
  CHECK(ensemble_objective(line, 2.0, same, mu) == doctest::Approx(0.0));

  MeasureEnsemble d{line, {DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({2.0})}, {0.5, 0.5}};
  CHECK(ensemble_objective(line, 2.0, d, DiscreteMeasure::dirac({1.0})) == doctest::Approx(1.0));
  const DiscreteMeasure split{{{0.0}, {2.0}}, {0.5, 0.5}};
  std::vector<double> dists;
  CHECK(ensemble_objective(line, 2.0, d, split, {}, &dists) == doctest::Approx(2.0));
  // each pairwise problem has a single feasible plan: ½·4 per measure
  CHECK(dists.size() == 2);
  CHECK(dists[0] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("barycenter_finite examples") {
  MeasureEnsemble d{Space::euclidean(2), {DiscreteMeasure::dirac({0, 0}), DiscreteMeasure::dirac({2, 4})},
                    {0.5, 0.5}};
  const BarycenterResult r = barycenter_finite(d.space, 2.0, d);
  CHECK(canonically_equal(r.measure, DiscreteMeasure::dirac({1, 2})));
  CHECK(r.method == BarycenterMethod::Multimarginal);

  MeasureEnsemble e{line, {{{{0.0}, {2.0}}, {0.5, 0.5}}, {{{1.0}, {3.0}}, {0.5, 0.5}}}, {0.5, 0.5}};
  const BarycenterResult b = barycenter_finite(line, 2.0, e);
  CHECK(canonically_equal(b.measure, {{{0.5}, {2.5}}, {0.5, 0.5}}));
  CHECK(b.objective == doctest::Approx(0.25));
  std::vector<oracle::Vec> samples{{0.0, 2.0}, {1.0, 3.0}};
  CHECK(oracle::quantile_average_objective(samples, {0.5, 0.5}) == doctest::Approx(0.25));

  const DiscreteMeasure mu{{{0.0}, {1.0}, {3.0}}, {0.2, 0.5, 0.3}};
  MeasureEnsemble single{line, {mu}, {1.0}};
  const BarycenterResult s = barycenter_finite(line, 3.0, single);
  CHECK(canonically_equal(s.measure, mu));
  CHECK(s.objective == 0.0);
}

TEST_CASE("objective is recomputable from the measure") {
  std::mt19937_64 g(51);
  for (int t = 0; t < 20; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 2);
    MeasureEnsemble e;
    e.space = Space::euclidean(dim);
    for (std::size_t j = 0; j < 3; ++j) e.measures.push_back(testutil::random_measure(g, dim, testutil::pick(g, 1, 4)));
    e.lambda = testutil::random_simplex(g, 3);
    for (double p : {1.0, 2.0}) {
      const BarycenterResult r = barycenter_finite(e.space, p, e);
      const double again = ensemble_objective(e.space, p, e, r.measure);
      CHECK(std::abs(again - r.objective) <= 1e-8 * std::max(1.0, r.objective));
      CHECK(r.objective <= r.solver_objective + 1e-8);
      CHECK(r.distances.size() == 3);
    }
  }
}

TEST_CASE("minimality probes") {
  std::mt19937_64 g(53);
  for (int t = 0; t < 12; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 2);
    const double p = std::vector{1.0, 2.0, 3.0}[t % 3];
    MeasureEnsemble e;
    e.space = Space::euclidean(dim);
    for (std::size_t j = 0; j < 3; ++j) e.measures.push_back(testutil::random_measure(g, dim, testutil::pick(g, 1, 4)));
    e.lambda = testutil::random_simplex(g, 3);
    const BarycenterResult r = barycenter_finite(e.space, p, e);
    for (const auto& m : e.measures) CHECK(r.objective <= ensemble_objective(e.space, p, e, m) + 1e-8);
    for (int k = 0; k < 100; ++k) {
      const DiscreteMeasure probe = testutil::random_measure(g, dim, testutil::pick(g, 1, 8));
      CHECK(r.objective <= ensemble_objective(e.space, p, e, probe) + 1e-8);
    }
  }
}

TEST_CASE("1D p=2 barycenter matches the quantile-average oracle") {
  std::mt19937_64 g(59);
  for (int t = 0; t < 20; ++t) {
    const std::size_t J = testutil::pick(g, 2, 4), n = testutil::pick(g, 1, J == 4 ? 8 : 12);
    MeasureEnsemble e = uniform_1d_ensemble(g, J, n);
    std::vector<oracle::Vec> samples;
    for (const auto& m : e.measures) samples.push_back(testutil::coords_1d(m));
    const double ref = oracle::quantile_average_objective(samples, e.lambda);
    const BarycenterResult r = barycenter_finite(line, 2.0, e);
    CHECK(std::abs(r.objective - ref) <= 1e-8);
    const BarycenterResult c = barycenter_comonotone(line, 2.0, e);
    CHECK(std::abs(c.objective - ref) <= 1e-8);
    CHECK(c.method == BarycenterMethod::Comonotone);
    CHECK_FALSE(c.upper_bound);
    // the quantile-average measure itself attains the same value
    const oracle::Vec bar = oracle::quantile_average(samples, e.lambda);
    DiscreteMeasure q;
    for (double x : bar) q.atoms.push_back({x});
    q.weights.assign(n, 1.0 / n);
    CHECK(std::abs(ensemble_objective(line, 2.0, e, q) - ref) <= 1e-8);
  }
}

TEST_CASE("translation equivariance for p=2") {
  std::mt19937_64 g(61);
  for (int t = 0; t < 15; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 3);
    MeasureEnsemble e;
    e.space = Space::euclidean(dim);
    for (std::size_t j = 0; j < 3; ++j) e.measures.push_back(testutil::random_measure(g, dim, testutil::pick(g, 1, 4)));
    e.lambda = testutil::random_simplex(g, 3);
    const Point v = testutil::random_point(g, dim);
    MeasureEnsemble moved = e;
    for (auto& m : moved.measures)
      for (auto& x : m.atoms)
        for (std::size_t k = 0; k < dim; ++k) x[k] += v[k];
    const DiscreteMeasure a = barycenter_finite(e.space, 2.0, e).measure;
    const DiscreteMeasure b = barycenter_finite(e.space, 2.0, moved).measure;
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(std::abs(a.weights[i] - b.weights[i]) <= 1e-9);
      for (std::size_t k = 0; k < dim; ++k) CHECK(std::abs(b.atoms[i][k] - a.atoms[i][k] - v[k]) <= 1e-9);
    }
  }
}

TEST_CASE("fixed-support barycenter") {
  std::mt19937_64 g(67);
  for (int t = 0; t < 15; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 2);
    const double p = t % 2 ? 1.0 : 2.0;
    MeasureEnsemble e;
    e.space = Space::euclidean(dim);
    for (std::size_t j = 0; j < 3; ++j) e.measures.push_back(testutil::random_measure(g, dim, testutil::pick(g, 1, 4)));
    e.lambda = testutil::random_simplex(g, 3);
    const BarycenterResult exact = barycenter_finite(e.space, p, e);
    const BarycenterResult same = barycenter_fixed_support(e.space, p, e, exact.measure.atoms);
    CHECK(std::abs(same.objective - exact.objective) <= 1e-8);
    CHECK(same.method == BarycenterMethod::FixedSupport);
    std::vector<Point> grid;
    for (int k = 0; k < 10; ++k) grid.push_back(testutil::random_point(g, dim));
    const BarycenterResult coarse = barycenter_fixed_support(e.space, p, e, grid);
    CHECK(coarse.objective >= exact.objective - 1e-8);
    CHECK(std::abs(coarse.objective - coarse.solver_objective) <= 1e-8);
  }

  MeasureEnsemble d{line, {DiscreteMeasure::dirac({0.0}), {{{1.0}, {3.0}}, {0.5, 0.5}}}, {0.5, 0.5}};
  const BarycenterResult one = barycenter_fixed_support(line, 2.0, d, {{7.0}});
  CHECK(canonically_equal(one.measure, DiscreteMeasure::dirac({7.0})));
  CHECK(one.objective == doctest::Approx(ensemble_objective(line, 2.0, d, DiscreteMeasure::dirac({7.0}))));

  const DiscreteMeasure mu{{{0.0}, {1.0}}, {0.3, 0.7}};
  MeasureEnsemble twins{line, {mu, mu, mu}, {0.2, 0.3, 0.5}};
  const BarycenterResult tw = barycenter_fixed_support(line, 2.0, twins, {{-1.0}, {0.0}, {0.5}, {1.0}});
  CHECK(canonically_equal(tw.measure, mu, 1e-12, 1e-9));
  CHECK(tw.objective == doctest::Approx(0.0));
  CHECK_THROWS_AS(barycenter_fixed_support(line, 2.0, twins, {}), Error);
}

TEST_CASE("variance") {
  const DiscreteMeasure mu{{{0.0}, {2.0}}, {0.5, 0.5}};
  MeasureEnsemble same{line, {mu, mu}, {0.5, 0.5}};
  CHECK(variance(line, 2.0, same).value == doctest::Approx(0.0));
  MeasureEnsemble two{line, {DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({2.0})}, {0.5, 0.5}};
  CHECK(variance(line, 2.0, two).value == doctest::Approx(1.0));
  MeasureEnsemble three{line,
                        {DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0}), DiscreteMeasure::dirac({2.0})},
                        {1.0 / 3, 1.0 / 3, 1.0 / 3}};
  CHECK(variance(line, 2.0, three).value == doctest::Approx(2.0 / 3));

  // zero iff equal after merging
  MeasureEnsemble dup{line, {{{{1.0}, {1.0}, {4.0}}, {0.25, 0.25, 0.5}}, {{{4.0}, {1.0}}, {0.5, 0.5}}}, {0.5, 0.5}};
  CHECK(variance(line, 3.0, dup).value == doctest::Approx(0.0));
  MeasureEnsemble off{line, {{{{1.0}, {4.0}}, {0.5, 0.5}}, {{{4.0}, {1.0}}, {0.4, 0.6}}}, {0.5, 0.5}};
  CHECK(variance(line, 3.0, off).value > 1e-6);
}

TEST_CASE("barycenter_auto routing") {
  std::mt19937_64 g(71);
  MeasureEnsemble small = uniform_1d_ensemble(g, 3, 4);
  CHECK(barycenter_auto(line, 2.0, small).method == BarycenterMethod::Multimarginal);
  BarycenterOptions o;
  o.mm.max_product_size = 10;
  CHECK(barycenter_auto(line, 2.0, small, o).method == BarycenterMethod::Comonotone);
  const BarycenterResult r3 = barycenter_auto(line, 3.0, small, o);
  CHECK(r3.method == BarycenterMethod::FixedSupport);
  CHECK(r3.upper_bound);
  CHECK(r3.objective >= barycenter_finite(line, 3.0, small).objective - 1e-8);
  CHECK_THROWS_AS(barycenter_finite(line, 2.0, small, o), Error);
}

TEST_CASE("quantize") {
  const Space s = line;
  const DiscreteMeasure m = DiscreteMeasure::uniform({{0.0}, {1.0}, {10.0}, {11.0}});
  CHECK(canonically_equal(quantize(s, m, 4), m));
  CHECK(canonically_equal(quantize(s, m, 9), m));
  const DiscreteMeasure one = quantize(s, m, 1, 5);
  REQUIRE(one.size() == 1);
  CHECK(one.weights[0] == doctest::Approx(1.0));

  // two centers: exhaustive check over every pair of atoms as centers
  const DiscreteMeasure q = quantize(s, m, 2, 3);
  const double wq = wasserstein_value(s, 2.0, m, q);
  double best_pair = 1e300;
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = a + 1; b < 4; ++b) {
      DiscreteMeasure cand{{m.atoms[a], m.atoms[b]}, {0.0, 0.0}};
      for (const auto& x : m.atoms)
        cand.weights[std::abs(x[0] - m.atoms[a][0]) <= std::abs(x[0] - m.atoms[b][0]) ? 0 : 1] += 0.25;
      best_pair = std::min(best_pair, wasserstein_value(s, 2.0, m, merge_atoms(cand)));
    }
  CHECK(wq <= best_pair + 1e-12);
  const double merged_cluster = wasserstein_value(s, 2.0, m, {{{0.0}, {10.0}}, {0.5, 0.5}});
  CHECK(wq <= merged_cluster + 1e-12);
  CHECK(wasserstein_value(s, 2.0, m, {{{0.0}, {11.0}}, {0.25, 0.75}}) > wq);

  std::mt19937_64 g(73);
  for (int t = 0; t < 10; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 3);
    const Space sp = Space::euclidean(dim);
    const DiscreteMeasure big = testutil::random_measure(g, dim, 25);
    double prev = 1e300;
    for (std::size_t k = 1; k <= 26; ++k) {
      const DiscreteMeasure qk = quantize(sp, big, k, 11);
      CHECK(qk.size() <= k);
      const double w = wasserstein_value(sp, 2.0, big, qk);
      CHECK(w <= prev + 1e-12);
      prev = w;
      if (k >= 25) CHECK(w <= 1e-12);
    }
  }
}

TEST_CASE("metric matrix barycenter") {
  const Space s = MetricMatrix({"a", "b", "c"}, {{0, 1, 2}, {1, 0, 1}, {2, 1, 0}});
  MeasureEnsemble e{s, {DiscreteMeasure::dirac({0}), DiscreteMeasure::dirac({2})}, {0.5, 0.5}};
  const BarycenterResult r = barycenter_finite(s, 2.0, e);
  CHECK(canonically_equal(r.measure, DiscreteMeasure::dirac({1})));
  CHECK(r.objective == doctest::Approx(1.0));
  const BarycenterResult f = barycenter_fixed_support(s, 2.0, e, {{0}, {1}, {2}});
  CHECK(f.objective == doctest::Approx(1.0));
}
