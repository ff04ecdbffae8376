#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "wbary/deformation.hpp"
#include "wbary/error.hpp"
#include "wbary/measure.hpp"
#include "wbary/rng.hpp"

using namespace wbary;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

const Space line = Space::euclidean(1);
const Space plane = Space::euclidean(2);

}  // namespace

TEST_CASE("validate_measure examples") {
  const DiscreteMeasure d{{{0.0}}, {1.0}};
  const DiscreteMeasure v = validate_measure(d, line);
  CHECK(v.atoms == d.atoms);
  CHECK(v.weights == d.weights);

  const DiscreteMeasure r = validate_measure({{{0.0}, {1.0}}, {0.5, 0.5000000001}}, line);
  CHECK(std::abs(r.weights[0] + r.weights[1] - 1.0) <= 1e-12);

  CHECK(kind_of([] { validate_measure({{{0.0}, {1.0}}, {0.7, -0.3}}, line); }) == ErrorKind::NegativeWeight);
  CHECK(kind_of([] { validate_measure({{{0.0}, {1.0}}, {0.5, 0.6}}, line); }) ==
        ErrorKind::WeightSumOutOfTolerance);
  CHECK(kind_of([] { validate_measure({{{0.0, 1.0}}, {1.0}}, line); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { validate_measure({{{0.0}}, {0.5, 0.5}}, line); }) == ErrorKind::DimensionMismatch);
  CHECK(kind_of([] { validate_measure({{{NAN}}, {1.0}}, line); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("validate_measure error message names the tolerance") {
  try {
    validate_measure({{{0.0}, {1.0}}, {0.5, 0.6}}, line);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("1e-09") != std::string::npos);
  }
}

TEST_CASE("validate_measure is idempotent on random measures") {
  std::mt19937_64 g(7);
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 3);
    DiscreteMeasure m = testutil::random_measure(g, dim, testutil::pick(g, 1, 10));
    m.weights[0] += 1e-10;
    const Space s = Space::euclidean(dim);
    const DiscreteMeasure once = validate_measure(m, s);
    const DiscreteMeasure twice = validate_measure(once, s);
    CHECK(once.weights == twice.weights);
    CHECK(once.atoms == twice.atoms);
  }
}

TEST_CASE("distance examples") {
  CHECK(distance(plane, Point{0, 0}, Point{3, 4}) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(distance(plane, Point{1.5, -2}, Point{1.5, -2}) == 0.0);
  const Space mm = MetricMatrix({"a", "b", "c"}, {{0, 7, 3}, {7, 0, 5}, {3, 5, 0}});
  CHECK(distance(mm, Point{0}, Point{1}) == 7.0);
  CHECK(distance(mm, Point{2}, Point{2}) == 0.0);
  CHECK(kind_of([] { distance(plane, Point{0}, Point{1, 2}); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("metric matrix validation") {
  CHECK(kind_of([] { MetricMatrix({"a", "b"}, {{0, 1}, {2, 0}}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { MetricMatrix({"a", "b"}, {{1, 1}, {1, 0}}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { MetricMatrix({"a", "b"}, {{0, -1}, {-1, 0}}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { MetricMatrix({"a", "b", "c"}, {{0, 1, 5}, {1, 0, 1}, {5, 1, 0}}); }) == ErrorKind::InvalidSpace);
  CHECK(kind_of([] { MetricMatrix({"a", "a"}, {{0, 1}, {1, 0}}); }) == ErrorKind::InvalidSpace);
  const MetricMatrix ok({"x", "y"}, {{0, 2}, {2, 0}});
  CHECK(ok.index_of("y") == 1);
}

TEST_CASE("distance axioms on random triples") {
  std::mt19937_64 g(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 4);
    const Space s = Space::euclidean(dim);
    const Point a = testutil::random_point(g, dim), b = testutil::random_point(g, dim),
                c = testutil::random_point(g, dim);
    CHECK(distance(s, a, b) == distance(s, b, a));
    CHECK(distance(s, a, a) == 0.0);
    CHECK(distance(s, a, c) <= distance(s, a, b) + distance(s, b, c) + 1e-12);
  }
}

TEST_CASE("midpoint") {
  CHECK(midpoint(plane, Point{0, 0}, Point{2, 2}) == Point{1, 1});
  CHECK(midpoint(plane, Point{3, -1}, Point{3, -1}) == Point{3, -1});
  CHECK(midpoint(plane, Point{-1, 0}, Point{1, 0}) == Point{0, 0});
  const Space mm = MetricMatrix({"a", "b"}, {{0, 1}, {1, 0}});
  CHECK(kind_of([&] { midpoint(mm, Point{0}, Point{1}); }) == ErrorKind::UnsupportedSpace);

  std::mt19937_64 g(5);
  for (int t = 0; t < 100; ++t) {
    const Space s = Space::euclidean(3);
    const Point a = testutil::random_point(g, 3), b = testutil::random_point(g, 3);
    const Point z = midpoint(s, a, b);
    CHECK(std::abs(distance(s, a, z) - distance(s, a, b) / 2) <= 1e-12);
    CHECK(std::abs(distance(s, z, b) - distance(s, a, b) / 2) <= 1e-12);
  }
}

TEST_CASE("pushforward examples") {
  const DiscreteMeasure m{{{0.0}, {1.0}}, {0.5, 0.5}};
  const DiscreteMeasure t = pushforward(m, Deformation::translation({3.0}));
  CHECK(t.atoms == std::vector<Point>{{3.0}, {4.0}});
  CHECK(t.weights == m.weights);
  const DiscreteMeasure id = pushforward(m, Deformation::identity(1));
  CHECK(id.atoms == m.atoms);
  const Deformation scale = Deformation::scaling(2.0, {0.0});
  const Deformation shift = Deformation::translation({1.0});
  const DiscreteMeasure c = pushforward(pushforward(DiscreteMeasure::dirac({0.0}), scale), shift);
  CHECK(c.atoms == std::vector<Point>{{1.0}});
  CHECK(kind_of([&] { pushforward(m, Deformation::translation({1.0, 2.0})); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("pushforward keeps weights and shifts moments") {
  std::mt19937_64 g(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t dim = testutil::pick(g, 1, 3);
    const Space s = Space::euclidean(dim);
    const DiscreteMeasure m = testutil::random_measure(g, dim, testutil::pick(g, 1, 12));
    const Point v = testutil::random_point(g, dim), x0 = testutil::random_point(g, dim);
    const DiscreteMeasure pm = pushforward(m, Deformation::translation(v));
    CHECK(pm.weights == m.weights);
    Point x0v = x0;
    for (std::size_t k = 0; k < dim; ++k) x0v[k] += v[k];
    for (double p : {1.0, 2.0, 3.5}) {
      const double a = pth_moment(s, m, x0, p), b = pth_moment(s, pm, x0v, p);
      CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, a));
    }
  }
}

TEST_CASE("sample_empirical") {
  const DiscreteMeasure d = DiscreteMeasure::dirac({2.5});
  const DiscreteMeasure s = sample_empirical(d, 5, 1);
  CHECK(s.size() == 5);
  for (double w : s.weights) CHECK(w == doctest::Approx(0.2));
  CHECK(canonically_equal(merge_atoms(s), d));

  const DiscreteMeasure m{{{0.0}, {1.0}, {4.0}}, {0.2, 0.3, 0.5}};
  const DiscreteMeasure a = sample_empirical(m, 100, 42), b = sample_empirical(m, 100, 42);
  CHECK(a.atoms == b.atoms);
  CHECK(a.weights == b.weights);
  CHECK(sample_empirical(m, 100, 43).atoms != a.atoms);
  for (const auto& x : a.atoms) CHECK((x[0] == 0.0 || x[0] == 1.0 || x[0] == 4.0));
}

TEST_CASE("sample_empirical concentrates (independent RNG cross-check)") {
  const DiscreteMeasure m{{{0.0}, {1.0}}, {0.5, 0.5}};
  const DiscreteMeasure s = sample_empirical(m, 10000, 2024);
  double w0 = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.atoms[i][0] == 0.0) w0 += s.weights[i];
  CHECK(std::abs(w0 - 0.5) <= 0.02);

  std::mt19937_64 g(2024);
  std::bernoulli_distribution coin(0.5);
  int heads = 0;
  for (int i = 0; i < 10000; ++i) heads += coin(g);
  CHECK(std::abs(heads / 10000.0 - 0.5) <= 0.02);
}

TEST_CASE("pth_moment examples") {
  CHECK(pth_moment(plane, DiscreteMeasure::dirac({1, 2}), Point{1, 2}, 3.0) == 0.0);
  CHECK(pth_moment(line, {{{0.0}, {2.0}}, {0.5, 0.5}}, Point{1.0}, 2.0) == doctest::Approx(1.0));
  CHECK(pth_moment(line, DiscreteMeasure::uniform({{0.0}, {1.0}, {2.0}}), Point{0.0}, 1.0) ==
        doctest::Approx(1.0));
  CHECK(kind_of([] { pth_moment(line, DiscreteMeasure::dirac({0.0}), Point{0.0, 1.0}, 2.0); }) ==
        ErrorKind::DimensionMismatch);
}

TEST_CASE("merge_atoms and canonical equality") {
  const DiscreteMeasure m{{{1.0}, {0.0}, {1.0}, {2.0}}, {0.25, 0.25, 0.25, 0.25}};
  const DiscreteMeasure c = merge_atoms(m);
  CHECK(c.atoms == std::vector<Point>{{0.0}, {1.0}, {2.0}});
  CHECK(c.weights[1] == doctest::Approx(0.5));
  CHECK(canonically_equal(m, {{{0.0}, {1.0}, {2.0}}, {0.25, 0.5, 0.25}}));
  CHECK_FALSE(canonically_equal(m, {{{0.0}, {1.0}, {2.0}}, {0.25, 0.25, 0.5}}));
  const DiscreteMeasure z = merge_atoms({{{3.0}, {4.0}}, {1.0, 0.0}});
  CHECK(z.size() == 1);
}

TEST_CASE("validate_ensemble") {
  MeasureEnsemble e{line, {DiscreteMeasure::dirac({0.0}), DiscreteMeasure::dirac({1.0})}, {0.5, 0.5}};
  CHECK_NOTHROW(validate_ensemble(e));
  e.lambda = {0.5, 0.7};
  CHECK(kind_of([&] { validate_ensemble(e); }) == ErrorKind::WeightSumOutOfTolerance);
  e.lambda = {0.5};
  CHECK(kind_of([&] { validate_ensemble(e); }) == ErrorKind::DimensionMismatch);
  e.lambda = {0.5, 0.5};
  e.measures[1] = DiscreteMeasure::dirac({1.0, 2.0});
  CHECK(kind_of([&] { validate_ensemble(e); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("rng is the documented SplitMix64") {
  SplitMix64 r(1234567);
  // First outputs of the reference SplitMix64 for seed 1234567.
  CHECK(r.next() == 6457827717110365317ULL);
  CHECK(r.next() == 3203168211198807973ULL);
  SplitMix64 a(9), b(9);
  for (int i = 0; i < 10; ++i) CHECK(a.uniform() == b.uniform());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(a.below(7) < 7u);
  }
  CHECK(derive_seed(1, {2, 3}) != derive_seed(1, {3, 2}));
  CHECK(derive_seed(1, {2, 3}) == derive_seed(1, {2, 3}));
}

TEST_CASE("deformations") {
  const Deformation aff = Deformation::affine({2, 0, 0, 3}, {1, 1});
  CHECK(aff(Point{1, 1}) == Point{3, 4});
  CHECK(kind_of([] { Deformation::affine({1, 2, 2, 4}, {0, 0}); }) == ErrorKind::InvalidArgument);
  CHECK(kind_of([] { Deformation::scaling(0.0, {0.0}); }) == ErrorKind::InvalidArgument);
  const Deformation spl = Deformation::monotone_spline({0, 1, 2}, {0, 2, 3});
  CHECK(spl(Point{0.5})[0] == doctest::Approx(1.0));
  CHECK(spl(Point{1.5})[0] == doctest::Approx(2.5));
  CHECK(spl(Point{3.0})[0] == doctest::Approx(4.0));
  CHECK(spl(Point{-1.0})[0] == doctest::Approx(-2.0));
  CHECK(kind_of([] { Deformation::monotone_spline({0, 1}, {1, 0}); }) == ErrorKind::InvalidArgument);

  DeformationSpec spec;
  spec.kind = DeformationSpec::Kind::Scaling;
  spec.factor = ScalarLaw::uniform(0.5, 2.0);
  spec.center = {0.0};
  spec.seed = 3;
  const MeasureEnsemble e = generate_deformation_ensemble(line, DiscreteMeasure::dirac({0.0}), spec, 5);
  for (const auto& m : e.measures) CHECK(m.atoms == std::vector<Point>{{0.0}});
  spec.factor = ScalarLaw::uniform(-1.0, 2.0);
  CHECK(kind_of([&] { spec.validate(); }) == ErrorKind::InvalidConfig);

  DeformationSpec id;
  const DiscreteMeasure t{{{0.0}, {1.0}}, {0.3, 0.7}};
  const MeasureEnsemble copies = generate_deformation_ensemble(line, t, id, 3);
  for (const auto& m : copies.measures) {
    CHECK(m.atoms == t.atoms);
    CHECK(m.weights == t.weights);
  }
  CHECK(copies.lambda[2] == doctest::Approx(1.0 / 3));
}
