#include "wbary/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wbary/error.hpp"
#include "wbary/rng.hpp"

namespace wbary {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> validate_simplex(const std::vector<double>& w, const char* field, WeightTolerance tol) {
  if (w.empty()) throw Error(ErrorKind::InvalidArgument, std::string(field) + " is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) {
      throw Error(ErrorKind::InvalidArgument, std::string(field) + "[" + std::to_string(i) + "] is not finite");
    }
    if (w[i] < 0.0) {
      throw Error(ErrorKind::NegativeWeight,
                  std::string(field) + "[" + std::to_string(i) + "] = " + fmt(w[i]) + " is negative");
    }
    sum += w[i];
  }
  if (std::abs(sum - 1.0) > tol.accept) {
    throw Error(ErrorKind::WeightSumOutOfTolerance, std::string(field) + " sums to " + fmt(sum) +
                                                        ", allowed deviation from 1 is " + fmt(tol.accept));
  }
  std::vector<double> out = w;
  if (std::abs(sum - 1.0) > tol.renormalized) {
    for (double& x : out) x /= sum;
  }
  return out;
}

}  // namespace

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point> atoms) {
  DiscreteMeasure m;
  const double w = atoms.empty() ? 0.0 : 1.0 / static_cast<double>(atoms.size());
  m.weights.assign(atoms.size(), w);
  m.atoms = std::move(atoms);
  return m;
}

DiscreteMeasure validate_measure(const DiscreteMeasure& m, const Space& s, WeightTolerance tol) {
  if (m.atoms.size() != m.weights.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure has " + std::to_string(m.atoms.size()) + " atoms but " +
                                                  std::to_string(m.weights.size()) + " weights");
  }
  for (const auto& a : m.atoms) s.check_point(a);
  DiscreteMeasure out;
  out.atoms = m.atoms;
  out.weights = validate_simplex(m.weights, "weights", tol);
  return out;
}

MeasureEnsemble validate_ensemble(const MeasureEnsemble& e, WeightTolerance tol) {
  if (e.measures.size() != e.lambda.size()) {
    throw Error(ErrorKind::DimensionMismatch, "ensemble has " + std::to_string(e.measures.size()) +
                                                  " measures but " + std::to_string(e.lambda.size()) +
                                                  " lambda entries");
  }
  MeasureEnsemble out;
  out.space = e.space;
  out.lambda = validate_simplex(e.lambda, "lambda", tol);
  out.measures.reserve(e.measures.size());
  for (const auto& m : e.measures) out.measures.push_back(validate_measure(m, e.space, tol));
  return out;
}

DiscreteMeasure merge_atoms(const DiscreteMeasure& m, double tol) {
  std::vector<std::size_t> order;
  order.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m.weights[i] > 0.0) order.push_back(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lex_less(m.atoms[a], m.atoms[b]); });

  auto close = [tol](const Point& a, const Point& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
      if (std::abs(a[k] - b[k]) > tol) return false;
    return true;
  };

  DiscreteMeasure out;
  for (std::size_t i : order) {
    if (!out.atoms.empty() && close(out.atoms.back(), m.atoms[i])) {
      out.weights.back() += m.weights[i];
    } else {
      out.atoms.push_back(m.atoms[i]);
      out.weights.push_back(m.weights[i]);
    }
  }
  return out;
}

bool canonically_equal(const DiscreteMeasure& a, const DiscreteMeasure& b, double coord_tol, double weight_tol) {
  const DiscreteMeasure ca = merge_atoms(a, coord_tol);
  const DiscreteMeasure cb = merge_atoms(b, coord_tol);
  if (ca.size() != cb.size()) return false;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    if (ca.atoms[i].size() != cb.atoms[i].size()) return false;
    for (std::size_t k = 0; k < ca.atoms[i].size(); ++k)
      if (std::abs(ca.atoms[i][k] - cb.atoms[i][k]) > coord_tol) return false;
    if (std::abs(ca.weights[i] - cb.weights[i]) > weight_tol) return false;
  }
  return true;
}

DiscreteMeasure pushforward(const DiscreteMeasure& m, const std::function<Point(const Point&)>& map) {
  DiscreteMeasure out;
  out.weights = m.weights;
  out.atoms.reserve(m.size());
  for (const auto& a : m.atoms) out.atoms.push_back(map(a));
  return out;
}

DiscreteMeasure sample_empirical(const DiscreteMeasure& m, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "sample size n must be at least 1");
  if (m.size() == 0) throw Error(ErrorKind::InvalidArgument, "cannot sample from an empty measure");
  std::vector<double> cdf(m.size());
  std::partial_sum(m.weights.begin(), m.weights.end(), cdf.begin());
  const double total = cdf.back();

  SplitMix64 rng(seed);
  DiscreteMeasure out;
  out.atoms.reserve(n);
  out.weights.assign(n, 1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform() * total;
    // First atom whose cumulative weight exceeds u; zero-weight atoms are
    // never selected because their cdf value equals their predecessor's.
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t idx = it == cdf.end() ? m.size() - 1 : static_cast<std::size_t>(it - cdf.begin());
    while (m.weights[idx] <= 0.0 && idx > 0) --idx;
    out.atoms.push_back(m.atoms[idx]);
  }
  return out;
}

double pth_moment(const Space& s, const DiscreteMeasure& m, std::span<const double> x0, double p) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  s.check_point(x0);
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) acc += m.weights[i] * distance_pow(s, m.atoms[i], x0, p);
  return acc;
}

}  // namespace wbary
