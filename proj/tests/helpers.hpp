#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "wbary/measure.hpp"

namespace testutil {

using wbary::DiscreteMeasure;
using wbary::Point;

inline std::vector<double> random_simplex(std::mt19937_64& g, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> w(n);
  double s = 0.0;
  for (auto& x : w) s += (x = u(g));
  for (auto& x : w) x /= s;
  return w;
}

inline Point random_point(std::mt19937_64& g, std::size_t dim, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Point x(dim);
  for (auto& c : x) c = u(g);
  return x;
}

inline DiscreteMeasure random_measure(std::mt19937_64& g, std::size_t dim, std::size_t n, double lo = -3.0,
                                      double hi = 3.0) {
  DiscreteMeasure m;
  for (std::size_t i = 0; i < n; ++i) m.atoms.push_back(random_point(g, dim, lo, hi));
  m.weights = random_simplex(g, n);
  return m;
}

inline DiscreteMeasure random_uniform_measure(std::mt19937_64& g, std::size_t dim, std::size_t n) {
  DiscreteMeasure m = random_measure(g, dim, n);
  m.weights.assign(n, 1.0 / static_cast<double>(n));
  return m;
}

inline std::size_t pick(std::mt19937_64& g, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(g);
}

inline std::vector<double> coords_1d(const DiscreteMeasure& m) {
  std::vector<double> x;
  for (const auto& a : m.atoms) x.push_back(a[0]);
  return x;
}

}  // namespace testutil
