#include "wbary/space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wbary/error.hpp"

namespace wbary {

namespace {

std::size_t metric_index(const MetricMatrix& m, std::span<const double> x) {
  if (x.size() != 1) {
    throw Error(ErrorKind::DimensionMismatch,
                "metric-matrix points carry one index, got " + std::to_string(x.size()) + " coordinates");
  }
  const double v = x[0];
  if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(m.size())) {
    throw Error(ErrorKind::InvalidArgument, "point index " + std::to_string(v) + " outside metric space of " +
                                                std::to_string(m.size()) + " points");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

MetricMatrix::MetricMatrix(std::vector<std::string> labels, std::vector<std::vector<double>> dist, double tol)
    : labels_(std::move(labels)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw Error(ErrorKind::InvalidSpace, "metric space has no points");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (labels_[i] == labels_[j]) throw Error(ErrorKind::InvalidSpace, "duplicate point label '" + labels_[i] + "'");
  if (dist.size() != n) {
    throw Error(ErrorKind::InvalidSpace, "dist has " + std::to_string(dist.size()) + " rows for " +
                                             std::to_string(n) + " points");
  }
  dist_.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (dist[i].size() != n) {
      throw Error(ErrorKind::InvalidSpace, "dist row " + std::to_string(i) + " has " +
                                               std::to_string(dist[i].size()) + " entries, expected " +
                                               std::to_string(n));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double d = dist[i][j];
      if (!std::isfinite(d) || d < 0.0) {
        throw Error(ErrorKind::InvalidSpace,
                    "dist[" + std::to_string(i) + "][" + std::to_string(j) + "] must be finite and nonnegative");
      }
      dist_[i * n + j] = d;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (dist_[i * n + i] != 0.0) {
      throw Error(ErrorKind::InvalidSpace, "dist[" + std::to_string(i) + "][" + std::to_string(i) + "] must be 0");
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(dist_[i * n + j] - dist_[j * n + i]) > tol) {
        throw Error(ErrorKind::InvalidSpace, "dist is not symmetric at (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ")");
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        if (dist_[i * n + k] > dist_[i * n + j] + dist_[j * n + k] + tol) {
          throw Error(ErrorKind::InvalidSpace, "triangle inequality fails for (" + std::to_string(i) + "," +
                                                   std::to_string(j) + "," + std::to_string(k) +
                                                   ") beyond tolerance 1e-12");
        }
      }
    }
  }
}

std::size_t MetricMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error(ErrorKind::InvalidArgument, "unknown point label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

Space::Space(Euclidean e) : kind_(e) {
  if (e.dim == 0) throw Error(ErrorKind::InvalidSpace, "euclidean dim must be positive");
}

std::size_t Space::point_dim() const noexcept {
  if (const auto* e = std::get_if<Euclidean>(&kind_)) return e->dim;
  return 1;
}

const MetricMatrix& Space::metric() const {
  if (const auto* m = std::get_if<MetricMatrix>(&kind_)) return *m;
  throw Error(ErrorKind::UnsupportedSpace, "space is Euclidean, not a metric matrix");
}

void Space::check_point(std::span<const double> x) const {
  if (const auto* e = std::get_if<Euclidean>(&kind_)) {
    if (x.size() != e->dim) {
      throw Error(ErrorKind::DimensionMismatch, "point has " + std::to_string(x.size()) +
                                                    " coordinates, space dim is " + std::to_string(e->dim));
    }
    for (double v : x) {
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "point coordinate is not finite");
    }
    return;
  }
  metric_index(std::get<MetricMatrix>(kind_), x);
}

bool Space::operator==(const Space& other) const {
  if (kind_.index() != other.kind_.index()) return false;
  if (const auto* e = std::get_if<Euclidean>(&kind_)) return e->dim == std::get<Euclidean>(other.kind_).dim;
  const auto& a = std::get<MetricMatrix>(kind_);
  const auto& b = std::get<MetricMatrix>(other.kind_);
  if (a.labels() != b.labels()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      if (a.at(i, j) != b.at(i, j)) return false;
  return true;
}

double distance(const Space& s, std::span<const double> a, std::span<const double> b) {
  if (const auto* e = std::get_if<Euclidean>(&s.kind())) {
    if (a.size() != e->dim || b.size() != e->dim) {
      throw Error(ErrorKind::DimensionMismatch, "distance between points of dims " + std::to_string(a.size()) +
                                                    " and " + std::to_string(b.size()) + " in dim " +
                                                    std::to_string(e->dim));
    }
    if (e->dim == 1) return std::abs(a[0] - b[0]);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double t = a[k] - b[k];
      acc += t * t;
    }
    return std::sqrt(acc);
  }
  const auto& m = std::get<MetricMatrix>(s.kind());
  return m.at(metric_index(m, a), metric_index(m, b));
}

double distance_pow(const Space& s, std::span<const double> a, std::span<const double> b, double p) {
  if (p == 2.0 && s.is_euclidean()) {
    if (a.size() != b.size() || a.size() != s.point_dim()) return std::pow(distance(s, a, b), 2.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double t = a[k] - b[k];
      acc += t * t;
    }
    return acc;
  }
  const double d = distance(s, a, b);
  if (p == 1.0) return d;
  if (p == 2.0) return d * d;
  return std::pow(d, p);
}

Point midpoint(const Space& s, std::span<const double> a, std::span<const double> b) {
  if (!s.is_euclidean()) throw Error(ErrorKind::UnsupportedSpace, "midpoint needs a Euclidean space");
  s.check_point(a);
  s.check_point(b);
  Point z(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) z[k] = 0.5 * (a[k] + b[k]);
  return z;
}

bool lex_less(std::span<const double> a, std::span<const double> b) noexcept {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace wbary
