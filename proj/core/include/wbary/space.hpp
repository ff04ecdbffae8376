#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wbary {

/// Coordinates in a Euclidean space; in a metric-matrix space a point is a
/// single coordinate holding the point's index.
using Point = std::vector<double>;

struct Euclidean {
  std::size_t dim = 1;
};

/// Finite metric space given by an explicit distance table.
class MetricMatrix {
 public:
  /// Validates zero diagonal, symmetry, nonnegativity and every triangle
  /// inequality (with slack `tol`). Throws Error(InvalidSpace).
  MetricMatrix(std::vector<std::string> labels, std::vector<std::vector<double>> dist,
               double tol = 1e-12);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  double at(std::size_t i, std::size_t j) const noexcept { return dist_[i * labels_.size() + j]; }
  /// Index of `label`, or throws Error(InvalidArgument).
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> dist_;
};

class Space {
 public:
  Space() = default;
  /* implicit */ Space(Euclidean e);
  /* implicit */ Space(MetricMatrix m) : kind_(std::move(m)) {}

  static Space euclidean(std::size_t dim) { return Space(Euclidean{dim}); }

  bool is_euclidean() const noexcept { return std::holds_alternative<Euclidean>(kind_); }
  /// Euclidean dimension; 1 for metric-matrix spaces (atoms carry an index).
  std::size_t point_dim() const noexcept;
  const MetricMatrix& metric() const;  // throws UnsupportedSpace if Euclidean
  const std::variant<Euclidean, MetricMatrix>& kind() const noexcept { return kind_; }

  /// Throws DimensionMismatch (or InvalidArgument for bad metric indices).
  void check_point(std::span<const double> x) const;

  bool operator==(const Space& other) const;

 private:
  std::variant<Euclidean, MetricMatrix> kind_{Euclidean{1}};
};

double distance(const Space& s, std::span<const double> a, std::span<const double> b);

/// d(a,b)^p without the extra pow when p is 1 or 2.
double distance_pow(const Space& s, std::span<const double> a, std::span<const double> b, double p);

/// Euclidean midpoint (a+b)/2. Metric-matrix spaces expose no geodesics.
Point midpoint(const Space& s, std::span<const double> a, std::span<const double> b);

/// Lexicographic order on coordinates.
bool lex_less(std::span<const double> a, std::span<const double> b) noexcept;

}  // namespace wbary
