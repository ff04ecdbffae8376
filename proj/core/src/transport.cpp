#include "wbary/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "wbary/error.hpp"

namespace wbary {

namespace {

// Quantity a + e * eps for an infinitesimal eps > 0.
struct Lex {
  double v = 0.0;
  long long e = 0;
};

constexpr double kLexTieTol = 1e-13;

bool lex_less(const Lex& a, const Lex& b) {
  if (std::abs(a.v - b.v) > kLexTieTol) return a.v < b.v;
  return a.e < b.e;
}

Lex operator-(const Lex& a, const Lex& b) { return {a.v - b.v, a.e - b.e}; }
Lex operator+(const Lex& a, const Lex& b) { return {a.v + b.v, a.e + b.e}; }

struct Cell {
  std::size_t i;
  std::size_t j;
  Lex flow;
};

class TransportSimplex {
 public:
  TransportSimplex(const Matrix& cost, std::span<const double> src, std::span<const double> tgt,
                   const TransportOptions& opts)
      : c_(cost), n_(cost.rows()), m_(cost.cols()), opts_(opts) {
    north_west_corner(src, tgt);
  }

  TransportPlan run() {
    std::vector<double> u(n_), v(m_);
    std::size_t iter = 0;
    for (;; ++iter) {
      if (iter >= opts_.max_iterations) {
        throw Error(ErrorKind::NumericalFailure,
                    "transportation simplex exceeded " + std::to_string(opts_.max_iterations) + " pivots");
      }
      rebuild_adjacency();
      potentials(u, v);
      std::size_t ei = 0, ej = 0;
      if (!entering(u, v, ei, ej)) break;
      pivot(ei, ej);
    }

    TransportPlan out;
    out.plan = Matrix(n_, m_, 0.0);
    for (const Cell& cell : basis_) out.plan(cell.i, cell.j) = std::max(0.0, cell.flow.v);
    double cost = 0.0;
    double min_rc = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        cost += out.plan(i, j) * c_(i, j);
        min_rc = std::min(min_rc, c_(i, j) - u[i] - v[j]);
      }
    }
    out.cost = cost;
    out.u = std::move(u);
    out.v = std::move(v);
    out.iterations = iter;
    out.min_reduced_cost = min_rc;
    return out;
  }

 private:
  // Staircase start: each step exhausts exactly one row or column, so the
  // n + m - 1 cells always form a spanning tree of the bipartite graph.
  void north_west_corner(std::span<const double> src, std::span<const double> tgt) {
    std::vector<Lex> supply(n_), demand(m_);
    for (std::size_t i = 0; i < n_; ++i) supply[i] = {src[i], 1};
    for (std::size_t j = 0; j < m_; ++j) demand[j] = {tgt[j], 0};
    demand[m_ - 1].e = static_cast<long long>(n_);

    basis_.reserve(n_ + m_ - 1);
    std::size_t i = 0, j = 0;
    for (;;) {
      if (i == n_ - 1 && j == m_ - 1) {
        basis_.push_back({i, j, supply[i]});
        break;
      }
      const bool take_row = (j == m_ - 1) || (i != n_ - 1 && lex_less(supply[i], demand[j]));
      if (take_row) {
        basis_.push_back({i, j, supply[i]});
        demand[j] = demand[j] - supply[i];
        ++i;
      } else {
        basis_.push_back({i, j, demand[j]});
        supply[i] = supply[i] - demand[j];
        ++j;
      }
    }
  }

  // Nodes 0..n-1 are rows, n..n+m-1 columns.
  void rebuild_adjacency() {
    adj_.assign(n_ + m_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj_[basis_[k].i].push_back(k);
      adj_[n_ + basis_[k].j].push_back(k);
    }
  }

  void potentials(std::vector<double>& u, std::vector<double>& v) {
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t k : adj_[node]) {
        const Cell& cell = basis_[k];
        const std::size_t other = node < n_ ? n_ + cell.j : cell.i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < n_) {
          v[cell.j] = c_(cell.i, cell.j) - u[cell.i];
        } else {
          u[cell.i] = c_(cell.i, cell.j) - v[cell.j];
        }
        stack.push_back(other);
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
      throw Error(ErrorKind::NumericalFailure, "transportation basis lost its spanning-tree structure");
    }
  }

  // Bland: the first improving cell in row-major order.
  bool entering(const std::vector<double>& u, const std::vector<double>& v, std::size_t& ei, std::size_t& ej) const {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = 0; j < m_; ++j) {
        if (c_(i, j) - u[i] - v[j] < -opts_.optimality_tol) {
          ei = i;
          ej = j;
          return true;
        }
      }
    }
    return false;
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Tree path from column ej to row ei; the cycle closes through (ei, ej).
    const std::size_t target = ei;
    const std::size_t start = n_ + ej;
    std::vector<std::size_t> parent_edge(n_ + m_, kNone);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<std::size_t> queue{start};
    seen[start] = 1;
    for (std::size_t head = 0; head < queue.size() && !seen[target]; ++head) {
      const std::size_t node = queue[head];
      for (std::size_t k : adj_[node]) {
        const std::size_t other = node < n_ ? n_ + basis_[k].j : basis_[k].i;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_edge[other] = k;
        queue.push_back(other);
      }
    }
    if (!seen[target]) throw Error(ErrorKind::NumericalFailure, "no basis path closes the pivot cycle");

    // Walk back from the row towards the column; edges alternate -, +, ...
    // starting at the edge incident to the row.
    path_.clear();
    for (std::size_t node = target; node != start;) {
      const std::size_t k = parent_edge[node];
      path_.push_back(k);
      node = node < n_ ? n_ + basis_[k].j : basis_[k].i;
    }

    std::size_t leave = kNone;
    for (std::size_t pos = 0; pos < path_.size(); pos += 2) {
      const std::size_t k = path_[pos];
      if (leave == kNone || lex_less(basis_[k].flow, basis_[leave].flow) ||
          (!lex_less(basis_[leave].flow, basis_[k].flow) && cell_index(k) < cell_index(leave))) {
        leave = k;
      }
    }
    const Lex theta = basis_[leave].flow;
    for (std::size_t pos = 0; pos < path_.size(); ++pos) {
      Cell& cell = basis_[path_[pos]];
      cell.flow = pos % 2 == 0 ? cell.flow - theta : cell.flow + theta;
    }
    basis_[leave] = {ei, ej, theta};
  }

  std::size_t cell_index(std::size_t k) const { return basis_[k].i * m_ + basis_[k].j; }

  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

  const Matrix& c_;
  std::size_t n_;
  std::size_t m_;
  TransportOptions opts_;
  std::vector<Cell> basis_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<std::size_t> path_;
};

void check_weights(std::span<const double> w, const char* name) {
  if (w.empty()) throw Error(ErrorKind::InvalidArgument, std::string(name) + " is empty");
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!std::isfinite(w[k]) || w[k] < 0.0) {
      throw Error(ErrorKind::InfeasibleWeights,
                  std::string(name) + "[" + std::to_string(k) + "] must be finite and nonnegative");
    }
  }
}

}  // namespace

std::vector<TransportPlan::Triplet> TransportPlan::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j)
      if (plan(i, j) > 0.0) out.push_back({i, j, plan(i, j)});
  return out;
}

TransportPlan solve_transport(const Matrix& cost, std::span<const double> w_src, std::span<const double> w_tgt,
                              const TransportOptions& opts) {
  check_weights(w_src, "source weights");
  check_weights(w_tgt, "target weights");
  if (cost.rows() != w_src.size() || cost.cols() != w_tgt.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cost matrix is " + std::to_string(cost.rows()) + "x" +
                                                  std::to_string(cost.cols()) + " for weights of sizes " +
                                                  std::to_string(w_src.size()) + " and " +
                                                  std::to_string(w_tgt.size()));
  }
  if (cost.rows() > opts.max_entries / cost.cols()) {
    throw Error(ErrorKind::ProductSizeExceeded, "transport instance exceeds the size guard of " +
                                                std::to_string(opts.max_entries) + " cost entries");
  }
  for (double c : cost.data()) {
    if (!std::isfinite(c) || c < 0.0) throw Error(ErrorKind::InvalidArgument, "cost entries must be finite and >= 0");
  }
  const double s = std::accumulate(w_src.begin(), w_src.end(), 0.0);
  const double t = std::accumulate(w_tgt.begin(), w_tgt.end(), 0.0);
  if (std::abs(s - t) > opts.feasibility_tol) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "marginal masses %.17g and %.17g differ by more than %g", s, t,
                  opts.feasibility_tol);
    throw Error(ErrorKind::InfeasibleWeights, buf);
  }
  return TransportSimplex(cost, w_src, w_tgt, opts).run();
}

Matrix ground_cost(const Space& s, const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  Matrix c(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j) c(i, j) = distance_pow(s, mu.atoms[i], nu.atoms[j], p);
  return c;
}

WassersteinResult wasserstein(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                              const TransportOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  WassersteinResult out;
  out.plan = solve_transport(ground_cost(s, mu, nu, p), mu.weights, nu.weights, opts);
  out.value = std::pow(std::max(0.0, out.plan.cost), 1.0 / p);
  return out;
}

namespace {

double quantile_cost(double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const DiscreteMeasure a = merge_atoms(mu, 0.0);
  const DiscreteMeasure b = merge_atoms(nu, 0.0);
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorKind::InvalidArgument, "empty measure");

  std::vector<double> fa(a.size()), fb(b.size());
  std::partial_sum(a.weights.begin(), a.weights.end(), fa.begin());
  std::partial_sum(b.weights.begin(), b.weights.end(), fb.begin());
  const double end = std::min(fa.back(), fb.back());

  double acc = 0.0;
  double prev = 0.0;
  std::size_t i = 0, j = 0;
  while (prev < end) {
    const double next = std::min({fa[i], fb[j], end});
    const double gap = std::abs(a.atoms[i][0] - b.atoms[j][0]);
    const double c = p == 1.0 ? gap : (p == 2.0 ? gap * gap : std::pow(gap, p));
    acc += (next - prev) * c;
    prev = next;
    if (fa[i] <= next && i + 1 < a.size()) ++i;
    if (fb[j] <= next && j + 1 < b.size()) ++j;
  }
  return acc;
}

bool on_line(const Space& s) { return s.is_euclidean() && s.point_dim() == 1; }

}  // namespace

double wasserstein_1d(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!on_line(s)) throw Error(ErrorKind::UnsupportedSpace, "the quantile formula needs Euclidean(1)");
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  return std::pow(quantile_cost(p, mu, nu), 1.0 / p);
}

double wasserstein_pow(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                       const TransportOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  if (on_line(s)) return quantile_cost(p, mu, nu);
  return std::max(0.0, solve_transport(ground_cost(s, mu, nu, p), mu.weights, nu.weights, opts).cost);
}

double wasserstein_value(const Space& s, double p, const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         const TransportOptions& opts) {
  if (on_line(s)) return wasserstein_1d(s, p, mu, nu);
  return wasserstein(s, p, mu, nu, opts).value;
}

}  // namespace wbary
