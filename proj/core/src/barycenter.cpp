#include "wbary/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <string>
#include <thread>

#include "wbary/error.hpp"
#include "wbary/rng.hpp"

namespace wbary {

std::string_view to_string(BarycenterMethod m) noexcept {
  switch (m) {
    case BarycenterMethod::Multimarginal: return "multimarginal";
    case BarycenterMethod::Comonotone: return "comonotone";
    case BarycenterMethod::FixedSupport: return "fixed-support";
  }
  return "unknown";
}

double ensemble_objective(const Space& s, double p, const MeasureEnsemble& ens, const DiscreteMeasure& nu,
                          const TransportOptions& opts, std::vector<double>* distances) {
  const std::size_t J = ens.size();
  std::vector<double> costs(J);
  auto one = [&](std::size_t j) { return wasserstein_pow(s, p, nu, ens.measures[j], opts); };
  if (J > 1 && std::thread::hardware_concurrency() > 1) {
    std::vector<std::future<double>> jobs;
    jobs.reserve(J);
    for (std::size_t j = 0; j < J; ++j) jobs.push_back(std::async(std::launch::async, one, j));
    for (std::size_t j = 0; j < J; ++j) costs[j] = jobs[j].get();
  } else {
    for (std::size_t j = 0; j < J; ++j) costs[j] = one(j);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < J; ++j) acc += ens.lambda[j] * costs[j];
  if (distances) {
    distances->resize(J);
    for (std::size_t j = 0; j < J; ++j) (*distances)[j] = std::pow(std::max(0.0, costs[j]), 1.0 / p);
  }
  return acc;
}

namespace {

BarycenterResult from_coupling(const Space& s, double p, const MeasureEnsemble& ens, const MultiCoupling& gamma,
                               BarycenterMethod method, const BarycenterOptions& opts) {
  BarycenterResult res;
  res.measure = pushforward_barycenter(s, p, ens, gamma, opts.mm.frechet);
  res.objective = ensemble_objective(s, p, ens, res.measure, opts.transport, &res.distances);
  res.method = method;
  res.solver_objective = gamma.objective;
  res.iterations = gamma.iterations;
  return res;
}

// Equality-form LP over J plans pi^j (support x atoms of mu_j) whose
// support marginals all equal that of pi^0; the barycenter weights are the
// row sums of pi^0 and never appear as variables.
class FixedSupportColumns final : public lp::ColumnSource {
 public:
  FixedSupportColumns(const Space& s, double p, const MeasureEnsemble& ens, const std::vector<Point>& support)
      : ens_(ens), S_(support.size()) {
    const std::size_t J = ens.size();
    col_offset_.resize(J + 1, 0);
    row_offset_.resize(J, 0);
    for (std::size_t j = 0; j < J; ++j) {
      col_offset_[j + 1] = col_offset_[j] + S_ * ens.measures[j].size();
      row_offset_[j] = marginal_rows_;
      marginal_rows_ += ens.measures[j].size();
    }
    cost_.resize(col_offset_[J]);
    for (std::size_t j = 0; j < J; ++j) {
      const auto& mu = ens.measures[j];
      for (std::size_t t = 0; t < S_; ++t)
        for (std::size_t i = 0; i < mu.size(); ++i)
          cost_[col_offset_[j] + t * mu.size() + i] = ens.lambda[j] * distance_pow(s, support[t], mu.atoms[i], p);
    }
  }

  std::size_t rows() const override { return marginal_rows_ + (ens_.size() - 1) * (S_ - 1); }
  std::size_t columns() const override { return col_offset_.back(); }
  double cost(std::size_t k) const override { return cost_[k]; }

  void column(std::size_t k, std::vector<std::pair<std::size_t, double>>& out) const override {
    out.clear();
    const auto [j, t, i] = decode(k);
    out.emplace_back(row_offset_[j] + i, 1.0);
    if (t + 1 == S_) return;
    if (j == 0) {
      for (std::size_t jj = 1; jj < ens_.size(); ++jj) out.emplace_back(coupling_row(jj, t), 1.0);
    } else {
      out.emplace_back(coupling_row(j, t), -1.0);
    }
  }

  double dot(std::size_t k, std::span<const double> y) const override {
    const auto [j, t, i] = decode(k);
    double acc = y[row_offset_[j] + i];
    if (t + 1 == S_) return acc;
    if (j == 0) {
      for (std::size_t jj = 1; jj < ens_.size(); ++jj) acc += y[coupling_row(jj, t)];
    } else {
      acc -= y[coupling_row(j, t)];
    }
    return acc;
  }

  std::vector<double> rhs() const {
    std::vector<double> b(rows(), 0.0);
    for (std::size_t j = 0; j < ens_.size(); ++j)
      for (std::size_t i = 0; i < ens_.measures[j].size(); ++i) b[row_offset_[j] + i] = ens_.measures[j].weights[i];
    return b;
  }

  struct Index {
    std::size_t j, t, i;
  };

  Index decode(std::size_t k) const {
    std::size_t j = 0;
    while (k >= col_offset_[j + 1]) ++j;
    const std::size_t local = k - col_offset_[j];
    const std::size_t n = ens_.measures[j].size();
    return {j, local / n, local % n};
  }

 private:
  std::size_t coupling_row(std::size_t j, std::size_t t) const { return marginal_rows_ + (j - 1) * (S_ - 1) + t; }

  const MeasureEnsemble& ens_;
  std::size_t S_;
  std::size_t marginal_rows_ = 0;
  std::vector<std::size_t> col_offset_;
  std::vector<std::size_t> row_offset_;
  std::vector<double> cost_;
};

bool on_line(const Space& s) { return s.is_euclidean() && s.point_dim() == 1; }

}  // namespace

BarycenterResult barycenter_finite(const Space& s, double p, const MeasureEnsemble& ens,
                                   const BarycenterOptions& opts) {
  const MultiCoupling gamma = solve_multimarginal(s, p, ens, opts.mm);
  return from_coupling(s, p, ens, gamma, BarycenterMethod::Multimarginal, opts);
}

BarycenterResult barycenter_comonotone(const Space& s, double p, const MeasureEnsemble& ens,
                                       const BarycenterOptions& opts) {
  const MultiCoupling gamma = comonotone_coupling(s, p, ens, opts.mm.frechet);
  BarycenterResult res = from_coupling(s, p, ens, gamma, BarycenterMethod::Comonotone, opts);
  res.upper_bound = p != 2.0;
  return res;
}

BarycenterResult barycenter_fixed_support(const Space& s, double p, const MeasureEnsemble& ens,
                                          const std::vector<Point>& support, const BarycenterOptions& opts) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  if (support.empty()) throw Error(ErrorKind::InvalidArgument, "fixed support is empty");
  if (ens.measures.empty()) throw Error(ErrorKind::InvalidArgument, "ensemble has no measures");
  for (const auto& x : support) s.check_point(x);

  FixedSupportColumns cols(s, p, ens, support);
  const lp::Result lpres = lp::solve(cols, cols.rhs(), {}, opts.mm.lp);

  std::vector<double> w(support.size(), 0.0);
  for (std::size_t r = 0; r < lpres.basis.size(); ++r) {
    const std::size_t k = lpres.basis[r];
    if (k >= cols.columns() || lpres.values[r] <= 0.0) continue;
    const auto idx = cols.decode(k);
    if (idx.j == 0) w[idx.t] += lpres.values[r];
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  DiscreteMeasure nu;
  for (std::size_t t = 0; t < support.size(); ++t) {
    if (w[t] <= 0.0) continue;
    nu.atoms.push_back(support[t]);
    nu.weights.push_back(w[t] / total);
  }

  BarycenterResult res;
  res.measure = merge_atoms(nu, 1e-12);
  res.objective = ensemble_objective(s, p, ens, res.measure, opts.transport, &res.distances);
  res.method = BarycenterMethod::FixedSupport;
  res.solver_objective = lpres.objective;
  res.upper_bound = true;
  res.iterations = lpres.iterations;
  return res;
}

BarycenterResult barycenter_auto(const Space& s, double p, const MeasureEnsemble& ens,
                                 const BarycenterOptions& opts) {
  if (product_size(ens) <= opts.mm.max_product_size) return barycenter_finite(s, p, ens, opts);
  if (on_line(s) && p == 2.0) return barycenter_comonotone(s, p, ens, opts);

  DiscreteMeasure pooled;
  for (std::size_t j = 0; j < ens.size(); ++j) {
    const auto& m = ens.measures[j];
    for (std::size_t i = 0; i < m.size(); ++i) {
      pooled.atoms.push_back(m.atoms[i]);
      pooled.weights.push_back(ens.lambda[j] * m.weights[i]);
    }
  }
  const DiscreteMeasure grid = quantize(s, pooled, opts.auto_support_cap, opts.seed);
  return barycenter_fixed_support(s, p, ens, grid.atoms, opts);
}

VarianceResult variance(const Space& s, double p, const MeasureEnsemble& ens, const BarycenterOptions& opts) {
  const BarycenterResult b = barycenter_auto(s, p, ens, opts);
  return {b.objective, b.method, b.upper_bound};
}

DiscreteMeasure quantize(const Space& s, const DiscreteMeasure& m, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorKind::InvalidArgument, "quantize needs k >= 1");
  if (k >= m.size()) return m;
  const DiscreteMeasure base = merge_atoms(m, 1e-12);
  if (k >= base.size()) return base;

  const std::size_t n = base.size();
  std::vector<std::size_t> centers;
  centers.reserve(k);
  {
    SplitMix64 rng(seed);
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t first = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += base.weights[i];
      if (u < acc) {
        first = i;
        break;
      }
    }
    centers.push_back(first);
  }
  std::vector<double> nearest(n);
  std::vector<std::size_t> owner(n, 0);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = distance(s, base.atoms[i], base.atoms[centers[0]]);
  while (centers.size() < k) {
    std::size_t far = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (nearest[i] > nearest[far]) far = i;
    const std::size_t c = centers.size();
    centers.push_back(far);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = distance(s, base.atoms[i], base.atoms[far]);
      if (d < nearest[i]) {
        nearest[i] = d;
        owner[i] = c;
      }
    }
  }

  DiscreteMeasure out;
  out.weights.assign(k, 0.0);
  for (std::size_t c : centers) out.atoms.push_back(base.atoms[c]);
  for (std::size_t i = 0; i < n; ++i) out.weights[owner[i]] += base.weights[i];
  return merge_atoms(out, 1e-12);
}

}  // namespace wbary
