#include "wbary/multimarginal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dense_simplex.hpp"
#include "wbary/error.hpp"

namespace wbary {

namespace {

constexpr std::size_t kDropped = std::numeric_limits<std::size_t>::max();

void check_ensemble(const MeasureEnsemble& ens, double p, double weight_tol) {
  if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "p must be >= 1");
  if (ens.measures.empty()) throw Error(ErrorKind::InvalidArgument, "ensemble has no measures");
  if (ens.lambda.size() != ens.measures.size()) {
    throw Error(ErrorKind::DimensionMismatch, "lambda and measures differ in length");
  }
  const double first = std::accumulate(ens.measures[0].weights.begin(), ens.measures[0].weights.end(), 0.0);
  for (std::size_t j = 0; j < ens.measures.size(); ++j) {
    const auto& w = ens.measures[j].weights;
    if (w.empty()) throw Error(ErrorKind::InvalidArgument, "measure " + std::to_string(j) + " is empty");
    const double mass = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::any_of(w.begin(), w.end(), [](double v) { return !(v >= 0.0); }) ||
        std::abs(mass - first) > weight_tol) {
      throw Error(ErrorKind::InfeasibleWeights,
                  "measure " + std::to_string(j) + " does not carry the same total mass as measure 0");
    }
  }
}

std::vector<std::size_t> sizes_of(const MeasureEnsemble& ens) {
  std::vector<std::size_t> n;
  for (const auto& m : ens.measures) n.push_back(m.size());
  return n;
}

std::vector<Point> tuple_atoms(const MeasureEnsemble& ens, std::span<const std::size_t> idx) {
  std::vector<Point> atoms;
  atoms.reserve(idx.size());
  for (std::size_t j = 0; j < idx.size(); ++j) atoms.push_back(ens.measures[j].atoms[idx[j]]);
  return atoms;
}

// One column per index tuple, flattened with the last measure varying
// fastest. Row (j, i) is kept unless j > 0 and i is the last atom of j.
class MultimarginalColumns final : public lp::ColumnSource {
 public:
  MultimarginalColumns(const Space& s, double p, const MeasureEnsemble& ens, const FrechetOptions& fopts)
      : s_(s), p_(p), ens_(ens), fopts_(fopts), n_(sizes_of(ens)) {
    const std::size_t J = n_.size();
    stride_.assign(J, 1);
    for (std::size_t j = J - 1; j > 0; --j) stride_[j - 1] = stride_[j] * n_[j];
    total_ = stride_[0] * n_[0];
    row_.resize(J);
    for (std::size_t j = 0; j < J; ++j) {
      row_[j].resize(n_[j]);
      for (std::size_t i = 0; i < n_[j]; ++i) row_[j][i] = (j > 0 && i + 1 == n_[j]) ? kDropped : rows_++;
    }
    memo_.assign(total_, std::numeric_limits<double>::quiet_NaN());
  }

  std::size_t rows() const override { return rows_; }
  std::size_t columns() const override { return total_; }

  double cost(std::size_t k) const override {
    double& c = memo_[k];
    if (std::isnan(c)) {
      decode(k, scratch_);
      const MultiCost mc = mm_cost(s_, p_, ens_.lambda, tuple_atoms(ens_, scratch_), fopts_);
      if (!mc.converged) ++nonconverged_;
      c = mc.cost;
    }
    return c;
  }

  void column(std::size_t k, std::vector<std::pair<std::size_t, double>>& out) const override {
    out.clear();
    for (std::size_t j = 0; j < n_.size(); ++j) {
      const std::size_t r = row_[j][(k / stride_[j]) % n_[j]];
      if (r != kDropped) out.emplace_back(r, 1.0);
    }
  }

  double dot(std::size_t k, std::span<const double> y) const override {
    double acc = 0.0;
    for (std::size_t j = 0; j < n_.size(); ++j) {
      const std::size_t r = row_[j][(k / stride_[j]) % n_[j]];
      if (r != kDropped) acc += y[r];
    }
    return acc;
  }

  // Odometer over the tuples, carrying the partial dual sums per level.
  void reduced_costs(std::span<const double> y, std::span<double> out) const override {
    const std::size_t J = n_.size();
    std::vector<std::size_t> idx(J, 0);
    std::vector<double> partial(J + 1, 0.0);
    const auto dual = [&](std::size_t j) {
      const std::size_t r = row_[j][idx[j]];
      return r == kDropped ? 0.0 : y[r];
    };
    for (std::size_t j = 0; j < J; ++j) partial[j + 1] = partial[j] + dual(j);
    for (std::size_t k = 0; k < total_; ++k) {
      out[k] = cost(k) - partial[J];
      std::size_t j = J;
      while (j > 0 && ++idx[j - 1] == n_[j - 1]) idx[--j] = 0;
      if (j == 0) break;
      for (std::size_t l = j - 1; l < J; ++l) partial[l + 1] = partial[l] + dual(l);
    }
  }

  void decode(std::size_t k, std::vector<std::size_t>& idx) const {
    idx.resize(n_.size());
    for (std::size_t j = 0; j < n_.size(); ++j) idx[j] = (k / stride_[j]) % n_[j];
  }

  std::size_t encode(std::span<const std::size_t> idx) const {
    std::size_t k = 0;
    for (std::size_t j = 0; j < n_.size(); ++j) k += idx[j] * stride_[j];
    return k;
  }

  std::vector<double> rhs() const {
    std::vector<double> b(rows_);
    for (std::size_t j = 0; j < n_.size(); ++j)
      for (std::size_t i = 0; i < n_[j]; ++i)
        if (row_[j][i] != kDropped) b[row_[j][i]] = ens_.measures[j].weights[i];
    return b;
  }

  // Multi-dimensional north-west corner: every step exhausts one atom of
  // one measure, giving 1 + sum_j (n_j - 1) columns that form a basis.
  std::vector<std::size_t> north_west_corner() const {
    const std::size_t J = n_.size();
    std::vector<std::size_t> idx(J, 0);
    std::vector<double> rem(J);
    for (std::size_t j = 0; j < J; ++j) rem[j] = ens_.measures[j].weights[0];
    std::vector<std::size_t> basis;
    basis.reserve(rows_);
    for (;;) {
      basis.push_back(encode(idx));
      const double mass = *std::min_element(rem.begin(), rem.end());
      std::size_t advance = J;
      for (std::size_t j = 0; j < J; ++j) {
        if (idx[j] + 1 == n_[j]) continue;
        if (advance == J || rem[j] < rem[advance]) advance = j;
      }
      if (advance == J) break;
      for (double& r : rem) r -= mass;
      ++idx[advance];
      rem[advance] = ens_.measures[advance].weights[idx[advance]];
    }
    return basis;
  }

  std::size_t nonconverged() const { return nonconverged_; }

 private:
  const Space& s_;
  double p_;
  const MeasureEnsemble& ens_;
  FrechetOptions fopts_;
  std::vector<std::size_t> n_;
  std::vector<std::size_t> stride_;
  std::size_t total_ = 0;
  std::size_t rows_ = 0;
  std::vector<std::vector<std::size_t>> row_;
  mutable std::vector<double> memo_;
  mutable std::vector<std::size_t> scratch_;
  mutable std::size_t nonconverged_ = 0;
};

}  // namespace

std::vector<std::vector<double>> MultiCoupling::marginals(std::span<const std::size_t> sizes) const {
  std::vector<std::vector<double>> out(sizes.size());
  for (std::size_t j = 0; j < sizes.size(); ++j) out[j].assign(sizes[j], 0.0);
  for (const auto& e : entries)
    for (std::size_t j = 0; j < sizes.size(); ++j) out[j][e.index[j]] += e.mass;
  return out;
}

std::size_t product_size(const MeasureEnsemble& ens) noexcept {
  std::size_t prod = 1;
  for (const auto& m : ens.measures) {
    if (m.size() == 0) return 0;
    if (prod > std::numeric_limits<std::size_t>::max() / m.size()) return std::numeric_limits<std::size_t>::max();
    prod *= m.size();
  }
  return prod;
}

MultiCost mm_cost(const Space& s, double p, std::span<const double> lam, std::span<const Point> atoms,
                  const FrechetOptions& opts) {
  FrechetResult fr = frechet_mean(s, p, atoms, lam, opts);
  return {fr.objective, std::move(fr.point), fr.converged};
}

MultiCoupling solve_multimarginal(const Space& s, double p, const MeasureEnsemble& ens,
                                  const MultimarginalOptions& opts) {
  check_ensemble(ens, p, opts.weight_tol);
  const std::size_t prod = product_size(ens);
  if (prod > opts.max_product_size) {
    throw Error(ErrorKind::ProductSizeExceeded, "product of support sizes " +
                                                    (prod == std::numeric_limits<std::size_t>::max()
                                                         ? std::string("overflows")
                                                         : std::to_string(prod)) +
                                                    " exceeds the cap --max-product-size=" +
                                                    std::to_string(opts.max_product_size));
  }
  MultimarginalColumns cols(s, p, ens, opts.frechet);
  const std::vector<double> b = cols.rhs();
  const lp::Result res = lp::solve(cols, b, cols.north_west_corner(), opts.lp);

  MultiCoupling out;
  std::vector<std::pair<std::size_t, double>> flat;
  for (std::size_t r = 0; r < res.basis.size(); ++r)
    if (res.values[r] > 0.0) flat.emplace_back(res.basis[r], res.values[r]);
  std::sort(flat.begin(), flat.end());
  for (const auto& [k, mass] : flat) {
    MultiCoupling::Entry e;
    cols.decode(k, e.index);
    e.mass = mass;
    out.objective += mass * cols.cost(k);
    out.entries.push_back(std::move(e));
  }
  out.dual_objective = res.dual_objective;
  out.iterations = res.iterations;
  out.nonconverged_costs = cols.nonconverged();
  return out;
}

MultiCoupling comonotone_coupling(const Space& s, double p, const MeasureEnsemble& ens, const FrechetOptions& opts) {
  if (!s.is_euclidean() || s.point_dim() != 1) {
    throw Error(ErrorKind::UnsupportedSpace, "the comonotone coupling needs Euclidean(1)");
  }
  check_ensemble(ens, p, 1e-9);
  const std::size_t J = ens.size();
  // Positive-mass atoms of each measure in increasing order.
  std::vector<std::vector<std::size_t>> order(J);
  for (std::size_t j = 0; j < J; ++j) {
    const auto& m = ens.measures[j];
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m.weights[i] > 0.0) order[j].push_back(i);
    std::stable_sort(order[j].begin(), order[j].end(),
                     [&](std::size_t a, std::size_t b) { return m.atoms[a][0] < m.atoms[b][0]; });
  }
  std::vector<std::size_t> pos(J, 0);
  std::vector<double> cum(J);
  for (std::size_t j = 0; j < J; ++j) cum[j] = ens.measures[j].weights[order[j][0]];

  MultiCoupling out;
  double level = 0.0;
  for (;;) {
    const double next = *std::min_element(cum.begin(), cum.end());
    MultiCoupling::Entry e;
    e.index.resize(J);
    for (std::size_t j = 0; j < J; ++j) e.index[j] = order[j][pos[j]];
    e.mass = next - level;
    if (e.mass > 0.0) {
      const MultiCost mc = mm_cost(s, p, ens.lambda, tuple_atoms(ens, e.index), opts);
      if (!mc.converged) ++out.nonconverged_costs;
      out.objective += e.mass * mc.cost;
      out.entries.push_back(std::move(e));
    }
    level = next;
    bool advanced = false;
    bool done = true;
    for (std::size_t j = 0; j < J; ++j) {
      if (pos[j] + 1 < order[j].size()) {
        done = false;
        if (cum[j] <= next) {
          ++pos[j];
          cum[j] += ens.measures[j].weights[order[j][pos[j]]];
          advanced = true;
        }
      }
    }
    if (done) break;
    if (!advanced) {
      // Roundoff left a measure short at its last atom; advance the
      // smallest unfinished cumulative level.
      std::size_t jmin = J;
      for (std::size_t j = 0; j < J; ++j)
        if (pos[j] + 1 < order[j].size() && (jmin == J || cum[j] < cum[jmin])) jmin = j;
      ++pos[jmin];
      cum[jmin] += ens.measures[jmin].weights[order[jmin][pos[jmin]]];
    }
  }
  // The final level may fall short of the total mass by roundoff.
  out.dual_objective = out.objective;
  return out;
}

DiscreteMeasure pushforward_barycenter(const Space& s, double p, const MeasureEnsemble& ens,
                                       const MultiCoupling& gamma, const FrechetOptions& opts) {
  DiscreteMeasure nu;
  for (const auto& e : gamma.entries) {
    if (!(e.mass > 0.0)) continue;
    if (e.index.size() != ens.size()) throw Error(ErrorKind::DimensionMismatch, "coupling entry has wrong arity");
    for (std::size_t j = 0; j < ens.size(); ++j) {
      if (e.index[j] >= ens.measures[j].size()) {
        throw Error(ErrorKind::InvalidArgument, "coupling index out of range for measure " + std::to_string(j));
      }
    }
    MultiCost mc = mm_cost(s, p, ens.lambda, tuple_atoms(ens, e.index), opts);
    nu.atoms.push_back(std::move(mc.minimizer));
    nu.weights.push_back(e.mass);
  }
  return merge_atoms(nu, 1e-12);
}

MultiCoupling brute_force_multimarginal(const Space& s, double p, const MeasureEnsemble& ens,
                                        std::size_t max_product, const FrechetOptions& opts) {
  check_ensemble(ens, p, 1e-9);
  const std::size_t prod = product_size(ens);
  if (prod > max_product) {
    throw Error(ErrorKind::ProductSizeExceeded,
                "brute-force oracle limited to " + std::to_string(max_product) + " tuples, got " +
                    std::to_string(prod));
  }
  const std::size_t J = ens.size();
  std::vector<std::size_t> offset(J, 0);
  std::size_t rows = 0;
  for (std::size_t j = 0; j < J; ++j) {
    offset[j] = rows;
    rows += ens.measures[j].size();
  }
  // Enumerate tuples with an odometer, first measure slowest.
  std::vector<std::vector<std::size_t>> tuples;
  tuples.reserve(prod);
  std::vector<std::size_t> idx(J, 0);
  for (;;) {
    tuples.push_back(idx);
    std::size_t j = J;
    while (j > 0) {
      --j;
      if (++idx[j] < ens.measures[j].size()) break;
      idx[j] = 0;
      if (j == 0) {
        j = J + 1;
        break;
      }
    }
    if (j == J + 1) break;
  }

  std::vector<double> a(rows * prod, 0.0), b(rows), c(prod);
  for (std::size_t k = 0; k < prod; ++k) {
    for (std::size_t j = 0; j < J; ++j) a[(offset[j] + tuples[k][j]) * prod + k] = 1.0;
    std::vector<Point> atoms;
    for (std::size_t j = 0; j < J; ++j) atoms.push_back(ens.measures[j].atoms[tuples[k][j]]);
    c[k] = frechet_mean(s, p, atoms, ens.lambda, opts).objective;
  }
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t i = 0; i < ens.measures[j].size(); ++i) b[offset[j] + i] = ens.measures[j].weights[i];

  const std::vector<double> x = detail::dense_tableau_simplex(a, rows, prod, b, c);
  MultiCoupling out;
  for (std::size_t k = 0; k < prod; ++k) {
    if (x[k] <= 0.0) continue;
    out.entries.push_back({tuples[k], x[k]});
    out.objective += x[k] * c[k];
  }
  out.dual_objective = out.objective;
  return out;
}

}  // namespace wbary
