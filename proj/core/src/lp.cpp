#include "wbary/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wbary/error.hpp"

namespace wbary::lp {

double ColumnSource::dot(std::size_t k, std::span<const double> y) const {
  std::vector<std::pair<std::size_t, double>> col;
  column(k, col);
  double acc = 0.0;
  for (const auto& [r, v] : col) acc += v * y[r];
  return acc;
}

void ColumnSource::reduced_costs(std::span<const double> y, std::span<double> out) const {
  for (std::size_t k = 0; k < columns(); ++k) out[k] = cost(k) - dot(k, y);
}

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

class RevisedSimplex {
 public:
  RevisedSimplex(const ColumnSource& src, std::span<const double> rhs, const Options& opts)
      : src_(src), m_(src.rows()), n_(src.columns()), b_(rhs.begin(), rhs.end()), opts_(opts) {
    if (b_.size() != m_) {
      throw Error(ErrorKind::DimensionMismatch, "rhs has " + std::to_string(b_.size()) + " entries for " +
                                                    std::to_string(m_) + " rows");
    }
    sign_.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) sign_[r] = b_[r] < 0.0 ? -1.0 : 1.0;
    basic_.assign(n_ + m_, 0);
  }

  Result run(const std::vector<std::size_t>& initial) {
    if (initial.empty()) {
      basis_.resize(m_);
      for (std::size_t r = 0; r < m_; ++r) basis_[r] = n_ + r;
      for (std::size_t r = 0; r < m_; ++r) basic_[n_ + r] = 1;
      refactor();
      iterate(true);
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (is_artificial(basis_[r])) infeasibility += std::max(0.0, x_[r]);
      double scale = 1.0;
      for (double v : b_) scale += std::abs(v);
      if (infeasibility > opts_.feasibility_tol * scale) {
        throw Error(ErrorKind::NumericalFailure, "LP is infeasible (phase-one residual " +
                                                     std::to_string(infeasibility) + ")");
      }
      drive_out_artificials();
    } else {
      if (initial.size() != m_) throw Error(ErrorKind::InvalidArgument, "initial basis needs one column per row");
      basis_ = initial;
      for (std::size_t k : basis_) {
        if (k >= n_ || basic_[k]) throw Error(ErrorKind::InvalidArgument, "initial basis has a bad column");
        basic_[k] = 1;
      }
      refactor();
      for (double v : x_) {
        if (v < -opts_.feasibility_tol) throw Error(ErrorKind::NumericalFailure, "initial basis is infeasible");
      }
    }
    iterate(false);
    refactor();
    return finish();
  }

 private:
  bool is_artificial(std::size_t k) const { return k >= n_; }

  double cost(std::size_t k, bool phase_one) const {
    if (is_artificial(k)) return phase_one ? 1.0 : 0.0;
    return phase_one ? 0.0 : src_.cost(k);
  }

  void column(std::size_t k, std::vector<std::pair<std::size_t, double>>& out) const {
    if (is_artificial(k)) {
      out.assign(1, {k - n_, sign_[k - n_]});
    } else {
      src_.column(k, out);
    }
  }

  double dot(std::size_t k, std::span<const double> y) const {
    if (is_artificial(k)) return sign_[k - n_] * y[k - n_];
    return src_.dot(k, y);
  }

  // Gauss-Jordan with partial pivoting on the dense basis matrix.
  void refactor() {
    std::vector<double> a(m_ * m_, 0.0);
    for (std::size_t c = 0; c < m_; ++c) {
      column(basis_[c], col_);
      for (const auto& [r, v] : col_) a[r * m_ + c] = v;
    }
    binv_.assign(m_ * m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) binv_[r * m_ + r] = 1.0;
    for (std::size_t c = 0; c < m_; ++c) {
      std::size_t piv = c;
      for (std::size_t r = c + 1; r < m_; ++r)
        if (std::abs(a[r * m_ + c]) > std::abs(a[piv * m_ + c])) piv = r;
      if (std::abs(a[piv * m_ + c]) < 1e-13) throw Error(ErrorKind::NumericalFailure, "singular basis matrix");
      if (piv != c) {
        for (std::size_t k = 0; k < m_; ++k) {
          std::swap(a[c * m_ + k], a[piv * m_ + k]);
          std::swap(binv_[c * m_ + k], binv_[piv * m_ + k]);
        }
      }
      const double inv = 1.0 / a[c * m_ + c];
      for (std::size_t k = 0; k < m_; ++k) {
        a[c * m_ + k] *= inv;
        binv_[c * m_ + k] *= inv;
      }
      for (std::size_t r = 0; r < m_; ++r) {
        if (r == c) continue;
        const double f = a[r * m_ + c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < m_; ++k) {
          a[r * m_ + k] -= f * a[c * m_ + k];
          binv_[r * m_ + k] -= f * binv_[c * m_ + k];
        }
      }
    }
    x_.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      double acc = 0.0;
      for (std::size_t k = 0; k < m_; ++k) acc += binv_[r * m_ + k] * b_[k];
      x_[r] = std::abs(acc) < 1e-15 ? 0.0 : acc;
    }
    since_refactor_ = 0;
  }

  void duals(bool phase_one, std::vector<double>& y) const {
    y.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = cost(basis_[r], phase_one);
      if (cb == 0.0) continue;
      const double* row = &binv_[r * m_];
      for (std::size_t c = 0; c < m_; ++c) y[c] += cb * row[c];
    }
  }

  // Most negative reduced cost; the first negative one while in Bland mode.
  std::size_t price(bool phase_one, const std::vector<double>& y, bool bland) {
    const std::size_t limit = phase_one ? n_ + m_ : n_;
    if (!phase_one) {
      rc_.resize(n_);
      src_.reduced_costs(y, rc_);
    }
    std::size_t pick = kNone;
    double best = -opts_.optimality_tol;
    for (std::size_t k = 0; k < limit; ++k) {
      if (basic_[k]) continue;
      const double rc = phase_one ? cost(k, true) - dot(k, y) : rc_[k];
      if (rc < best) {
        if (bland) return k;
        best = rc;
        pick = k;
      }
    }
    return pick;
  }

  void pivot_direction(std::size_t k, std::vector<double>& d) {
    column(k, col_);
    d.assign(m_, 0.0);
    for (const auto& [r, v] : col_)
      for (std::size_t i = 0; i < m_; ++i) d[i] += binv_[i * m_ + r] * v;
  }

  void pivot(std::size_t enter, std::size_t row, const std::vector<double>& d) {
    const double theta = std::max(0.0, x_[row]) / d[row];
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row) continue;
      x_[i] -= theta * d[i];
      if (std::abs(x_[i]) < 1e-15) x_[i] = 0.0;
    }
    x_[row] = theta;

    double* prow = &binv_[row * m_];
    const double inv = 1.0 / d[row];
    for (std::size_t c = 0; c < m_; ++c) prow[c] *= inv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || d[i] == 0.0) continue;
      double* irow = &binv_[i * m_];
      const double f = d[i];
      for (std::size_t c = 0; c < m_; ++c) irow[c] -= f * prow[c];
    }
    basic_[basis_[row]] = 0;
    basic_[enter] = 1;
    basis_[row] = enter;
    ++iterations_;
    if (++since_refactor_ >= opts_.refactor_interval) refactor();
  }

  void iterate(bool phase_one) {
    std::vector<double> y, d;
    std::size_t degenerate_run = 0;
    for (;;) {
      if (iterations_ >= opts_.max_iterations) {
        throw Error(ErrorKind::NumericalFailure,
                    "simplex exceeded " + std::to_string(opts_.max_iterations) + " pivots (cycling guard)");
      }
      duals(phase_one, y);
      const std::size_t enter = price(phase_one, y, degenerate_run >= opts_.bland_after);
      if (enter == kNone) return;
      pivot_direction(enter, d);

      // Bland: among minimum ratios the basic variable of smallest index.
      std::size_t row = kNone;
      double best = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        double ratio;
        if (!phase_one && is_artificial(basis_[i]) && std::abs(d[i]) > opts_.pivot_tol) {
          ratio = 0.0;  // zero-level artificial of a redundant row: pivot it out at once
        } else if (d[i] > opts_.pivot_tol) {
          ratio = std::max(0.0, x_[i]) / d[i];
        } else {
          continue;
        }
        if (row == kNone || ratio < best - 1e-14) {
          best = ratio;
          row = i;
        } else if (ratio <= best + 1e-14 && basis_[i] < basis_[row]) {
          row = i;
        }
      }
      if (row == kNone) throw Error(ErrorKind::NumericalFailure, "LP is unbounded");
      degenerate_run = best * d[row] > 0.0 ? 0 : degenerate_run + 1;
      pivot(enter, row, d);
    }
  }

  void drive_out_artificials() {
    std::vector<double> rho(m_);
    for (std::size_t r = 0; r < m_; ++r) {
      if (!is_artificial(basis_[r])) continue;
      for (std::size_t c = 0; c < m_; ++c) rho[c] = binv_[r * m_ + c];
      for (std::size_t k = 0; k < n_; ++k) {
        if (basic_[k]) continue;
        if (std::abs(src_.dot(k, rho)) > 1e-9) {
          std::vector<double> d;
          pivot_direction(k, d);
          pivot(k, r, d);
          break;
        }
      }
    }
  }

  Result finish() const {
    Result res;
    res.basis = basis_;
    res.values = x_;
    for (double& v : res.values)
      if (v < 0.0) v = 0.0;
    duals(false, res.duals);
    for (std::size_t r = 0; r < m_; ++r) res.objective += cost(basis_[r], false) * res.values[r];
    for (std::size_t r = 0; r < m_; ++r) res.dual_objective += res.duals[r] * b_[r];
    double min_rc = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n_; ++k) min_rc = std::min(min_rc, src_.cost(k) - src_.dot(k, res.duals));
    res.min_reduced_cost = n_ == 0 ? 0.0 : min_rc;
    res.iterations = iterations_;
    return res;
  }

  const ColumnSource& src_;
  std::size_t m_;
  std::size_t n_;
  std::vector<double> b_;
  Options opts_;
  std::vector<double> sign_;
  std::vector<std::size_t> basis_;
  std::vector<char> basic_;
  std::vector<double> binv_;
  std::vector<double> x_;
  std::vector<double> rc_;
  std::vector<std::pair<std::size_t, double>> col_;
  std::size_t iterations_ = 0;
  std::size_t since_refactor_ = 0;
};

}  // namespace

Result solve(const ColumnSource& src, std::span<const double> rhs, const std::vector<std::size_t>& initial_basis,
             const Options& opts) {
  if (src.rows() == 0) throw Error(ErrorKind::InvalidArgument, "LP has no rows");
  return RevisedSimplex(src, rhs, opts).run(initial_basis);
}

}  // namespace wbary::lp
