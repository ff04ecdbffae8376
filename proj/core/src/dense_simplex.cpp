#include "dense_simplex.hpp"

#include <cmath>
#include <limits>

#include "wbary/error.hpp"

namespace wbary::detail {

namespace {

constexpr double kEps = 1e-10;

// Tableau columns: [0, cols) structural, [cols, cols + rows) artificial,
// last column the right-hand side.
class Tableau {
 public:
  Tableau(const std::vector<double>& a, std::size_t rows, std::size_t cols, const std::vector<double>& b)
      : rows_(rows), cols_(cols), width_(cols + rows + 1), t_(rows * (cols + rows + 1), 0.0), basis_(rows) {
    for (std::size_t r = 0; r < rows; ++r) {
      const double s = b[r] < 0.0 ? -1.0 : 1.0;
      for (std::size_t k = 0; k < cols; ++k) at(r, k) = s * a[r * cols + k];
      at(r, cols + r) = 1.0;
      at(r, width_ - 1) = s * b[r];
      basis_[r] = cols + r;
    }
    alive_.assign(rows, 1);
  }

  double& at(std::size_t r, std::size_t k) { return t_[r * width_ + k]; }

  // Minimizes cost' x over the current tableau with Bland's rule;
  // `allowed` is the number of leading columns that may enter.
  void optimize(const std::vector<double>& cost, std::size_t allowed) {
    for (std::size_t guard = 0;; ++guard) {
      if (guard > 1'000'000) throw Error(ErrorKind::NumericalFailure, "dense simplex iteration limit");
      std::size_t enter = allowed;
      for (std::size_t k = 0; k < allowed && enter == allowed; ++k) {
        double z = cost[k];
        for (std::size_t r = 0; r < rows_; ++r)
          if (alive_[r]) z -= cost[basis_[r]] * at(r, k);
        if (z < -1e-9) enter = k;
      }
      if (enter == allowed) return;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        if (!alive_[r] || at(r, enter) <= kEps) continue;
        const double ratio = at(r, width_ - 1) / at(r, enter);
        if (leave == rows_ || ratio < best - 1e-13) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + 1e-13 && basis_[r] < basis_[leave]) {
          leave = r;
        }
      }
      if (leave == rows_) throw Error(ErrorKind::NumericalFailure, "dense simplex: unbounded");
      pivot(leave, enter);
    }
  }

  void pivot(std::size_t r, std::size_t k) {
    const double pv = at(r, k);
    for (std::size_t c = 0; c < width_; ++c) at(r, c) /= pv;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, k);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width_; ++c) at(i, c) -= f * at(r, c);
    }
    basis_[r] = k;
  }

  // After phase one: pivot artificials out, drop rows that are redundant.
  void purge_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      std::size_t k = 0;
      while (k < cols_ && std::abs(at(r, k)) <= 1e-9) ++k;
      if (k < cols_) {
        pivot(r, k);
      } else {
        alive_[r] = 0;
      }
    }
  }

  double phase_one_residual() {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] >= cols_) acc += at(r, width_ - 1);
    return acc;
  }

  std::vector<double> solution() {
    std::vector<double> x(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      if (alive_[r] && basis_[r] < cols_) x[basis_[r]] = std::max(0.0, at(r, width_ - 1));
    return x;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
  std::vector<char> alive_;
};

}  // namespace

std::vector<double> dense_tableau_simplex(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                                          const std::vector<double>& b, const std::vector<double>& c) {
  Tableau tab(a, rows, cols, b);
  std::vector<double> phase_one(cols + rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) phase_one[cols + r] = 1.0;
  tab.optimize(phase_one, cols + rows);
  if (tab.phase_one_residual() > 1e-9) throw Error(ErrorKind::NumericalFailure, "dense simplex: infeasible");
  tab.purge_artificials();
  std::vector<double> cost(cols + rows, 0.0);
  for (std::size_t k = 0; k < cols; ++k) cost[k] = c[k];
  tab.optimize(cost, cols);
  return tab.solution();
}

}  // namespace wbary::detail
