#pragma once

#include <cstddef>
#include <vector>

namespace wbary::detail {

/// Textbook two-phase tableau simplex for  min c'x  s.t. Ax = b, x >= 0
/// with A dense (rows x cols, row-major) and b >= 0. Tolerates redundant
/// rows. Returns the optimal x; throws Error(NumericalFailure) when
/// infeasible, unbounded or out of iterations.
std::vector<double> dense_tableau_simplex(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                                          const std::vector<double>& b, const std::vector<double>& c);

}  // namespace wbary::detail
