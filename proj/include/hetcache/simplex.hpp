#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "hetcache/error.hpp"

namespace hetcache::lp {

struct Solution {
  double objective;
  std::vector<double> x;
};

/// Dense tableau simplex for   max c.x  s.t.  A x <= b,  x >= 0,  b >= 0.
/// Bland's rule; intended for the tiny programs built by the delivery oracle.
inline Solution maximize(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                         const std::vector<double>& c, double eps = 1e-12) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < m; ++i) {
    require(a[i].size() == n, ErrorKind::InvalidArgument, "constraint row width mismatch");
    require(b[i] >= -eps, ErrorKind::InvalidArgument, "origin must be feasible (b >= 0)");
  }
  // tableau rows 0..m-1 constraints, row m objective (reduced costs, negated)
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  std::vector<std::size_t> basis(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[i][j] = a[i][j];
    t[i][n + i] = 1.0;
    t[i][n + m] = std::max(0.0, b[i]);
    basis[i] = n + i;
  }
  for (std::size_t j = 0; j < n; ++j) t[m][j] = -c[j];

  for (std::size_t iter = 0; iter < 100000; ++iter) {
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (t[m][j] < -eps) {
        enter = j;
        break;
      }
    if (enter == n + m) break;
    std::size_t leave = m;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      if (t[i][enter] > eps) {
        const double ratio = t[i][n + m] / t[i][enter];
        if (ratio < best - eps || (ratio <= best + eps && leave < m && basis[i] < basis[leave])) {
          best = ratio;
          leave = i;
        }
      }
    }
    require(leave < m, ErrorKind::Degenerate, "linear program is unbounded");
    const double pivot = t[leave][enter];
    for (auto& v : t[leave]) v /= pivot;
    for (std::size_t i = 0; i <= m; ++i) {
      if (i == leave || t[i][enter] == 0.0) continue;
      const double f = t[i][enter];
      for (std::size_t j = 0; j <= n + m; ++j) t[i][j] -= f * t[leave][j];
    }
    basis[leave] = enter;
  }

  Solution s{t[m][n + m], std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < m; ++i)
    if (basis[i] < n) s.x[basis[i]] = t[i][n + m];
  return s;
}

}  // namespace hetcache::lp
