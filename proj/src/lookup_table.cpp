/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/lookup_table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "xbar/errors.hpp"

namespace xbar {

std::string_view direction_name(Direction d) {
  return d == Direction::kIncreasing ? "increasing" : "decreasing";
}

Direction parse_direction(std::string_view name) {
  if (name == "increasing") {
    return Direction::kIncreasing;
  }
  if (name == "decreasing") {
    return Direction::kDecreasing;
  }
  throw ConfigError("unknown table direction '" + std::string(name) + "'");
}

namespace {

// Index of the grid segment containing x, clamping to the hull.
// grid has at least two entries. Returns i with grid[i] <= x <= grid[i+1]
// modulo clamping, plus the interpolation weight t in [0,1].
std::pair<std::size_t, double> locate(const std::vector<double> &grid, double x) {
  if (x <= grid.front()) {
    return {0, 0.0};
  }
  if (x >= grid.back()) {
    return {grid.size() - 2, 1.0};
  }
  const auto it = std::upper_bound(grid.begin(), grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - grid.begin()) - 1;
  const double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
  return {i, t};
}

} // namespace

void LookupTable::validate() const {
  if (g_grid.size() < 2) {
    throw ConfigError("conductance grid needs at least 2 levels");
  }
  if (q_grid.size() < 2) {
    throw ConfigError("quantile grid needs at least 2 levels");
  }
  if (delta_g.rows() != g_grid.size() || delta_g.cols() != q_grid.size()) {
    std::ostringstream os;
    os << "table shape " << delta_g.rows() << "x" << delta_g.cols() << " does not match grids "
       << g_grid.size() << "x" << q_grid.size();
    throw ConfigError(os.str());
  }
  for (std::size_t i = 0; i + 1 < g_grid.size(); ++i) {
    if (!(g_grid[i] < g_grid[i + 1])) {
      std::ostringstream os;
      os << "unsorted conductance grid at index " << i + 1;
      throw ConfigError(os.str());
    }
  }
  if (g_grid.front() < 0.0 || g_grid.back() > 1.0) {
    throw ConfigError("conductance grid exceeds [0,1]");
  }
  for (std::size_t j = 0; j + 1 < q_grid.size(); ++j) {
    if (!(q_grid[j] < q_grid[j + 1])) {
      std::ostringstream os;
      os << "unsorted quantile grid at index " << j + 1;
      throw ConfigError(os.str());
    }
  }
  if (q_grid.front() != 0.0 || q_grid.back() != 1.0) {
    throw ConfigError("quantile grid must span [0,1] exactly");
  }
  for (std::size_t i = 0; i < delta_g.rows(); ++i) {
    double mean = 0.0;
    for (std::size_t j = 0; j < delta_g.cols(); ++j) {
      const double v = delta_g(i, j);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite increment at row " << i << " column " << j;
        throw ConfigError(os.str());
      }
      if (j > 0 && delta_g(i, j - 1) > v) {
        std::ostringstream os;
        os << "non-monotone CDF row " << i << " between columns " << j - 1 << " and " << j;
        throw ConfigError(os.str());
      }
      mean += v;
    }
    mean /= static_cast<double>(delta_g.cols());
    // Direction applies to the row average, not every draw; noisy devices
    // jitter both ways. Tolerance absorbs accumulation roundoff.
    const double tol = 1e-12;
    if (direction == Direction::kIncreasing && mean < -tol) {
      std::ostringstream os;
      os << "row " << i << " has negative mean in an increasing table";
      throw ConfigError(os.str());
    }
    if (direction == Direction::kDecreasing && mean > tol) {
      std::ostringstream os;
      os << "row " << i << " has positive mean in a decreasing table";
      throw ConfigError(os.str());
    }
  }
}

double LookupTable::interpolate(double g, double q) const {
  const auto [i, tg] = locate(g_grid, g);
  const auto [j, tq] = locate(q_grid, q);
  const double v00 = delta_g(i, j);
  const double v01 = delta_g(i, j + 1);
  const double v10 = delta_g(i + 1, j);
  const double v11 = delta_g(i + 1, j + 1);
  const double lo = v00 + (v01 - v00) * tq;
  const double hi = v10 + (v11 - v10) * tq;
  return lo + (hi - lo) * tg;
}

double LookupTable::row_expectation(double g) const {
  const auto [i, tg] = locate(g_grid, g);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < q_grid.size(); ++j) {
    const double a =
        (delta_g(i, j) + (delta_g(i + 1, j) - delta_g(i, j)) * tg);
    const double b =
        (delta_g(i, j + 1) + (delta_g(i + 1, j + 1) - delta_g(i, j + 1)) * tg);
    acc += 0.5 * (a + b) * (q_grid[j + 1] - q_grid[j]);
  }
  return acc;
}

} // namespace xbar
