/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_LOOKUP_TABLE_HPP
#define XBAR_LOOKUP_TABLE_HPP

#include <string>
#include <string_view>
#include <vector>

#include "xbar/matrix.hpp"

namespace xbar {

enum class Direction { kIncreasing, kDecreasing };

std::string_view direction_name(Direction d);
Direction parse_direction(std::string_view name);

/// Inverse-CDF table of the conductance increment produced by one write
/// pulse. Rows are indexed by the cell's current normalized conductance,
/// columns by a uniform quantile: drawing u ~ U(0,1) and interpolating at
/// (g, u) samples the per-pulse increment distribution of the device.
///
/// Invariants (enforced by validate()):
///   - g_grid strictly increasing inside [0,1]
///   - q_grid strictly increasing with endpoints 0 and 1
///   - each row of delta_g non-decreasing along q (it is an inverse CDF)
///   - row means are >= 0 for increasing tables, <= 0 for decreasing ones
struct LookupTable {
  Direction direction = Direction::kIncreasing;
  std::vector<double> g_grid;
  std::vector<double> q_grid;
  Matrix delta_g; // [g_grid.size() x q_grid.size()]

  std::size_t n_g() const { return g_grid.size(); }
  std::size_t n_q() const { return q_grid.size(); }

  /// Throws ConfigError naming the offending row/column on violation.
  void validate() const;

  /// Bilinear interpolation of the increment at (g, q). Arguments are
  /// clamped to the grid hull.
  double interpolate(double g, double q) const;

  /// Mean per-pulse increment at conductance g: the integral of the
  /// interpolated row over q in [0,1] (exact trapezoid, rows are piecewise
  /// linear in q).
  double row_expectation(double g) const;
};

} // namespace xbar

#endif // XBAR_LOOKUP_TABLE_HPP
