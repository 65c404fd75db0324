/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/core.hpp"

#include <cmath>
#include <sstream>

#include "xbar/errors.hpp"

namespace xbar {

BalancedCore::BalancedCore(std::size_t rows, std::size_t cols, double w_max, DeviceModel device,
                           std::uint64_t seed)
    : rows_(rows), cols_(cols), w_max_(w_max), g_pos_(rows, cols, 0.5), g_neg_(rows, cols, 0.5),
      device_(std::move(device)), rng_(seed, 0xc04e) {
  if (rows == 0 || cols == 0) {
    throw ConfigError("core dimensions must be positive");
  }
  if (!(w_max > 0.0) || !std::isfinite(w_max)) {
    throw ConfigError("w_max must be finite and > 0");
  }
  device_.validate();
}

BalancedCore BalancedCore::from_weights(const Matrix &w, double w_max, DeviceModel device,
                                        std::uint64_t seed) {
  BalancedCore core(w.rows(), w.cols(), w_max, std::move(device), seed);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
      core.set_weight(i, j, w(i, j));
    }
  }
  return core;
}

void BalancedCore::set_weight(std::size_t i, std::size_t j, double w) {
  if (std::fabs(w) > w_max_) {
    std::ostringstream os;
    os << "weight " << w << " at (" << i << "," << j << ") exceeds w_max " << w_max_;
    throw DomainError(os.str());
  }
  const double half = w / (2.0 * w_max_);
  g_pos_(i, j) = 0.5 + half;
  g_neg_(i, j) = 0.5 - half;
}

void BalancedCore::set_conductances(std::size_t i, std::size_t j, double pos, double neg) {
  if (!(pos >= 0.0 && pos <= 1.0 && neg >= 0.0 && neg <= 1.0)) {
    throw DomainError("conductance outside [0,1]");
  }
  g_pos_(i, j) = pos;
  g_neg_(i, j) = neg;
}

Matrix BalancedCore::decoded_weights() const {
  Matrix w(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      w(i, j) = weight(i, j);
    }
  }
  return w;
}

std::vector<double> BalancedCore::vmm(std::span<const double> x) const {
  if (x.size() != cols_) {
    throw DomainError("vmm input length does not match core columns");
  }
  std::vector<double> out(rows_, 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
      acc += w_max_ * (g_pos_(i, j) - g_neg_(i, j)) * x[j];
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> BalancedCore::vmm_transpose(std::span<const double> d) const {
  if (d.size() != rows_) {
    throw DomainError("vmm_transpose input length does not match core rows");
  }
  std::vector<double> out(cols_, 0.0);
  for (std::size_t j = 0; j < cols_; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      acc += w_max_ * (g_pos_(i, j) - g_neg_(i, j)) * d[i];
    }
    out[j] = acc;
  }
  return out;
}

void BalancedCore::apply_cell_update(std::size_t i, std::size_t j, double target_w, int epoch) {
  if (target_w == 0.0) {
    return;
  }
  // Sign routing: each array is only ever pulsed in its increasing
  // direction during training. Pulsing g_neg up lowers the decoded weight.
  const bool positive = target_w > 0.0;
  double &g = positive ? g_pos_(i, j) : g_neg_(i, j);
  const std::size_t cell_id = 2 * (i * cols_ + j) + (positive ? 0 : 1);
  const double target_g = std::fabs(target_w) / w_max_;
  const double realized_g = sample_update(device_, cell_id, g, target_g, rng_);
  const double realized_w = (positive ? 1.0 : -1.0) * w_max_ * realized_g;
  if (recorder_) {
    recorder_->append(epoch, target_w, realized_w);
  }
  if (g > band_hi_ || g < band_lo_) {
    needs_recenter_ = true;
  }
}

void BalancedCore::outer_update(double eta, std::span<const double> d, std::span<const double> x,
                                int epoch) {
  if (!(eta > 0.0)) {
    throw DomainError("learning rate must be > 0");
  }
  if (d.size() != rows_ || x.size() != cols_) {
    throw DomainError("outer_update dimensions do not match core");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      apply_cell_update(i, j, -eta * d[i] * x[j], epoch);
    }
  }
  if (needs_recenter_) {
    needs_recenter_ = false;
    recenter();
  }
}

void BalancedCore::apply_weight_update(const Matrix &delta_w, int epoch) {
  if (delta_w.rows() != rows_ || delta_w.cols() != cols_) {
    throw DomainError("update matrix dimensions do not match core");
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      apply_cell_update(i, j, delta_w(i, j), epoch);
    }
  }
  if (needs_recenter_) {
    needs_recenter_ = false;
    recenter();
  }
}

void BalancedCore::drive_to(double &g, std::size_t cell_id, double target_g) {
  // Closed-loop single pulses toward the target, stopping inside a
  // half-step band. Pulse direction is re-chosen after every write, so
  // stochastic overshoot self-corrects. The iteration cap covers
  // pathological tables.
  const double tol = 0.5 * device_.unit_step;
  const double distance = std::fabs(target_g - g);
  if (distance <= tol) {
    return;
  }
  long long cap = 6 * static_cast<long long>(std::ceil(distance / device_.unit_step)) + 64;
  while (std::fabs(target_g - g) > tol && cap-- > 0) {
    const double step = target_g > g ? device_.unit_step : -device_.unit_step;
    sample_update(device_, cell_id, g, step, rng_);
  }
}

void BalancedCore::recenter() {
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      double &pos = g_pos_(i, j);
      double &neg = g_neg_(i, j);
      const double shift = 0.5 * (pos + neg) - 0.5;
      if (shift == 0.0) {
        continue;
      }
      if (device_.mode == UpdateMode::kNumeric) {
        // Equal exact shift on both arrays; midpoint targets are always
        // inside [0,1] because |g_pos - g_neg| <= 1.
        const std::size_t base = 2 * (i * cols_ + j);
        sample_update(device_, base, pos, -shift, rng_);
        sample_update(device_, base + 1, neg, -shift, rng_);
      } else {
        const double diff = pos - neg;
        drive_to(pos, 2 * (i * cols_ + j), 0.5 + 0.5 * diff);
        drive_to(neg, 2 * (i * cols_ + j) + 1, 0.5 - 0.5 * diff);
      }
    }
  }
}

void BalancedCore::set_recenter_band(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) {
    throw ConfigError("recenter band must satisfy 0 <= lo < hi <= 1");
  }
  band_lo_ = lo;
  band_hi_ = hi;
}

} // namespace xbar
