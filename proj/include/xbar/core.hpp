/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_CORE_HPP
#define XBAR_CORE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "xbar/device_model.hpp"
#include "xbar/matrix.hpp"
#include "xbar/rng.hpp"

namespace xbar {

struct UpdateRecord {
  int epoch;
  double target;   // requested weight change
  double realized; // what the device delivered, decoded back to weight units
};

/// Target-vs-realized log of every recorded write event. Recording can be
/// toggled by the owner (e.g. to subsample training steps); appends are
/// ignored while disabled.
class UpdateErrorLog {
public:
  void set_enabled(bool on) { enabled_ = on; }
  bool enabled() const { return enabled_; }

  void append(int epoch, double target, double realized) {
    if (enabled_) {
      records_.push_back({epoch, target, realized});
    }
  }

  const std::vector<UpdateRecord> &records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  void clear() { records_.clear(); }

private:
  bool enabled_ = true;
  std::vector<UpdateRecord> records_;
};

/// One weight matrix realized as a balanced pair of conductance arrays:
/// w[i][j] = w_max * (g_pos[i][j] - g_neg[i][j]), every conductance in [0,1].
/// Reads (vmm, vmm_transpose) are noiseless; writes go through the
/// DeviceModel one cell at a time. A core is single-owner mutable state and
/// owns its random stream.
class BalancedCore {
public:
  BalancedCore(std::size_t rows, std::size_t cols, double w_max, DeviceModel device,
               std::uint64_t seed);

  /// Encode a weight matrix symmetrically around the conductance midpoint:
  /// g_pos = 0.5 + w/(2 w_max), g_neg = 0.5 - w/(2 w_max). Throws
  /// DomainError when any |w| exceeds w_max.
  static BalancedCore from_weights(const Matrix &w, double w_max, DeviceModel device,
                                   std::uint64_t seed);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double w_max() const { return w_max_; }
  const DeviceModel &device() const { return device_; }

  double weight(std::size_t i, std::size_t j) const {
    return w_max_ * (g_pos_(i, j) - g_neg_(i, j));
  }
  Matrix decoded_weights() const;

  double g_pos(std::size_t i, std::size_t j) const { return g_pos_(i, j); }
  double g_neg(std::size_t i, std::size_t j) const { return g_neg_(i, j); }

  /// Overwrite one cell with the symmetric encoding of w (digital store,
  /// no device in the loop). Used by checkpoint loading and tests.
  void set_weight(std::size_t i, std::size_t j, double w);
  void set_conductances(std::size_t i, std::size_t j, double pos, double neg);

  /// Parallel read: returns W x, rows summed in ascending column order.
  std::vector<double> vmm(std::span<const double> x) const;

  /// Transpose read for backpropagation: returns W^T d.
  std::vector<double> vmm_transpose(std::span<const double> d) const;

  /// Parallel rank-one write: target weight change dW[i][j] = -eta d[i] x[j].
  /// Positive targets pulse g_pos, negative targets pulse g_neg, both in
  /// their increasing direction. Realized changes are decoded to weight
  /// units and appended to the recorder (one record per nonzero target).
  void outer_update(double eta, std::span<const double> d, std::span<const double> x, int epoch);

  /// Per-element targets (used when the step is not rank-one, e.g. Adam).
  void apply_weight_update(const Matrix &delta_w, int epoch);

  /// Shift every cell's conductance pair toward the 0.5 midpoint without
  /// changing the decoded weight: exactly in Numeric mode, to within one
  /// unit_step per cell otherwise (closed-loop single pulses through the
  /// direction-appropriate tables).
  void recenter();

  void set_recorder(UpdateErrorLog *log) { recorder_ = log; }
  UpdateErrorLog *recorder() const { return recorder_; }

  /// Saturation band that triggers an automatic recenter after a write.
  void set_recenter_band(double lo, double hi);

private:
  void apply_cell_update(std::size_t i, std::size_t j, double target_w, int epoch);
  void drive_to(double &g, std::size_t cell_id, double target_g);

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  double w_max_ = 1.0;
  Matrix g_pos_;
  Matrix g_neg_;
  DeviceModel device_;
  RandomStream rng_;
  UpdateErrorLog *recorder_ = nullptr;
  double band_lo_ = 0.05;
  double band_hi_ = 0.95;
  bool needs_recenter_ = false;
};

} // namespace xbar

#endif // XBAR_CORE_HPP
