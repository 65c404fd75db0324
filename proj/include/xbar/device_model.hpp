/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_DEVICE_MODEL_HPP
#define XBAR_DEVICE_MODEL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "xbar/lookup_table.hpp"
#include "xbar/rng.hpp"

namespace xbar {

/// How a requested conductance change is realized on the cells.
///   kNumeric  - exact arithmetic, no device in the loop.
///   kStandard - one lookup-table pair shared by every cell.
///   kMulti    - a set of table pairs; cells are assigned one pair each
///               (device-to-device variability).
enum class UpdateMode { kNumeric, kStandard, kMulti };

std::string_view update_mode_name(UpdateMode m);
UpdateMode parse_update_mode(std::string_view name);

/// Parametric stand-in for a measured device dataset. Tables generated from
/// one of these follow a soft-bound mean curve
///   increasing: unit_step * (1 - g)^nonlinearity
///   decreasing: -asymmetry * unit_step * g^nonlinearity
/// with a symmetric per-pulse spread of width noise_sigma * unit_step
/// (truncated normal, +-3 sigma).
struct SynthDeviceSpec {
  double nonlinearity = 0.5; // curvature of the mean update vs conductance
  double noise_sigma = 0.1;  // per-pulse spread, in units of unit_step
  double asymmetry = 1.0;    // decrease/increase magnitude ratio
  double d2d_spread = 0.0;   // lognormal parameter jitter across devices
  std::uint64_t seed = 0;    // fixes the device set identity
  double unit_step = 1e-3;   // nominal per-pulse increment

  void validate() const; // throws ConfigError
};

struct DeviceModel {
  UpdateMode mode = UpdateMode::kNumeric;
  std::vector<LookupTable> tables_inc;
  std::vector<LookupTable> tables_dec;
  double unit_step = 1e-3;

  std::size_t device_count() const { return tables_inc.size(); }
  void validate() const; // throws ConfigError
};

/// Realize a signed conductance change on one cell.
///
/// Numeric mode returns the target exactly (clamped only if the cell would
/// leave [0,1]). Standard/Multi quantize the target into
/// k = round(|target| / unit_step) pulses (at least one for a nonzero
/// target) and draw each pulse from the direction-appropriate table at the
/// cell's running conductance. g is advanced in place and stays in [0,1];
/// the cumulative realized change is returned.
double sample_update(const DeviceModel &model, std::size_t cell_id, double &g, double target,
                     RandomStream &rng);

/// Generate a device model from a parametric spec. devices == 1 yields a
/// Standard model, devices >= 2 a Multi model whose table pairs are jittered
/// around the nominal parameters (seeded by spec.seed).
DeviceModel synthesize_device(const SynthDeviceSpec &spec, std::size_t n_g, std::size_t n_q,
                              std::size_t devices = 1);

/// One shipped device configuration. All presets are synthetic: the
/// parameters imitate the qualitative behavior of the named hardware, they
/// are not measurement data.
struct DevicePreset {
  std::string name;    // CLI key, e.g. "dwmtj-sot-0k"
  std::string display; // table label, e.g. "DWMTJ SOT 0K"
  SynthDeviceSpec spec;
  std::size_t devices; // table pairs in Multi mode
  std::size_t n_g;
  std::size_t n_q;
};

/// The eight shipped presets, in the sweep's row order.
const std::vector<DevicePreset> &device_presets();

/// nullptr when the name is not a preset.
const DevicePreset *find_preset(std::string_view name);

/// Build the preset's device model for the requested mode.
DeviceModel preset_device(const DevicePreset &preset, UpdateMode mode);

} // namespace xbar

#endif // XBAR_DEVICE_MODEL_HPP
