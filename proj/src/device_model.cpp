/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/device_model.hpp"

#include <cmath>
#include <sstream>

#include "xbar/errors.hpp"

namespace xbar {

namespace {

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

constexpr double kNoiseTruncation = 3.0; // per-pulse spread cut at +-3 sigma

} // namespace

std::string_view update_mode_name(UpdateMode m) {
  switch (m) {
  case UpdateMode::kNumeric:
    return "numeric";
  case UpdateMode::kStandard:
    return "standard";
  case UpdateMode::kMulti:
    return "multi";
  }
  return "?";
}

UpdateMode parse_update_mode(std::string_view name) {
  if (name == "numeric") {
    return UpdateMode::kNumeric;
  }
  if (name == "standard") {
    return UpdateMode::kStandard;
  }
  if (name == "multi") {
    return UpdateMode::kMulti;
  }
  throw ConfigError("unknown update mode '" + std::string(name) + "'");
}

void SynthDeviceSpec::validate() const {
  if (!(nonlinearity >= 0.0) || !std::isfinite(nonlinearity)) {
    throw ConfigError("nonlinearity must be finite and >= 0");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise_sigma must be finite and >= 0");
  }
  if (!(d2d_spread >= 0.0) || !std::isfinite(d2d_spread)) {
    throw ConfigError("d2d_spread must be finite and >= 0");
  }
  if (!(asymmetry > 0.0) || !std::isfinite(asymmetry)) {
    throw ConfigError("asymmetry must be finite and > 0");
  }
  if (!(unit_step > 0.0) || !std::isfinite(unit_step)) {
    throw ConfigError("unit_step must be finite and > 0");
  }
}

void DeviceModel::validate() const {
  if (!(unit_step > 0.0) || !std::isfinite(unit_step)) {
    throw ConfigError("unit_step must be finite and > 0");
  }
  switch (mode) {
  case UpdateMode::kNumeric:
    if (!tables_inc.empty() || !tables_dec.empty()) {
      throw ConfigError("numeric mode carries no lookup tables");
    }
    return;
  case UpdateMode::kStandard:
    if (tables_inc.size() != 1 || tables_dec.size() != 1) {
      throw ConfigError("standard mode needs exactly one increasing and one decreasing table");
    }
    break;
  case UpdateMode::kMulti:
    if (tables_inc.size() < 2 || tables_inc.size() != tables_dec.size()) {
      throw ConfigError("multi mode needs >= 2 table pairs with equal counts");
    }
    break;
  }
  for (const auto &t : tables_inc) {
    if (t.direction != Direction::kIncreasing) {
      throw ConfigError("table in the increasing list has decreasing direction");
    }
    t.validate();
  }
  for (const auto &t : tables_dec) {
    if (t.direction != Direction::kDecreasing) {
      throw ConfigError("table in the decreasing list has increasing direction");
    }
    t.validate();
  }
}

double sample_update(const DeviceModel &model, std::size_t cell_id, double &g, double target,
                     RandomStream &rng) {
  if (!(g >= 0.0 && g <= 1.0)) {
    std::ostringstream os;
    os << "conductance " << g << " outside [0,1]";
    throw DomainError(os.str());
  }
  if (target == 0.0) {
    return 0.0;
  }

  if (model.mode == UpdateMode::kNumeric) {
    const double g_new = g + target;
    if (g_new >= 0.0 && g_new <= 1.0) {
      g = g_new;
      return target; // exact identity
    }
    const double g_clamped = clamp01(g_new);
    const double realized = g_clamped - g;
    g = g_clamped;
    return realized;
  }

  if (!(model.unit_step > 0.0)) {
    throw ConfigError("unit_step must be positive");
  }
  const auto &tables = target > 0.0 ? model.tables_inc : model.tables_dec;
  if (tables.empty()) {
    std::ostringstream os;
    os << "no " << (target > 0.0 ? "increasing" : "decreasing") << " table configured";
    throw ConfigError(os.str());
  }
  const LookupTable &table = tables[cell_id % tables.size()];

  long long pulses = std::llround(std::fabs(target) / model.unit_step);
  if (pulses < 1) {
    pulses = 1;
  }
  const double g_start = g;
  for (long long p = 0; p < pulses; ++p) {
    const double u = rng.uniform();
    const double dg = table.interpolate(g, u);
    g = clamp01(g + dg);
  }
  return g - g_start;
}

DeviceModel synthesize_device(const SynthDeviceSpec &spec, std::size_t n_g, std::size_t n_q,
                              std::size_t devices) {
  spec.validate();
  if (n_g < 2) {
    throw ConfigError("n_g must be >= 2");
  }
  if (n_q < 3) {
    throw ConfigError("n_q must be >= 3");
  }
  if (devices < 1) {
    throw ConfigError("devices must be >= 1");
  }

  RandomStream d2d_rng(spec.seed, 0xd2d);

  DeviceModel model;
  model.mode = devices == 1 ? UpdateMode::kStandard : UpdateMode::kMulti;
  model.unit_step = spec.unit_step;

  for (std::size_t d = 0; d < devices; ++d) {
    // Per-device parameters: lognormal jitter keeps them positive. The
    // Standard model (devices == 1) is the nominal device, no jitter.
    double step = spec.unit_step;
    double nonlin = spec.nonlinearity;
    double sigma = spec.noise_sigma;
    double asym = spec.asymmetry;
    if (devices > 1 && spec.d2d_spread > 0.0) {
      step *= std::exp(spec.d2d_spread * d2d_rng.normal());
      nonlin *= std::exp(spec.d2d_spread * d2d_rng.normal());
      sigma *= std::exp(spec.d2d_spread * d2d_rng.normal());
      asym *= std::exp(spec.d2d_spread * d2d_rng.normal());
    }

    for (const Direction dir : {Direction::kIncreasing, Direction::kDecreasing}) {
      LookupTable t;
      t.direction = dir;
      t.g_grid.resize(n_g);
      t.q_grid.resize(n_q);
      t.delta_g = Matrix(n_g, n_q);
      for (std::size_t i = 0; i < n_g; ++i) {
        t.g_grid[i] = static_cast<double>(i) / static_cast<double>(n_g - 1);
      }
      for (std::size_t j = 0; j < n_q; ++j) {
        t.q_grid[j] = static_cast<double>(j) / static_cast<double>(n_q - 1);
      }
      t.q_grid.front() = 0.0;
      t.q_grid.back() = 1.0;
      for (std::size_t i = 0; i < n_g; ++i) {
        const double g = t.g_grid[i];
        const double mean = dir == Direction::kIncreasing
                                ? step * std::pow(1.0 - g, nonlin)
                                : -asym * step * std::pow(g, nonlin);
        for (std::size_t j = 0; j < n_q; ++j) {
          double v = mean;
          if (sigma > 0.0) {
            v += sigma * step *
                 truncated_normal_quantile(t.q_grid[j], -kNoiseTruncation, kNoiseTruncation);
          }
          t.delta_g(i, j) = v;
        }
      }
      t.validate();
      (dir == Direction::kIncreasing ? model.tables_inc : model.tables_dec).push_back(std::move(t));
    }
  }
  model.validate();
  return model;
}

const std::vector<DevicePreset> &device_presets() {
  // Synthetic stand-ins for the eight device configurations of the study.
  // Within a DWMTJ mechanism only the spread changes with temperature, so
  // update noise is ordered 0K < 300K < 400K.
  static const std::vector<DevicePreset> presets = {
      {"dwmtj-sot-0k", "DWMTJ SOT 0K",
       {.nonlinearity = 0.30, .noise_sigma = 0.05, .asymmetry = 1.00, .d2d_spread = 0.10, .seed = 101, .unit_step = 1e-4},
       8, 33, 33},
      {"dwmtj-sot-300k", "DWMTJ SOT 300K",
       {.nonlinearity = 0.30, .noise_sigma = 0.15, .asymmetry = 1.00, .d2d_spread = 0.10, .seed = 102, .unit_step = 1e-4},
       8, 33, 33},
      {"dwmtj-sot-400k", "DWMTJ SOT 400K",
       {.nonlinearity = 0.30, .noise_sigma = 0.25, .asymmetry = 1.00, .d2d_spread = 0.10, .seed = 103, .unit_step = 1e-4},
       8, 33, 33},
      {"dwmtj-stt-0k", "DWMTJ STT 0K",
       {.nonlinearity = 0.40, .noise_sigma = 0.08, .asymmetry = 1.05, .d2d_spread = 0.12, .seed = 104, .unit_step = 1e-4},
       8, 33, 33},
      {"dwmtj-stt-300k", "DWMTJ STT 300K",
       {.nonlinearity = 0.40, .noise_sigma = 0.22, .asymmetry = 1.05, .d2d_spread = 0.12, .seed = 105, .unit_step = 1e-4},
       8, 33, 33},
      {"dwmtj-stt-400k", "DWMTJ STT 400K",
       {.nonlinearity = 0.40, .noise_sigma = 0.38, .asymmetry = 1.05, .d2d_spread = 0.12, .seed = 106, .unit_step = 1e-4},
       8, 33, 33},
      {"taox", "TaOx",
       {.nonlinearity = 0.90, .noise_sigma = 0.45, .asymmetry = 0.75, .d2d_spread = 0.15, .seed = 107, .unit_step = 1.2e-4},
       6, 33, 33},
      {"enode", "ENODe",
       {.nonlinearity = 1.20, .noise_sigma = 0.55, .asymmetry = 0.70, .d2d_spread = 0.20, .seed = 108, .unit_step = 1.5e-4},
       9, 33, 33},
  };
  return presets;
}

const DevicePreset *find_preset(std::string_view name) {
  for (const auto &p : device_presets()) {
    if (p.name == name) {
      return &p;
    }
  }
  return nullptr;
}

DeviceModel preset_device(const DevicePreset &preset, UpdateMode mode) {
  switch (mode) {
  case UpdateMode::kNumeric: {
    DeviceModel m;
    m.mode = UpdateMode::kNumeric;
    m.unit_step = preset.spec.unit_step;
    return m;
  }
  case UpdateMode::kStandard:
    return synthesize_device(preset.spec, preset.n_g, preset.n_q, 1);
  case UpdateMode::kMulti:
    return synthesize_device(preset.spec, preset.n_g, preset.n_q, preset.devices);
  }
  throw ConfigError("unknown update mode");
}

} // namespace xbar
