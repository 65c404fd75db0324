/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_EXPERIMENT_HPP
#define XBAR_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "xbar/core.hpp"
#include "xbar/device_model.hpp"
#include "xbar/net.hpp"

namespace xbar {

struct ExperimentConfig {
  std::string device = "dwmtj-sot-0k"; // preset name, or a LUT file path
  UpdateMode mode = UpdateMode::kNumeric;
  int epochs = 80;
  OptimizerKind optimizer = OptimizerKind::kSgd;
  double eta = 0.0; // 0 selects the optimizer default (0.1 SGD, 0.01 Adam)
  std::uint64_t seed = 1;
  std::filesystem::path data_path = "data/wdbc.csv";
  std::filesystem::path out_dir; // empty: keep results in memory only
  int record_stride = 100;       // record every Nth training step's writes
  int density_bins = 100;
  double w_max = 2.0;
  double unit_step_override = 0.0; // for LUT-file devices; 0 derives a default
  double recenter_lo = 0.05;
  double recenter_hi = 0.95;
  std::filesystem::path model_out; // optional final checkpoint

  double effective_eta() const;
  void validate() const; // throws ConfigError
};

struct Histogram {
  std::vector<double> centers;
  std::vector<double> density;
  double bin_width = 0.0;
};

struct ExperimentResult {
  std::string device;
  std::string device_display;
  UpdateMode mode = UpdateMode::kNumeric;
  bool ok = false;
  std::string error;

  std::vector<double> train_loss; // running average over each epoch's steps
  std::vector<double> val_loss;   // full validation pass after each epoch
  double test_accuracy = 0.0;
  std::size_t update_records = 0;
  Histogram density;

  std::filesystem::path loss_file, updates_file, density_file, summary_file;
};

/// Train one configuration end to end and emit loss.txt, updates.txt,
/// density.txt and summary.txt into cfg.out_dir (when set). Deterministic:
/// identical config and seed give byte-identical files.
ExperimentResult run_experiment(const ExperimentConfig &cfg);

/// Run every configuration; a failing run produces an error row without
/// aborting the rest. jobs > 1 runs configurations concurrently (each run
/// owns its network, cores and random streams).
std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig> &cfgs, int jobs = 1);

/// The full 8-device x 3-mode sweep grid over the shipped presets.
std::vector<ExperimentConfig> standard_sweep_configs(const ExperimentConfig &base);

/// Accuracy table, one row per device, one column per update mode.
void write_sweep_table(const std::vector<ExperimentResult> &results, std::ostream &os);

/// Probability density of (realized - target) over fixed-width bins spanning
/// the observed range. A degenerate range (all errors equal) yields a single
/// bin of nominal width 1 holding all mass. Densities integrate to 1.
Histogram density_summary(const UpdateErrorLog &log, int bins);

/// Resolve a config's device model (preset or LUT file + mode).
DeviceModel resolve_device(const ExperimentConfig &cfg);

} // namespace xbar

#endif // XBAR_EXPERIMENT_HPP
