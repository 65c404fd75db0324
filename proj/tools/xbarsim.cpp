/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "xbar/data.hpp"
#include "xbar/device_model.hpp"
#include "xbar/errors.hpp"
#include "xbar/experiment.hpp"
#include "xbar/lut_io.hpp"

namespace {

int cmd_train(const xbar::ExperimentConfig &cfg) {
  const xbar::ExperimentResult result = xbar::run_experiment(cfg);
  std::cout << result.device_display << " [" << xbar::update_mode_name(cfg.mode)
            << "]: test accuracy " << 100.0 * result.test_accuracy << "%, final train loss "
            << result.train_loss.back() << ", outputs in " << cfg.out_dir.string() << "\n";
  return 0;
}

xbar::SynthDeviceSpec spec_from_json(const nlohmann::json &j) {
  xbar::SynthDeviceSpec spec;
  spec.nonlinearity = j.value("nonlinearity", spec.nonlinearity);
  spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
  spec.asymmetry = j.value("asymmetry", spec.asymmetry);
  spec.d2d_spread = j.value("d2d_spread", spec.d2d_spread);
  spec.seed = j.value("seed", spec.seed);
  spec.unit_step = j.value("unit_step", spec.unit_step);
  return spec;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"xbarsim - analog resistive-crossbar neural core training simulator"};
  app.require_subcommand(1);

  // ---- train ----
  auto *train = app.add_subcommand("train", "train one device/mode configuration");
  xbar::ExperimentConfig cfg;
  std::string mode_name = "numeric";
  std::string opt_name = "sgd";
  std::string data_path = "data/wdbc.csv";
  std::string out_dir = "out/run";
  std::string model_out;
  std::vector<double> band;
  train->add_option("--device", cfg.device, "device preset name or LUT file path");
  train->add_option("--mode", mode_name, "numeric|standard|multi")->capture_default_str();
  train->add_option("--epochs", cfg.epochs, "training epochs")->capture_default_str();
  train->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
  train->add_option("--optimizer", opt_name, "sgd|adam")->capture_default_str();
  train->add_option("--eta", cfg.eta, "learning rate (0 = optimizer default)");
  train->add_option("--data", data_path, "WDBC csv file")->capture_default_str();
  train->add_option("--out", out_dir, "output directory")->capture_default_str();
  train->add_option("--record-stride", cfg.record_stride,
                    "record the write errors of every Nth training step")
      ->capture_default_str();
  train->add_option("--density-bins", cfg.density_bins, "histogram bins for density.txt")
      ->capture_default_str();
  train->add_option("--unit-step", cfg.unit_step_override,
                    "pulse quantum for LUT-file devices (default: derived from the tables)");
  train->add_option("--recenter-band", band, "saturation band lo hi (default 0.05 0.95)")
      ->expected(2);
  train->add_option("--save-model", model_out, "also write a model checkpoint to this path");

  // ---- sweep ----
  auto *sweep = app.add_subcommand("sweep", "run the full 8-device x 3-mode study");
  bool sweep_all = false;
  int jobs = 1;
  std::string sweep_out = "out/sweep";
  std::string sweep_data = "data/wdbc.csv";
  int sweep_epochs = 80;
  std::uint64_t sweep_seed = 1;
  sweep->add_flag("--all", sweep_all, "run all 24 sweep cells");
  sweep->add_option("--out", sweep_out, "output directory")->capture_default_str();
  sweep->add_option("--data", sweep_data, "WDBC csv file")->capture_default_str();
  sweep->add_option("--epochs", sweep_epochs, "training epochs")->capture_default_str();
  sweep->add_option("--seed", sweep_seed, "random seed used for every cell")
      ->capture_default_str();
  sweep->add_option("--jobs", jobs, "concurrent runs")->capture_default_str();

  // ---- eda ----
  auto *eda = app.add_subcommand("eda", "export class counts and feature correlations");
  std::string eda_data = "data/wdbc.csv";
  std::string eda_out = "out/eda";
  eda->add_option("--data", eda_data, "WDBC csv file")->capture_default_str();
  eda->add_option("--out", eda_out, "output directory")->capture_default_str();

  // ---- synth-lut ----
  auto *synth = app.add_subcommand("synth-lut", "generate lookup tables from a parametric spec");
  std::string spec_path;
  std::string lut_out;
  synth->add_option("--spec", spec_path, "JSON spec file")->required();
  synth->add_option("--out", lut_out, "output LUT file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      cfg.mode = xbar::parse_update_mode(mode_name);
      cfg.optimizer = opt_name == "adam" ? xbar::OptimizerKind::kAdam
                      : opt_name == "sgd"
                          ? xbar::OptimizerKind::kSgd
                          : throw xbar::ConfigError("unknown optimizer '" + opt_name + "'");
      cfg.data_path = data_path;
      cfg.out_dir = out_dir;
      cfg.model_out = model_out;
      if (!band.empty()) {
        cfg.recenter_lo = band[0];
        cfg.recenter_hi = band[1];
      }
      return cmd_train(cfg);
    }

    if (*sweep) {
      if (!sweep_all) {
        throw xbar::ConfigError("sweep requires --all (per-cell runs use 'train')");
      }
      xbar::ExperimentConfig base;
      base.epochs = sweep_epochs;
      base.seed = sweep_seed;
      base.data_path = sweep_data;
      base.out_dir = sweep_out;
      const auto cfgs = xbar::standard_sweep_configs(base);
      const auto results = xbar::run_sweep(cfgs, jobs);

      std::filesystem::create_directories(sweep_out);
      const auto table_path = std::filesystem::path(sweep_out) / "sweep_table.txt";
      std::ofstream table(table_path);
      if (!table) {
        throw xbar::IoError("cannot write " + table_path.string());
      }
      xbar::write_sweep_table(results, table);
      xbar::write_sweep_table(results, std::cout);

      int failures = 0;
      for (const auto &r : results) {
        if (!r.ok) {
          ++failures;
        }
      }
      std::cout << "table written to " << table_path.string() << "\n";
      return failures == 0 ? 0 : 1;
    }

    if (*eda) {
      const xbar::Dataset ds = xbar::load_wdbc(eda_data);
      xbar::eda_export(ds, eda_out);
      std::cout << "wrote class_counts.txt and correlation.txt to " << eda_out << "\n";
      return 0;
    }

    if (*synth) {
      std::ifstream in(spec_path);
      if (!in) {
        throw xbar::IoError("cannot open '" + spec_path + "'");
      }
      const nlohmann::json j = nlohmann::json::parse(in);
      const xbar::SynthDeviceSpec spec = spec_from_json(j);
      const std::size_t n_g = j.value("n_g", 33);
      const std::size_t n_q = j.value("n_q", 33);
      const std::size_t devices = j.value("devices", 1);
      const xbar::DeviceModel model = xbar::synthesize_device(spec, n_g, n_q, devices);

      std::vector<xbar::LookupTable> tables;
      for (std::size_t d = 0; d < model.device_count(); ++d) {
        tables.push_back(model.tables_inc[d]);
        tables.push_back(model.tables_dec[d]);
      }
      xbar::save_tables(tables, lut_out);
      std::cout << "wrote " << tables.size() << " tables to " << lut_out << "\n";
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
