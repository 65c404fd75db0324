/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "xbar/data.hpp"
#include "xbar/errors.hpp"
#include "xbar/lut_io.hpp"

namespace xbar {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * fraction);
  return buf;
}

} // namespace

double ExperimentConfig::effective_eta() const {
  if (eta > 0.0) {
    return eta;
  }
  return optimizer == OptimizerKind::kSgd ? 0.1 : 0.01;
}

void ExperimentConfig::validate() const {
  if (epochs < 1) {
    throw ConfigError("epochs must be >= 1");
  }
  if (record_stride < 1) {
    throw ConfigError("record_stride must be >= 1");
  }
  if (density_bins < 1) {
    throw ConfigError("density_bins must be >= 1");
  }
  if (!(w_max > 0.0)) {
    throw ConfigError("w_max must be > 0");
  }
  if (eta < 0.0) {
    throw ConfigError("eta must be >= 0 (0 selects the default)");
  }
  if (!(recenter_lo >= 0.0 && recenter_lo < recenter_hi && recenter_hi <= 1.0)) {
    throw ConfigError("recenter band must satisfy 0 <= lo < hi <= 1");
  }
  if (find_preset(device) == nullptr && !std::filesystem::exists(device)) {
    throw ConfigError("device '" + device + "' is neither a shipped preset nor a LUT file");
  }
}

DeviceModel resolve_device(const ExperimentConfig &cfg) {
  if (cfg.mode == UpdateMode::kNumeric) {
    DeviceModel m;
    m.mode = UpdateMode::kNumeric;
    if (const DevicePreset *p = find_preset(cfg.device)) {
      m.unit_step = p->spec.unit_step;
    }
    return m;
  }
  if (const DevicePreset *p = find_preset(cfg.device)) {
    return preset_device(*p, cfg.mode);
  }

  // LUT file: split tables into direction lists, pair by file order.
  const auto tables = load_tables(cfg.device);
  DeviceModel m;
  m.mode = cfg.mode;
  for (const auto &t : tables) {
    (t.direction == Direction::kIncreasing ? m.tables_inc : m.tables_dec).push_back(t);
  }
  if (cfg.mode == UpdateMode::kStandard && m.tables_inc.size() != 1) {
    std::ostringstream os;
    os << "standard mode needs exactly one table pair, file has " << m.tables_inc.size()
       << " increasing tables";
    throw ConfigError(os.str());
  }
  if (cfg.unit_step_override > 0.0) {
    m.unit_step = cfg.unit_step_override;
  } else {
    // Default pulse quantum: the increasing tables' mean step at the
    // unbounded end of the range.
    double acc = 0.0;
    for (const auto &t : m.tables_inc) {
      acc += t.row_expectation(0.0);
    }
    m.unit_step = m.tables_inc.empty() ? 1e-3 : acc / static_cast<double>(m.tables_inc.size());
    if (!(m.unit_step > 0.0)) {
      throw ConfigError("cannot derive unit_step from tables; pass --unit-step");
    }
  }
  m.validate();
  return m;
}

Histogram density_summary(const UpdateErrorLog &log, int bins) {
  const auto &records = log.records();
  if (records.empty()) {
    throw DomainError("density summary of an empty update log");
  }
  if (bins < 1) {
    throw ConfigError("density_bins must be >= 1");
  }
  double lo = records.front().realized - records.front().target;
  double hi = lo;
  for (const auto &r : records) {
    const double e = r.realized - r.target;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }

  Histogram h;
  if (hi == lo) {
    // All errors identical (e.g. Numeric mode): one bin, nominal width 1.
    h.centers = {lo};
    h.density = {1.0};
    h.bin_width = 1.0;
    return h;
  }
  h.bin_width = (hi - lo) / bins;
  h.centers.resize(bins);
  h.density.assign(bins, 0.0);
  for (int b = 0; b < bins; ++b) {
    h.centers[b] = lo + (b + 0.5) * h.bin_width;
  }
  for (const auto &r : records) {
    const double e = r.realized - r.target;
    int b = static_cast<int>((e - lo) / h.bin_width);
    b = std::clamp(b, 0, bins - 1);
    h.density[b] += 1.0;
  }
  const double norm = 1.0 / (static_cast<double>(records.size()) * h.bin_width);
  for (auto &d : h.density) {
    d *= norm;
  }
  return h;
}

namespace {

struct RunContext {
  const ExperimentConfig &cfg;
  std::string device_display;
  std::string provenance;
};

void write_header(std::ofstream &out, const RunContext &ctx) {
  out << "# device: " << ctx.device_display << " (" << ctx.provenance << ")\n";
  out << "# mode: " << update_mode_name(ctx.cfg.mode) << ", optimizer: "
      << (ctx.cfg.optimizer == OptimizerKind::kSgd ? "sgd" : "adam")
      << ", eta: " << fmt17(ctx.cfg.effective_eta()) << ", epochs: " << ctx.cfg.epochs
      << ", seed: " << ctx.cfg.seed << '\n';
}

int argmax_class(const std::vector<double> &p) {
  // Ties resolve toward the first class.
  return p[0] >= p[1] ? 0 : 1;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig &cfg) {
  cfg.validate();

  ExperimentResult result;
  result.device = cfg.device;
  result.mode = cfg.mode;

  const DevicePreset *preset = find_preset(cfg.device);
  result.device_display = preset ? preset->display : cfg.device;
  const std::string provenance =
      preset ? "synthetic preset, parametric tables" : "lookup tables from file";

  const DeviceModel device = resolve_device(cfg);

  const Dataset raw = load_wdbc(cfg.data_path);
  const SplitIndices split = split_dataset(raw.size(), cfg.seed);
  const NormStats stats = fit_normalizer(raw, split.train);
  const Dataset ds = normalize(raw, stats);

  Mlp net({{kWdbcFeatures, 15, Activation::kSigmoid}, {15, 2, Activation::kSoftmax}}, cfg.w_max,
          device, cfg.seed);
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    net.core(l).set_recenter_band(cfg.recenter_lo, cfg.recenter_hi);
  }

  UpdateErrorLog log;
  net.set_recorder(&log);

  OptimizerState opt = cfg.optimizer == OptimizerKind::kSgd
                           ? OptimizerState::sgd(cfg.effective_eta())
                           : OptimizerState::adam(cfg.effective_eta());

  RandomStream shuffle_rng(cfg.seed, 0xe60c);
  std::vector<std::size_t> order = split.train;

  auto example = [&](std::size_t idx, std::vector<double> &x, std::array<double, 2> &y) {
    x.assign(ds.features.data() + idx * kWdbcFeatures,
             ds.features.data() + (idx + 1) * kWdbcFeatures);
    y = one_hot(ds.labels[idx]);
  };

  std::vector<double> x;
  std::array<double, 2> y{};
  long long step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_acc = 0.0;
    for (const std::size_t idx : order) {
      example(idx, x, y);
      // Loss of the prediction made on this sample as training encounters it.
      const auto out = net.predict(x);
      loss_acc += 0.5 * ((y[0] - out[0]) * (y[0] - out[0]) + (y[1] - out[1]) * (y[1] - out[1]));
      log.set_enabled(step % cfg.record_stride == 0);
      net.train_step(opt, x, y, epoch);
      ++step;
    }
    result.train_loss.push_back(loss_acc / static_cast<double>(order.size()));

    double val_acc = 0.0;
    for (const std::size_t idx : split.val) {
      example(idx, x, y);
      const auto out = net.predict(x);
      val_acc += 0.5 * ((y[0] - out[0]) * (y[0] - out[0]) + (y[1] - out[1]) * (y[1] - out[1]));
    }
    result.val_loss.push_back(val_acc / static_cast<double>(split.val.size()));
  }
  log.set_enabled(false);

  std::size_t correct = 0;
  for (const std::size_t idx : split.test) {
    example(idx, x, y);
    const auto p = net.predict(x);
    const int actual = ds.labels[idx] == Label::kMalignant ? 0 : 1;
    if (argmax_class(p) == actual) {
      ++correct;
    }
  }
  result.test_accuracy = static_cast<double>(correct) / static_cast<double>(split.test.size());
  result.update_records = log.size();
  result.density = density_summary(log, cfg.density_bins);

  if (!cfg.model_out.empty()) {
    if (cfg.model_out.has_parent_path()) {
      std::filesystem::create_directories(cfg.model_out.parent_path());
    }
    net.save_checkpoint(cfg.model_out);
  }

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const RunContext ctx{cfg, result.device_display, provenance};

    result.loss_file = cfg.out_dir / "loss.txt";
    {
      std::ofstream out(result.loss_file);
      if (!out) {
        throw IoError("cannot write " + result.loss_file.string());
      }
      write_header(out, ctx);
      out << "# epoch avg_train_loss avg_val_loss\n";
      for (int e = 0; e < cfg.epochs; ++e) {
        out << e << ' ' << fmt17(result.train_loss[e]) << ' ' << fmt17(result.val_loss[e]) << '\n';
      }
    }

    result.updates_file = cfg.out_dir / "updates.txt";
    {
      std::ofstream out(result.updates_file);
      if (!out) {
        throw IoError("cannot write " + result.updates_file.string());
      }
      write_header(out, ctx);
      out << "# record_stride: " << cfg.record_stride << '\n';
      out << "# epoch target realized\n";
      for (const auto &r : log.records()) {
        out << r.epoch << ' ' << fmt17(r.target) << ' ' << fmt17(r.realized) << '\n';
      }
    }

    result.density_file = cfg.out_dir / "density.txt";
    {
      std::ofstream out(result.density_file);
      if (!out) {
        throw IoError("cannot write " + result.density_file.string());
      }
      write_header(out, ctx);
      out << "# bin_center probability_density\n";
      for (std::size_t b = 0; b < result.density.centers.size(); ++b) {
        out << fmt17(result.density.centers[b]) << ' ' << fmt17(result.density.density[b]) << '\n';
      }
    }

    result.summary_file = cfg.out_dir / "summary.txt";
    {
      std::ofstream out(result.summary_file);
      if (!out) {
        throw IoError("cannot write " + result.summary_file.string());
      }
      out << "device: " << cfg.device << '\n';
      out << "device_display: " << result.device_display << '\n';
      out << "device_provenance: " << provenance << '\n';
      out << "mode: " << update_mode_name(cfg.mode) << '\n';
      out << "epochs: " << cfg.epochs << '\n';
      out << "seed: " << cfg.seed << '\n';
      out << "optimizer: " << (cfg.optimizer == OptimizerKind::kSgd ? "sgd" : "adam") << '\n';
      out << "eta: " << fmt17(cfg.effective_eta()) << '\n';
      out << "w_max: " << fmt17(cfg.w_max) << '\n';
      out << "unit_step: " << fmt17(device.unit_step) << '\n';
      out << "data: " << cfg.data_path.string() << '\n';
      out << "split: " << split.train.size() << '/' << split.val.size() << '/' << split.test.size()
          << '\n';
      out << "record_stride: " << cfg.record_stride << '\n';
      out << "update_records: " << result.update_records << '\n';
      out << "final_train_loss: " << fmt17(result.train_loss.back()) << '\n';
      out << "final_val_loss: " << fmt17(result.val_loss.back()) << '\n';
      out << "test_accuracy: " << fmt17(result.test_accuracy) << '\n';
      out << "test_accuracy_percent: " << fmt_percent(result.test_accuracy) << '\n';
    }
  }

  result.ok = true;
  return result;
}

std::vector<ExperimentResult> run_sweep(const std::vector<ExperimentConfig> &cfgs, int jobs) {
  if (cfgs.empty()) {
    throw ConfigError("sweep needs at least one configuration");
  }
  std::vector<ExperimentResult> results(cfgs.size());

  auto run_one = [&](std::size_t i) {
    try {
      results[i] = run_experiment(cfgs[i]);
    } catch (const std::exception &e) {
      results[i] = ExperimentResult{};
      results[i].device = cfgs[i].device;
      const DevicePreset *p = find_preset(cfgs[i].device);
      results[i].device_display = p ? p->display : cfgs[i].device;
      results[i].mode = cfgs[i].mode;
      results[i].ok = false;
      results[i].error = e.what();
    }
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      run_one(i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const int n_threads = std::min<int>(jobs, static_cast<int>(cfgs.size()));
    for (int t = 0; t < n_threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < cfgs.size(); i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (auto &th : pool) {
      th.join();
    }
  }
  return results;
}

std::vector<ExperimentConfig> standard_sweep_configs(const ExperimentConfig &base) {
  std::vector<ExperimentConfig> cfgs;
  for (const auto &preset : device_presets()) {
    for (const UpdateMode mode :
         {UpdateMode::kNumeric, UpdateMode::kStandard, UpdateMode::kMulti}) {
      ExperimentConfig cfg = base;
      cfg.device = preset.name;
      cfg.mode = mode;
      if (!base.out_dir.empty()) {
        cfg.out_dir = base.out_dir / (preset.name + "_" + std::string(update_mode_name(mode)));
      }
      cfgs.push_back(std::move(cfg));
    }
  }
  return cfgs;
}

void write_sweep_table(const std::vector<ExperimentResult> &results, std::ostream &os) {
  // Group rows by device in first-seen order; columns by update mode.
  std::vector<std::string> devices;
  for (const auto &r : results) {
    if (std::find(devices.begin(), devices.end(), r.device_display) == devices.end()) {
      devices.push_back(r.device_display);
    }
  }

  os << "# test accuracy per device configuration (synthetic lookup tables)\n";
  os << std::left << std::setw(18) << "Device" << std::right << std::setw(10) << "Numeric"
     << std::setw(10) << "Standard" << std::setw(10) << "Multi" << '\n';
  for (const auto &dev : devices) {
    os << std::left << std::setw(18) << dev << std::right;
    for (const UpdateMode mode :
         {UpdateMode::kNumeric, UpdateMode::kStandard, UpdateMode::kMulti}) {
      const ExperimentResult *cell = nullptr;
      for (const auto &r : results) {
        if (r.device_display == dev && r.mode == mode) {
          cell = &r;
          break;
        }
      }
      if (cell == nullptr) {
        os << std::setw(10) << "-";
      } else if (!cell->ok) {
        os << std::setw(10) << "ERROR";
      } else {
        os << std::setw(10) << fmt_percent(cell->test_accuracy);
      }
    }
    os << '\n';
  }
  for (const auto &r : results) {
    if (!r.ok) {
      os << "# error [" << r.device_display << " " << update_mode_name(r.mode) << "]: " << r.error
         << '\n';
    }
  }
}

} // namespace xbar
