#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "xbar/device_model.hpp"
#include "xbar/errors.hpp"
#include "xbar/lut_io.hpp"

using namespace xbar;

namespace {

std::filesystem::path temp_file(const char *name) {
  return std::filesystem::temp_directory_path() / name;
}

} // namespace

TEST_CASE("save/load round trip is bit exact") {
  SynthDeviceSpec spec{.nonlinearity = 0.8, .noise_sigma = 0.25, .asymmetry = 0.9,
                       .d2d_spread = 0.2, .seed = 17, .unit_step = 7e-4};
  const DeviceModel m = synthesize_device(spec, 13, 11, 3);
  std::vector<LookupTable> tables;
  for (std::size_t d = 0; d < m.device_count(); ++d) {
    tables.push_back(m.tables_inc[d]);
    tables.push_back(m.tables_dec[d]);
  }

  const auto path = temp_file("xbar_roundtrip.lut");
  save_tables(tables, path);
  const auto loaded = load_tables(path);
  REQUIRE(loaded.size() == tables.size());
  for (std::size_t k = 0; k < tables.size(); ++k) {
    REQUIRE(loaded[k].direction == tables[k].direction);
    REQUIRE(loaded[k].g_grid == tables[k].g_grid);
    REQUIRE(loaded[k].q_grid == tables[k].q_grid);
    for (std::size_t i = 0; i < tables[k].n_g(); ++i) {
      for (std::size_t j = 0; j < tables[k].n_q(); ++j) {
        REQUIRE(loaded[k].delta_g(i, j) == tables[k].delta_g(i, j));
      }
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("hand-written table file loads with its exact values") {
  const auto path = temp_file("xbar_hand.lut");
  {
    std::ofstream out(path);
    out << "LUT v1 increasing 2 3\n";
    out << "0 1\n";
    out << "0 0.5 1\n";
    out << "0.001 0.002 0.003\n";
    out << "0 0.0005 0.001\n";
  }
  const auto tables = load_tables(path);
  REQUIRE(tables.size() == 1);
  CHECK(tables[0].direction == Direction::kIncreasing);
  CHECK(tables[0].delta_g(0, 1) == 0.002);
  CHECK(tables[0].delta_g(1, 2) == 0.001);
  CHECK(tables[0].g_grid == std::vector<double>{0.0, 1.0});
  std::filesystem::remove(path);
}

TEST_CASE("unsorted quantile grid is rejected") {
  const auto path = temp_file("xbar_badq.lut");
  {
    std::ofstream out(path);
    out << "LUT v1 increasing 2 3\n";
    out << "0 1\n";
    out << "0 1 0.5\n";
    out << "0.001 0.002 0.003\n";
    out << "0 0.0005 0.001\n";
  }
  CHECK_THROWS_WITH_AS(load_tables(path), doctest::Contains("unsorted quantile grid"),
                       ConfigError);
  std::filesystem::remove(path);
}

TEST_CASE("malformed files report line numbers") {
  const auto path = temp_file("xbar_badnum.lut");
  {
    std::ofstream out(path);
    out << "LUT v1 increasing 2 3\n";
    out << "0 1\n";
    out << "0 0.5 1\n";
    out << "0.001 oops 0.003\n";
    out << "0 0.0005 0.001\n";
  }
  CHECK_THROWS_WITH_AS(load_tables(path), doctest::Contains("line 4"), ParseError);

  {
    std::ofstream out(path);
    out << "LUT v1 increasing 2 3\n";
    out << "0 1\n";
  }
  CHECK_THROWS_WITH_AS(load_tables(path), doctest::Contains("unexpected end of file"), ParseError);
  std::filesystem::remove(path);
}

TEST_CASE("empty table list makes a valid empty file; overwrite succeeds") {
  const auto path = temp_file("xbar_empty.lut");
  save_tables({}, path);
  CHECK(load_tables(path).empty());

  SynthDeviceSpec spec;
  spec.seed = 3;
  const DeviceModel m = synthesize_device(spec, 5, 5);
  save_tables({m.tables_inc[0], m.tables_dec[0]}, path); // overwrite
  CHECK(load_tables(path).size() == 2);
  std::filesystem::remove(path);
}

TEST_CASE("reloaded tables reproduce the same update statistics under the same seed") {
  SynthDeviceSpec spec{.nonlinearity = 0.6, .noise_sigma = 0.35, .asymmetry = 0.85,
                       .d2d_spread = 0.0, .seed = 23, .unit_step = 1e-3};
  const DeviceModel original = synthesize_device(spec, 17, 21);

  const auto path = temp_file("xbar_stats.lut");
  save_tables({original.tables_inc[0], original.tables_dec[0]}, path);
  const auto loaded_tables = load_tables(path);
  DeviceModel reloaded;
  reloaded.mode = UpdateMode::kStandard;
  reloaded.unit_step = original.unit_step;
  for (const auto &t : loaded_tables) {
    (t.direction == Direction::kIncreasing ? reloaded.tables_inc : reloaded.tables_dec)
        .push_back(t);
  }

  RandomStream rng_a(555), rng_b(555);
  double ga = 0.4, gb = 0.4;
  for (int i = 0; i < 5000; ++i) {
    const double target = (i % 3 == 0) ? -2e-3 : 3e-3;
    const double ra = sample_update(original, 0, ga, target, rng_a);
    const double rb = sample_update(reloaded, 0, gb, target, rng_b);
    REQUIRE(ra == rb);
    REQUIRE(ga == gb);
  }
  std::filesystem::remove(path);
}
