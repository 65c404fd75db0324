/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#ifndef XBAR_DATA_HPP
#define XBAR_DATA_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "xbar/matrix.hpp"

namespace xbar {

constexpr std::size_t kWdbcFeatures = 30;

enum class Label { kMalignant, kBenign };

/// Fixed one-hot encoding: Malignant -> [1,0], Benign -> [0,1].
std::array<double, 2> one_hot(Label label);

struct Dataset {
  Matrix features; // [N x 30]
  std::vector<Label> labels;
  std::vector<std::string> ids;

  std::size_t size() const { return labels.size(); }
};

/// Canonical comma-separated layout: id, diagnosis letter, 30 numeric
/// features per line. Malformed lines are rejected with their line number.
Dataset load_wdbc(const std::filesystem::path &path);

/// Per-feature affine normalization, fitted on training rows only.
struct NormStats {
  std::vector<double> mean;
  std::vector<double> std;
};

NormStats fit_normalizer(const Dataset &ds, const std::vector<std::size_t> &train_indices);

/// (x - mean) / std per feature; a zero-variance feature maps to constant 0.
Dataset normalize(const Dataset &ds, const NormStats &stats);

struct SplitIndices {
  std::vector<std::size_t> train, val, test;
};

/// Seeded uniform shuffle of 0..n-1 partitioned as floor(0.4 n) train,
/// floor(0.3 n) validation, remainder test.
SplitIndices split_dataset(std::size_t n_records, std::uint64_t seed);

/// Writes class_counts.txt (label, count per line) and correlation.txt
/// (30 x 30 Pearson matrix) into out_dir.
void eda_export(const Dataset &ds, const std::filesystem::path &out_dir);

/// Pearson correlation matrix of the feature columns.
Matrix correlation_matrix(const Dataset &ds);

} // namespace xbar

#endif // XBAR_DATA_HPP
