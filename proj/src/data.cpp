/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbar/data.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "xbar/errors.hpp"
#include "xbar/rng.hpp"

namespace xbar {

std::array<double, 2> one_hot(Label label) {
  return label == Label::kMalignant ? std::array<double, 2>{1.0, 0.0}
                                    : std::array<double, 2>{0.0, 1.0};
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

} // namespace

Dataset load_wdbc(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "'");
  }

  std::vector<std::array<double, kWdbcFeatures>> rows;
  std::vector<Label> labels;
  std::vector<std::string> ids;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    const auto fields = split_csv(line);
    if (fields.size() != kWdbcFeatures + 2) {
      std::ostringstream os;
      os << "line " << line_no << ": expected " << kWdbcFeatures + 2 << " columns, found "
         << fields.size();
      throw ParseError(os.str());
    }
    if (fields[1] != "M" && fields[1] != "B") {
      std::ostringstream os;
      os << "line " << line_no << ": unknown diagnosis '" << fields[1] << "' (expected M or B)";
      throw ParseError(os.str());
    }
    std::array<double, kWdbcFeatures> feat{};
    for (std::size_t k = 0; k < kWdbcFeatures; ++k) {
      const std::string_view f = fields[k + 2];
      const auto [next, ec] = std::from_chars(f.data(), f.data() + f.size(), feat[k]);
      if (ec != std::errc() || next != f.data() + f.size()) {
        std::ostringstream os;
        os << "line " << line_no << ": non-numeric feature in column " << k + 3;
        throw ParseError(os.str());
      }
    }
    ids.emplace_back(fields[0]);
    labels.push_back(fields[1] == "M" ? Label::kMalignant : Label::kBenign);
    rows.push_back(feat);
  }

  Dataset ds;
  ds.features = Matrix(rows.size(), kWdbcFeatures);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t k = 0; k < kWdbcFeatures; ++k) {
      ds.features(i, k) = rows[i][k];
    }
  }
  ds.labels = std::move(labels);
  ds.ids = std::move(ids);
  return ds;
}

NormStats fit_normalizer(const Dataset &ds, const std::vector<std::size_t> &train_indices) {
  if (train_indices.empty()) {
    throw DomainError("normalizer needs a nonempty training index set");
  }
  const std::size_t n = train_indices.size();
  const std::size_t d = ds.features.cols();
  NormStats stats;
  stats.mean.assign(d, 0.0);
  stats.std.assign(d, 0.0);
  for (const std::size_t idx : train_indices) {
    for (std::size_t k = 0; k < d; ++k) {
      stats.mean[k] += ds.features(idx, k);
    }
  }
  for (auto &m : stats.mean) {
    m /= static_cast<double>(n);
  }
  for (const std::size_t idx : train_indices) {
    for (std::size_t k = 0; k < d; ++k) {
      const double e = ds.features(idx, k) - stats.mean[k];
      stats.std[k] += e * e;
    }
  }
  for (auto &s : stats.std) {
    s = std::sqrt(s / static_cast<double>(n));
  }
  return stats;
}

Dataset normalize(const Dataset &ds, const NormStats &stats) {
  if (stats.mean.size() != ds.features.cols()) {
    throw DomainError("normalizer dimension mismatch");
  }
  Dataset out;
  out.features = Matrix(ds.features.rows(), ds.features.cols());
  out.labels = ds.labels;
  out.ids = ds.ids;
  for (std::size_t i = 0; i < ds.features.rows(); ++i) {
    for (std::size_t k = 0; k < ds.features.cols(); ++k) {
      out.features(i, k) =
          stats.std[k] > 0.0 ? (ds.features(i, k) - stats.mean[k]) / stats.std[k] : 0.0;
    }
  }
  return out;
}

SplitIndices split_dataset(std::size_t n_records, std::uint64_t seed) {
  if (n_records < 3) {
    throw DomainError("need at least 3 records to split");
  }
  std::vector<std::size_t> order(n_records);
  std::iota(order.begin(), order.end(), 0);
  RandomStream rng(seed, 0x5911);
  rng.shuffle(order);

  const std::size_t n_train = static_cast<std::size_t>(0.4 * static_cast<double>(n_records));
  const std::size_t n_val = static_cast<std::size_t>(0.3 * static_cast<double>(n_records));
  SplitIndices split;
  split.train.assign(order.begin(), order.begin() + n_train);
  split.val.assign(order.begin() + n_train, order.begin() + n_train + n_val);
  split.test.assign(order.begin() + n_train + n_val, order.end());
  return split;
}

Matrix correlation_matrix(const Dataset &ds) {
  const std::size_t n = ds.size();
  const std::size_t d = ds.features.cols();
  if (n < 2) {
    throw DomainError("correlation needs at least 2 records");
  }
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      mean[k] += ds.features(i, k);
    }
  }
  for (auto &m : mean) {
    m /= static_cast<double>(n);
  }
  Matrix cov(d, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < d; ++a) {
      const double ea = ds.features(i, a) - mean[a];
      for (std::size_t b = a; b < d; ++b) {
        cov(a, b) += ea * (ds.features(i, b) - mean[b]);
      }
    }
  }
  Matrix corr(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    corr(a, a) = 1.0;
    for (std::size_t b = a + 1; b < d; ++b) {
      const double denom = std::sqrt(cov(a, a) * cov(b, b));
      const double r = denom > 0.0 ? cov(a, b) / denom : 0.0;
      corr(a, b) = r;
      corr(b, a) = r;
    }
  }
  return corr;
}

void eda_export(const Dataset &ds, const std::filesystem::path &out_dir) {
  std::filesystem::create_directories(out_dir);

  {
    std::size_t malignant = 0;
    for (const Label l : ds.labels) {
      if (l == Label::kMalignant) {
        ++malignant;
      }
    }
    std::ofstream out(out_dir / "class_counts.txt");
    if (!out) {
      throw IoError("cannot write class_counts.txt");
    }
    out << "Malignant " << malignant << '\n';
    out << "Benign " << ds.size() - malignant << '\n';
  }

  {
    const Matrix corr = correlation_matrix(ds);
    std::ofstream out(out_dir / "correlation.txt");
    if (!out) {
      throw IoError("cannot write correlation.txt");
    }
    char buf[64];
    for (std::size_t a = 0; a < corr.rows(); ++a) {
      for (std::size_t b = 0; b < corr.cols(); ++b) {
        std::snprintf(buf, sizeof(buf), "%.17g", corr(a, b));
        out << (b ? " " : "") << buf;
      }
      out << '\n';
    }
    if (!out.good()) {
      throw IoError("write failure on correlation.txt");
    }
  }
}

} // namespace xbar
