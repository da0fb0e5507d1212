/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hestat/errors.hpp"

namespace hestat {

/// Per-column ingestion transform: use the value as-is, map category strings
/// to numbers, or multiply by a constant.
struct ColumnTransform {
  enum class Kind { Identity, Categorical, Rescale };
  Kind kind = Kind::Identity;
  std::map<std::string, double> mapping;  // Categorical
  double factor = 1.0;                    // Rescale
};

struct DatasetSpec {
  std::string path;
  std::map<std::string, ColumnTransform> feature_map;
};

struct Table {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  std::size_t dropped_rows = 0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "?" || cell == "NA";
}

}  // namespace detail

/// Load the selected features of a header-carrying CSV file. Rows with a
/// missing value in any selected feature are dropped and counted.
inline Table load_csv(const DatasetSpec& spec,
                      const std::vector<std::string>& features) {
  std::ifstream in(spec.path);
  if (!in) throw io_error("load_csv: cannot open " + spec.path);
  std::string line;
  if (!std::getline(in, line)) throw io_error("load_csv: missing header row");
  const auto header = detail::split_csv_line(line);
  std::vector<std::size_t> indices;
  for (const auto& f : features) {
    const auto it = std::find(header.begin(), header.end(), f);
    if (it == header.end())
      throw missing_column("load_csv: no column named " + f);
    indices.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  Table t;
  t.names = features;
  t.columns.resize(features.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split_csv_line(line);
    bool missing = false;
    for (std::size_t idx : indices)
      if (idx >= cells.size() || detail::is_missing(cells[idx])) {
        missing = true;
        break;
      }
    if (missing) {
      ++t.dropped_rows;
      continue;
    }
    for (std::size_t j = 0; j < indices.size(); ++j) {
      const std::string& cell = cells[indices[j]];
      double value = 0.0;
      const auto tr = spec.feature_map.find(features[j]);
      const ColumnTransform::Kind kind =
          tr == spec.feature_map.end() ? ColumnTransform::Kind::Identity
                                       : tr->second.kind;
      if (kind == ColumnTransform::Kind::Categorical) {
        const auto m = tr->second.mapping.find(cell);
        if (m == tr->second.mapping.end())
          throw unparsable_cell("load_csv: unmapped category '" + cell +
                                "' in row " + std::to_string(row));
        value = m->second;
      } else {
        try {
          std::size_t used = 0;
          value = std::stod(cell, &used);
          if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
          throw unparsable_cell("load_csv: cell '" + cell + "' in row " +
                                std::to_string(row));
        }
        if (kind == ColumnTransform::Kind::Rescale) value *= tr->second.factor;
      }
      t.columns[j].push_back(value);
    }
  }
  return t;
}

/// Default ingestion rules for the evaluation datasets: the binary smoker
/// attribute maps yes/no to 1/0 and insurance charges are rescaled by 1/1000
/// to fit the emulated dynamic range.
inline DatasetSpec default_dataset_spec(std::string path) {
  DatasetSpec spec;
  spec.path = std::move(path);
  ColumnTransform smoker;
  smoker.kind = ColumnTransform::Kind::Categorical;
  smoker.mapping = {{"yes", 1.0}, {"no", 0.0}};
  spec.feature_map["smoker"] = smoker;
  ColumnTransform charges;
  charges.kind = ColumnTransform::Kind::Rescale;
  charges.factor = 1.0 / 1000.0;
  spec.feature_map["charges"] = charges;
  return spec;
}

/// Deterministic uniforms on [lo, hi). The 53-bit construction keeps the
/// stream identical across platforms for a given seed.
inline std::vector<double> synthetic_uniform(std::uint64_t seed, std::size_t n,
                                             double lo, double hi) {
  if (n < 1) throw error("synthetic_uniform: n must be >= 1");
  if (!(lo < hi)) throw error("synthetic_uniform: lo must be < hi");
  std::mt19937_64 rng(seed);
  std::vector<double> out(n);
  for (double& v : out) {
    const double u =
        static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    v = lo + u * (hi - lo);
  }
  return out;
}

/// Evenly spaced grid with both endpoints included.
inline std::vector<double> synthetic_grid(std::size_t n, double lo,
                                          double hi) {
  if (n < 2) throw error("synthetic_grid: n must be >= 2");
  if (!(lo < hi)) throw error("synthetic_grid: lo must be < hi");
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

/// The two-subrange benchmark grid over [lo, hi] split at 1.0: half the
/// points resolve the low decades, half the high ones. 1.0 appears in both
/// subranges. Falls back to a single grid when the split is out of range.
inline std::vector<double> two_subrange_grid(std::size_t n, double lo,
                                             double hi) {
  if (!(lo < 1.0 && 1.0 < hi)) return synthetic_grid(n, lo, hi);
  std::vector<double> out;
  out.reserve(n);
  for (double v : synthetic_grid(n / 2, lo, 1.0)) out.push_back(v);
  for (double v : synthetic_grid(n - n / 2, 1.0, hi)) out.push_back(v);
  return out;
}

/// Mean relative error. Reference zeros are an error: the caller must
/// exclude them or use an absolute metric.
inline double mre(std::span<const double> approx,
                  std::span<const double> exact) {
  if (approx.size() != exact.size())
    throw length_mismatch("mre: length mismatch");
  if (approx.empty()) throw error("mre: empty input");
  double acc = 0.0;
  for (std::size_t i = 0; i < approx.size(); ++i) {
    if (exact[i] == 0.0)
      throw zero_reference("mre: exact value is zero at index " +
                           std::to_string(i));
    acc += std::abs(approx[i] - exact[i]) / std::abs(exact[i]);
  }
  return acc / static_cast<double>(approx.size());
}

inline double relative_error(double approx, double exact) {
  if (exact == 0.0) throw zero_reference("relative_error: zero reference");
  return std::abs(approx - exact) / std::abs(exact);
}

// --------------------------------------------------------------------------
// Synthetic fixtures. Small stand-ins with the schemas of the evaluation
// datasets so the dataset code paths stay testable without the real files.
// --------------------------------------------------------------------------

inline void write_insurance_fixture(const std::string& path,
                                    std::uint64_t seed = 42,
                                    std::size_t rows = 400) {
  std::ofstream out(path);
  if (!out) throw io_error("write_insurance_fixture: cannot open " + path);
  std::mt19937_64 rng(seed);
  auto unif = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  out << "age,sex,bmi,children,smoker,region,charges\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const int age = 18 + static_cast<int>(unif() * 47.0);
    const char* sex = unif() < 0.5 ? "male" : "female";
    const double bmi = 16.0 + unif() * 37.0;
    const int children = static_cast<int>(unif() * 5.0);
    const bool smoker = unif() < 0.2;
    const char* region = unif() < 0.5 ? "southwest" : "northeast";
    double charges = 1200.0 + 220.0 * (age - 18) + 180.0 * (bmi - 16.0) +
                     unif() * 4000.0;
    if (smoker) charges += 18000.0 + unif() * 14000.0;
    out << age << ',' << sex << ',' << bmi << ',' << children << ','
        << (smoker ? "yes" : "no") << ',' << region << ',' << charges << '\n';
  }
}

inline void write_adult_fixture(const std::string& path,
                                std::uint64_t seed = 42,
                                std::size_t rows = 500) {
  std::ofstream out(path);
  if (!out) throw io_error("write_adult_fixture: cannot open " + path);
  std::mt19937_64 rng(seed);
  auto unif = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
  };
  out << "age,workclass,education-num,hours-per-week\n";
  for (std::size_t i = 0; i < rows; ++i) {
    const int age = 17 + static_cast<int>(std::pow(unif(), 1.4) * 73.0);
    const char* workclass = unif() < 0.7 ? "Private" : "Self-emp";
    const int edu = 1 + static_cast<int>(unif() * 16.0);
    const int hpw = 1 + static_cast<int>(std::pow(unif(), 0.8) * 98.0);
    out << age << ',' << workclass << ',' << edu << ',' << hpw << '\n';
  }
}

}  // namespace hestat
