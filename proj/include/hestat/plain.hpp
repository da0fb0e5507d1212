/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "hestat/errors.hpp"

// Plaintext reference implementations of the five measures. Population
// (biased) moments throughout, matching the encrypted pipelines. These are
// the references the CLI reports its MRE against.

namespace hestat::plain {

inline double mean(std::span<const double> x) {
  if (x.empty()) throw empty_column("plain::mean: empty input");
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

inline double variance(std::span<const double> x) {
  const double mu = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - mu) * (v - mu);
  return acc / static_cast<double>(x.size());
}

inline double stddev(std::span<const double> x) {
  return std::sqrt(variance(x));
}

inline std::vector<double> znorm(std::span<const double> x) {
  const double mu = mean(x);
  const double sd = stddev(x);
  if (sd == 0.0) throw degenerate_variance("plain::znorm: zero variance");
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mu) / sd;
  return out;
}

/// Third standardized moment E[(X-mu)^3] / sigma^3.
inline double skewness(std::span<const double> x) {
  const double mu = mean(x);
  double m2 = 0.0, m3 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    m2 += d * d;
    m3 += d * d * d;
  }
  m2 /= static_cast<double>(x.size());
  m3 /= static_cast<double>(x.size());
  return m3 / std::pow(m2, 1.5);
}

/// Fourth standardized moment ratio E[(X-mu)^4] / Var^2, not excess.
inline double kurtosis_ratio(std::span<const double> x) {
  const double mu = mean(x);
  double m2 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - mu;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  m2 /= static_cast<double>(x.size());
  m4 /= static_cast<double>(x.size());
  return m4 / (m2 * m2);
}

inline double coeff_variation(std::span<const double> x) {
  const double mu = mean(x);
  if (mu == 0.0) throw near_zero_mean("plain::coeff_variation: zero mean");
  return stddev(x) * (mu > 0 ? 1.0 : -1.0) / std::abs(mu);
}

inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size())
    throw length_mismatch("plain::pearson: length mismatch");
  const double mx = mean(x), my = mean(y);
  double cov = 0.0, vx = 0.0, vy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  if (vx == 0.0 || vy == 0.0)
    throw degenerate_variance("plain::pearson: constant column");
  return cov / std::sqrt(vx * vy);
}

}  // namespace hestat::plain
