/* Copyright (C) 2026 The hestat authors.
 * Licensed under the Apache License, Version 2.0; see the LICENSE file.
 */
#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hestat/ckks.hpp"
#include "hestat/errors.hpp"

namespace hestat {

/// Machine-readable result of one CLI run. wall_seconds measures emulation
/// time only and is not comparable to hardware HE runtimes; the assumptions
/// list names every parameter that had to be inferred rather than given.
struct StatReport {
  std::string measure;
  double scale_b = 0.0;
  int degree = 0;
  int iterations = 0;
  std::string sign_mode;
  int max_level = 0;
  bool quantize = true;
  std::optional<double> value;  // scalar measures only
  double mre = 0.0;
  CostMeter cost;
  double wall_seconds = 0.0;
  std::vector<std::string> assumptions;
};

inline nlohmann::json to_json(const StatReport& r) {
  nlohmann::json j;
  j["measure"] = r.measure;
  j["params"] = {{"B", r.scale_b},         {"degree", r.degree},
                 {"iterations", r.iterations}, {"sign_mode", r.sign_mode},
                 {"max_level", r.max_level},   {"quantize", r.quantize}};
  if (r.value)
    j["value"] = *r.value;
  else
    j["value"] = nullptr;
  j["mre"] = r.mre;
  j["cost"] = {{"mul_ct", r.cost.mul_ct},
               {"mul_pt", r.cost.mul_pt},
               {"add", r.cost.add},
               {"rotate", r.cost.rotate},
               {"bootstrap", r.cost.bootstrap}};
  j["wall_seconds"] = r.wall_seconds;
  j["assumptions"] = r.assumptions;
  return j;
}

inline void write_report(const StatReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("write_report: cannot open " + path);
  out << to_json(r).dump(2) << '\n';
}

}  // namespace hestat
