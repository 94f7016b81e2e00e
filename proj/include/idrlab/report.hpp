#pragma once

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

namespace idrlab {

// One predicted-vs-empirical comparison inside an experiment.
struct ReportRow {
  std::string condition;
  double predicted = 0.0;
  double empirical = 0.0;
  double rel_error = 0.0;
  long trials = 0;
  std::uint64_t seed = 0;
};

inline double relative_error(double empirical, double predicted) {
  return std::abs(empirical - predicted) / std::max(std::abs(predicted), 1e-12);
}

struct ExperimentReport {
  std::string name;
  std::vector<ReportRow> rows;
  bool passed = true;
  double tolerance = 0.0;

  void add(const std::string& condition, double predicted, double empirical, long trials,
           std::uint64_t seed) {
    rows.push_back({condition, predicted, empirical, relative_error(empirical, predicted),
                    trials, seed});
  }

  double max_rel_error() const {
    double worst = 0.0;
    for (const auto& r : rows) worst = std::max(worst, r.rel_error);
    return worst;
  }
};

// 17 significant digits: round-trip exact for IEEE doubles.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline nlohmann::ordered_json report_to_json(const ExperimentReport& rep) {
  nlohmann::ordered_json j;
  j["experiment"] = rep.name;
  j["passed"] = rep.passed;
  j["tolerance"] = format_double(rep.tolerance);
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json row;
    row["condition"] = r.condition;
    row["predicted"] = format_double(r.predicted);
    row["empirical"] = format_double(r.empirical);
    row["rel_error"] = format_double(r.rel_error);
    row["trials"] = r.trials;
    row["seed"] = r.seed;
    j["rows"].push_back(row);
  }
  return j;
}

inline std::string report_to_csv(const ExperimentReport& rep) {
  std::string out = "experiment,condition,predicted,empirical,rel_error,trials,seed\n";
  for (const auto& r : rep.rows) {
    out += rep.name + "," + r.condition + "," + format_double(r.predicted) + "," +
           format_double(r.empirical) + "," + format_double(r.rel_error) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.seed) + "\n";
  }
  return out;
}

}  // namespace idrlab
