#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigjump/harness/config.hpp"

namespace bigjump::harness {

struct Row {
  int n = 0;
  double x = 0.0;
  double x_over_boundary = 0.0;
  double p_value = 0.0;
  std::string p_source;  // "oracle" or "mc:<method>"
  double n_window_mass = 0.0;
  double ratio = 0.0;  // p_value / n_window_mass
  std::optional<double> std_error;
  std::optional<double> p_lower, p_upper;  // oracle brackets
  bool operator==(const Row&) const = default;
};

// sup |ratio - 1| over the rows of one (n, source) with x_over_boundary >= 1.
struct SummaryEntry {
  int n = 0;
  std::string p_source;
  std::optional<double> sup_abs_dev;  // absent when no row lies at or beyond x_n
  std::optional<double> x_at;
  int rows = 0;
  bool operator==(const SummaryEntry&) const = default;
};

struct ExperimentReport {
  std::vector<Row> rows;  // sorted by (n, x, p_source)
  std::vector<SummaryEntry> summary;
  std::vector<nlohmann::json> boundaries;  // one BoundarySet per n
  std::map<std::string, std::string> config;
  std::string config_hash;
  bool operator==(const ExperimentReport&) const = default;
};

struct RunOptions {
  unsigned threads = 1;
};

ExperimentReport run_experiment(const ExperimentConfig& c, RunOptions opt = {});

std::vector<SummaryEntry> summarize(const std::vector<Row>& rows);

// Failed check.* assertions, one message each; empty when all hold.
std::vector<std::string> check_report(const ExperimentConfig& c, const ExperimentReport& r);

}  // namespace bigjump::harness
