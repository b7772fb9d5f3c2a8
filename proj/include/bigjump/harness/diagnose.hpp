#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/karamata/karamata.hpp"
#include "bigjump/seqs/sequences.hpp"

namespace bigjump::harness {

// Plot-ready table; written as CSV with a header line.
struct Trace {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};
std::string trace_csv(const Trace& t);

struct DiagnoseOptions {
  double T = dist::kInf;
  std::vector<int> ns = {10, 100, 1000};
  seqs::CheckGrid grid;
  double x_max = 1e5;
};

struct Diagnostics {
  std::string family;
  std::optional<karamata::MatuszewskaResult> matuszewska;
  bool long_tailed = false;
  karamata::SdCertificate sd;
  std::vector<Trace> traces;  // long_tail, truncation, scale_tail
  std::vector<std::string> notes;  // skipped steps and why
  std::string verdict;
};

Diagnostics diagnose(const dist::StepDistribution& d, const DiagnoseOptions& opt = {});
nlohmann::json to_json(const Diagnostics& g);

}  // namespace bigjump::harness
