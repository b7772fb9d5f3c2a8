#pragma once

#include <string>

#include <json.hpp>

#include "bigjump/harness/experiment.hpp"

namespace bigjump::harness {

enum class Format { csv, json };

inline constexpr const char* kCsvHeader = "n,x,x_over_boundary,p_value,p_source,n_window_mass,ratio,std_error";

std::string to_csv(const ExperimentReport& r);
nlohmann::json to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);

// Writes to_csv or to_json(...).dump(2) to path; Error on I/O failure.
void emit(const ExperimentReport& r, Format f, const std::string& path);

// %.17g
std::string fmt_real(double v);
// Reals as JSON numbers; non-finite values as "inf", "-inf", "nan".
nlohmann::json real_json(double v);
double real_from_json(const nlohmann::json& j);

}  // namespace bigjump::harness
