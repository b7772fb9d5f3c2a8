#include "bigjump/harness/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bigjump/errors.hpp"

namespace bigjump::harness {

std::string fmt_real(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

nlohmann::json real_json(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double real_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  if (s == "nan") return std::nan("");
  throw ConfigError("report: bad real '" + s + "'");
}

namespace {

nlohmann::json opt_json(const std::optional<double>& v) { return v ? real_json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return real_from_json(j.at(key));
}

}  // namespace

std::string to_csv(const ExperimentReport& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.n) + "," + fmt_real(row.x) + "," + fmt_real(row.x_over_boundary) + "," +
           fmt_real(row.p_value) + "," + row.p_source + "," + fmt_real(row.n_window_mass) + "," +
           fmt_real(row.ratio) + "," + (row.std_error ? fmt_real(*row.std_error) : "") + "\n";
  }
  return out;
}

nlohmann::json to_json(const ExperimentReport& r) {
  nlohmann::json j;
  j["config"] = r.config;
  j["config_hash"] = r.config_hash;
  j["boundaries"] = r.boundaries;
  auto& rows = j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"n", row.n},
                    {"x", real_json(row.x)},
                    {"x_over_boundary", real_json(row.x_over_boundary)},
                    {"p_value", real_json(row.p_value)},
                    {"p_source", row.p_source},
                    {"n_window_mass", real_json(row.n_window_mass)},
                    {"ratio", real_json(row.ratio)},
                    {"std_error", opt_json(row.std_error)},
                    {"p_lower", opt_json(row.p_lower)},
                    {"p_upper", opt_json(row.p_upper)}});
  }
  auto& sum = j["summary"] = nlohmann::json::array();
  for (const auto& s : r.summary) {
    sum.push_back({{"n", s.n},
                   {"p_source", s.p_source},
                   {"sup_abs_dev", opt_json(s.sup_abs_dev)},
                   {"x_at", opt_json(s.x_at)},
                   {"rows", s.rows}});
  }
  return j;
}

ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.config = j.at("config").get<std::map<std::string, std::string>>();
  r.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& b : j.at("boundaries")) r.boundaries.push_back(b);
  for (const auto& e : j.at("rows")) {
    Row row;
    row.n = e.at("n").get<int>();
    row.x = real_from_json(e.at("x"));
    row.x_over_boundary = real_from_json(e.at("x_over_boundary"));
    row.p_value = real_from_json(e.at("p_value"));
    row.p_source = e.at("p_source").get<std::string>();
    row.n_window_mass = real_from_json(e.at("n_window_mass"));
    row.ratio = real_from_json(e.at("ratio"));
    row.std_error = opt_from(e, "std_error");
    row.p_lower = opt_from(e, "p_lower");
    row.p_upper = opt_from(e, "p_upper");
    r.rows.push_back(std::move(row));
  }
  for (const auto& e : j.at("summary")) {
    SummaryEntry s;
    s.n = e.at("n").get<int>();
    s.p_source = e.at("p_source").get<std::string>();
    s.sup_abs_dev = opt_from(e, "sup_abs_dev");
    s.x_at = opt_from(e, "x_at");
    s.rows = e.at("rows").get<int>();
    r.summary.push_back(std::move(s));
  }
  return r;
}

void emit(const ExperimentReport& r, Format f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  if (f == Format::csv) {
    out << to_csv(r);
  } else {
    out << to_json(r).dump(2) << "\n";
  }
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace bigjump::harness
