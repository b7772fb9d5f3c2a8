#include "bigjump/harness/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "bigjump/errors.hpp"

namespace bigjump::harness {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::uint64_t parse_count(const std::string& field, const std::string& value) {
  const double v = parse_real(field, value);
  if (!(v >= 1.0) || v != std::floor(v) || v > 9.007199254740992e15)
    throw ConfigError(field + ": expected a positive integer, got '" + value + "'");
  return std::uint64_t(v);
}

bool parse_bool(const std::string& field, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(field + ": expected true or false, got '" + value + "'");
}

}  // namespace

double parse_real(const std::string& field, const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "+inf") return kInf;
  if (v == "-inf") return -kInf;
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || std::isnan(d))
    throw ConfigError(field + ": expected a number, got '" + value + "'");
  return d;
}

std::vector<double> parse_real_list(const std::string& field, const std::string& value) {
  std::vector<double> out;
  for (const auto& p : split(value, ',')) {
    if (!p.empty()) out.push_back(parse_real(field, p));
  }
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

FamilyKeys parse_family_spec(const std::string& spec) {
  FamilyKeys k;
  const auto parts = split(spec, ',');
  if (parts.empty() || parts[0].empty()) throw ConfigError("family: empty spec");
  k["name"] = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw ConfigError("family: expected key=value, got '" + parts[i] + "'");
    k[trim(parts[i].substr(0, eq))] = trim(parts[i].substr(eq + 1));
  }
  return k;
}

dist::StepDistribution build_family(const FamilyKeys& keys) {
  const auto it = keys.find("name");
  if (it == keys.end()) throw ConfigError("family.name: missing");
  const std::string& name = it->second;
  std::string mode = "none";
  std::map<std::string, double> params;
  std::vector<dist::Atom> atoms;
  for (const auto& [k, v] : keys) {
    if (k == "name") continue;
    if (k == "standardize") {
      mode = v;
    } else if (k == "atoms") {
      for (const auto& a : split(v, '/')) {
        const auto c = a.find(':');
        if (c == std::string::npos) throw ConfigError("family.atoms: expected value:prob, got '" + a + "'");
        atoms.push_back({parse_real("family.atoms", a.substr(0, c)), parse_real("family.atoms", a.substr(c + 1))});
      }
    } else {
      params[k] = parse_real("family." + k, v);
    }
  }
  dist::StepDistribution d = [&] {
    try {
      if (name == "lattice") {
        if (!params.empty()) throw ConfigError("lattice takes only atoms");
        if (atoms.empty()) throw ConfigError("lattice needs atoms");
        return dist::make_lattice(atoms);
      }
      if (!atoms.empty()) throw ConfigError("atoms apply to name=lattice only");
      return dist::make_family(name, params);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("family: ") + e.what());
    }
  }();
  if (mode == "none") return d;
  if (mode == "center") return dist::standardize(d, dist::StandardizeMode::center);
  if (mode == "unit_variance") return dist::standardize(d, dist::StandardizeMode::unit_variance);
  throw ConfigError("family.standardize: expected none, center or unit_variance, got '" + mode + "'");
}

const char* source_name(Source s) {
  switch (s) {
    case Source::oracle: return "oracle";
    case Source::mc: return "mc";
    case Source::both: return "both";
  }
  return "?";
}

void set_key(ExperimentConfig& c, const std::string& key, const std::string& value) {
  const std::string& v = value;
  auto real = [&] { return parse_real(key, v); };
  auto& o = c.options;
  if (key.rfind("family.", 0) == 0) {
    c.family[key.substr(7)] = v;
  } else if (key == "provenance") {
    try {
      c.provenance = seqs::parse_provenance(v);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("provenance: ") + e.what());
    }
  } else if (key == "method") {
    if (v == "oracle") c.method = Source::oracle;
    else if (v == "mc") c.method = Source::mc;
    else if (v == "both") c.method = Source::both;
    else throw ConfigError("method: expected oracle, mc or both, got '" + v + "'");
  } else if (key == "T") {
    c.T = real();
    o.T = c.T;
  } else if (key == "grid.n") {
    c.n_grid.clear();
    for (double n : parse_real_list(key, v)) {
      if (!(n >= 1.0) || n != std::floor(n) || n > 1e9) throw ConfigError("grid.n: entries must be positive integers");
      c.n_grid.push_back(int(n));
    }
  } else if (key == "grid.x_multiples") {
    c.x_multiples = parse_real_list(key, v);
  } else if (key == "grid.x_values") {
    c.x_values = parse_real_list(key, v);
  } else if (key == "grid.delta") {
    c.grid.delta = real();
  } else if (key == "grid.lo") {
    if (v == "auto") {
      c.grid_lo_auto = true;
    } else {
      c.grid.lo = real();
      c.grid_lo_auto = false;
    }
  } else if (key == "grid.hi") {
    c.grid.hi = real();
  } else if (key == "grid.cap") {
    c.grid.cap = real();
  } else if (key == "grid.spill") {
    if (v == "strict") c.spill = lattice::SpillMode::strict;
    else if (v == "bound") c.spill = lattice::SpillMode::bound;
    else throw ConfigError("grid.spill: expected strict or bound, got '" + v + "'");
  } else if (key == "grid.cache_dir") {
    c.cache_dir = v;
  } else if (key == "mc.samples") {
    c.mc_samples = parse_count(key, v);
  } else if (key == "mc.seed") {
    char* end = nullptr;
    errno = 0;
    const unsigned long long s = std::strtoull(v.c_str(), &end, 0);
    if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE)
      throw ConfigError("mc.seed: expected an unsigned 64-bit integer, got '" + v + "'");
    c.seed = s;
  } else if (key == "mc.method") {
    if (v == "auto") {
      c.mc_method.reset();
    } else {
      try {
        c.mc_method = mc::parse_method(v);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("mc.method: ") + e.what());
      }
    }
  } else if (key == "options.t") {
    o.t = real();
  } else if (key == "options.eps") {
    o.eps = real();
  } else if (key == "options.gamma") {
    o.gamma = real();
  } else if (key == "options.tol_I") {
    o.tol_I = real();
  } else if (key == "options.multiplier") {
    o.multiplier = real();
  } else if (key == "options.K") {
    o.K = real();
  } else if (key == "options.tn_coeff") {
    o.tn_coeff = real();
  } else if (key == "options.tn_power") {
    o.tn_power = real();
  } else if (key == "options.a") {
    o.a = real();
  } else if (key == "options.kappa") {
    o.kappa = real();
  } else if (key == "options.compute_I") {
    o.compute_I = parse_bool(key, v);
  } else if (key == "check.sup_max") {
    c.checks.sup_max = real();
  } else if (key == "check.ratio_min") {
    c.checks.ratio_min = real();
  } else if (key == "check.ratio_max") {
    c.checks.ratio_max = real();
  } else if (key == "check.mc_z") {
    c.checks.mc_z = real();
  } else if (key == "check.mc_coverage") {
    c.checks.mc_coverage = real();
  } else {
    throw ConfigError(key + ": unknown key");
  }
  c.echo[key] = v;
}

void validate(const ExperimentConfig& c) {
  if (!c.family.count("name")) throw ConfigError("family.name: missing");
  if (!c.echo.count("provenance")) throw ConfigError("provenance: missing");
  if (c.n_grid.empty()) throw ConfigError("grid.n: missing");
  for (std::size_t i = 1; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("grid.n: must be strictly increasing");
  }
  if (c.x_multiples.empty() == c.x_values.empty())
    throw ConfigError("grid.x_multiples / grid.x_values: give exactly one of them");
  for (double m : c.x_multiples) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("grid.x_multiples: entries must be positive and finite");
  }
  for (double x : c.x_values) {
    if (!std::isfinite(x)) throw ConfigError("grid.x_values: entries must be finite");
  }
  if (!(c.T > 0.0)) throw ConfigError("T: must be > 0 or inf");
  if (!(c.grid.delta > 0.0) || !std::isfinite(c.grid.delta)) throw ConfigError("grid.delta: must be > 0");
  if (c.T != kInf) {
    const double r = c.T / c.grid.delta;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r)) throw ConfigError("grid.delta: must divide T");
  }
  if (!c.grid_lo_auto && !(c.grid.lo < c.grid.hi)) throw ConfigError("grid.lo: must be below grid.hi");
  if (!(c.grid.hi > 0.0)) throw ConfigError("grid.hi: must be > 0");
  if (!(c.grid.cap > 0.0)) throw ConfigError("grid.cap: must be > 0");
  if (c.method != Source::oracle) {
    if (c.mc_samples < 100) throw ConfigError("mc.samples: must be >= 100");
    if (c.mc_method == mc::Method::big_jump_cmc && c.T != kInf)
      throw ConfigError("mc.method: big_jump_cmc estimates tails only (T = inf)");
  }
  if (c.mc_method == mc::Method::tilted_restricted)
    throw ConfigError("mc.method: tilted_restricted estimates a restricted probability, not the row quantity");
  if (!(c.checks.mc_coverage > 0.0 && c.checks.mc_coverage <= 1.0))
    throw ConfigError("check.mc_coverage: must lie in (0, 1]");
  build_family(c.family);
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(no) + ": empty key");
    if (c.echo.count(key)) throw ConfigError(key + ": given twice (line " + std::to_string(no) + ")");
    set_key(c, key, value);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

std::string canonical_text(const ExperimentConfig& c) {
  std::string out;
  for (const auto& [k, v] : c.echo) out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string config_hash(const ExperimentConfig& c) {
  char b[17];
  std::snprintf(b, sizeof b, "%016llx", static_cast<unsigned long long>(fnv1a(canonical_text(c))));
  return b;
}

}  // namespace bigjump::harness
