#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/lattice/oracle.hpp"
#include "bigjump/mc/estimators.hpp"
#include "bigjump/seqs/boundary.hpp"

namespace bigjump::harness {

using dist::kInf;

// Family keys without the "family." prefix: name, standardize
// (none | center | unit_variance), atoms ("v:p/v:p/..." for name=lattice)
// and the numeric parameters of the family.
using FamilyKeys = std::map<std::string, std::string>;

dist::StepDistribution build_family(const FamilyKeys& keys);
// "pareto,alpha=2.5,standardize=unit_variance"
FamilyKeys parse_family_spec(const std::string& spec);

double parse_real(const std::string& field, const std::string& value);  // accepts inf
std::vector<double> parse_real_list(const std::string& field, const std::string& value);

enum class Source { oracle, mc, both };
const char* source_name(Source s);

struct Checks {
  std::optional<double> sup_max;    // per-(n, source) summary sup
  std::optional<double> ratio_min;  // every row with x_over_boundary >= 1
  std::optional<double> ratio_max;
  double mc_z = 3.29;               // method=both agreement
  double mc_coverage = 0.99;
};

struct ExperimentConfig {
  FamilyKeys family;
  seqs::Provenance provenance = seqs::Provenance::prop_8_1;
  std::vector<int> n_grid;
  std::vector<double> x_multiples;  // x = m x_n
  std::vector<double> x_values;     // absolute x
  double T = kInf;
  Source method = Source::oracle;
  lattice::GridSpec grid;
  bool grid_lo_auto = true;  // floor(support_low / delta) delta
  lattice::SpillMode spill = lattice::SpillMode::strict;
  std::string cache_dir;
  std::uint64_t mc_samples = 100000;
  std::uint64_t seed = 1;
  std::optional<mc::Method> mc_method;  // default: big_jump_cmc for T = inf, plain otherwise
  seqs::BoundaryOptions options;
  Checks checks;
  // Every key as written (after overrides); echoed into reports.
  std::map<std::string, std::string> echo;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Applies key=value on top of an existing config (used for --seed).
void set_key(ExperimentConfig& c, const std::string& key, const std::string& value);
void validate(const ExperimentConfig& c);

// "key=value\n" lines in key order.
std::string canonical_text(const ExperimentConfig& c);
std::uint64_t fnv1a(const std::string& s);
std::string config_hash(const ExperimentConfig& c);  // 16 hex digits

}  // namespace bigjump::harness
