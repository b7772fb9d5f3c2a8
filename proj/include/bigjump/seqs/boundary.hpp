#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/seqs/sequences.hpp"

namespace bigjump::seqs {

enum class Provenance {
  prop_8_1,
  prop_8_2,
  prop_8_3,
  prop_8_4,
  prop_9_1,
  prop_9_2,
  prop_9_3,
  heuristic_24,
  corollary_2_1,
};
const char* provenance_name(Provenance p);
Provenance parse_provenance(const std::string& s);

struct BoundaryOptions {
  std::optional<double> t;  // default 1 (prop_8_1, prop_8_2) or 2 (prop_9_2)
  double eps = 0.5;
  double gamma = 3.0;
  double tol_I = 0.05;
  double multiplier = 3.0;
  double T = kInf;
  double K = 1.0;
  double tn_coeff = 1.0;  // prop_9_1: t_n = tn_coeff * n^tn_power
  double tn_power = 1.0;
  double a = 1.0;  // corollary_2_1: x_n = a n
  double kappa = 2.0;
  bool compute_I = true;
};

struct BoundarySet {
  int n = 0;
  Provenance provenance = Provenance::prop_8_1;
  std::string family;
  double b_n = 0.0;
  std::optional<double> a_n;
  double h_n = 0.0;
  std::optional<double> I_n;
  double J_n = 0.0;
  double x_n = 0.0;  // I_n + J_n, or J_n when I_n is absent
  std::optional<double> x_formula;  // boundary given directly by the provenance formula
  double t = 0.0;   // t actually used (0 where not applicable)
  // Declared Matuszewska indices of F(x + Delta) (prop_8_1 only).
  std::optional<double> alpha_F, beta_F;
  std::string flags;
  BoundaryOptions options;
};

BoundarySet boundary(const dist::StepDistribution& d, Provenance p, int n, const BoundaryOptions& opt = {});

nlohmann::json to_json(const BoundarySet& b);
nlohmann::json to_json(const BoundaryOptions& o);

}  // namespace bigjump::seqs
