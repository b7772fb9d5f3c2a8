#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "bigjump/dist/step_distribution.hpp"

namespace bigjump::karamata {

// Positive function on [domain_low, inf). log_f, when set, is used instead of
// log(f(x)) so that fast-decaying functions do not underflow.
struct TailFunction {
  std::function<double(double)> f;
  std::function<double(double)> log_f;
  double domain_low = 0.0;
  bool compact_support = false;
  std::vector<double> breaks;  // points where f may jump
  std::string name;

  double log_at(double x) const;
};

TailFunction closed_form(std::function<double(double)> f, std::string name = "f", double domain_low = 0.0);
// x -> window_mass(x, T); exact logs for hazard families.
TailFunction from_distribution(const dist::StepDistribution& d, double T = dist::kInf);

std::vector<double> geometric_grid(double a, double b, int points_per_decade = 20);

struct MatuszewskaResult {
  double upper = 0.0;
  double lower = 0.0;
  bool upper_sentinel = false;  // estimate below the floor, reported as -inf
  bool lower_sentinel = false;
  double decade_low = 0.0;  // x-range used
  double decade_high = 0.0;
};

// Largest x-decade of x_grid, every y of y_grid:
//   upper = max log(f(xy)/f(x)) / log y,  lower = min of the same.
MatuszewskaResult matuszewska(const TailFunction& f, const std::vector<double>& x_grid,
                              const std::vector<double>& y_grid, double floor = -50.0);

// |F(x - y + Delta) / F(x + Delta) - 1|.
double long_tail_defect(const dist::StepDistribution& d, double x, double y, double T = dist::kInf);

struct IrvRow {
  double y = 1.0;
  double sup_ratio = 1.0;
  double inf_ratio = 1.0;
};
// Max and min of f(xy)/f(x) over x in [x_max / 10, x_max].
IrvRow irv_defect(const TailFunction& f, double y, double x_max, int points = 200);
std::vector<IrvRow> irv_trace(const TailFunction& f, const std::vector<double>& ys, double x_max);

enum class SdFlag { ok, divergent, compact_support };
const char* sd_flag_name(SdFlag f);

struct SdRatio {
  double ratio = 0.0;     // int_0^{x/2} H(y) H(x - y) dy / H(x)
  double integral = 0.0;  // int_0^inf H
  double error = 0.0;     // quadrature error estimate of ratio
  SdFlag flag = SdFlag::ok;
};
// The integral is split at split(x) (default sqrt(x)).
SdRatio sd_ratio(const TailFunction& H, double x, std::function<double(double)> split = {});

enum class SdVerdict { pass_B1, pass_B2, fail, not_applicable };
const char* sd_verdict_name(SdVerdict v);

struct SdCertificate {
  SdVerdict verdict = SdVerdict::not_applicable;
  std::string text;
};

SdCertificate sd_sufficient(const dist::StepDistribution& d);
SdCertificate sd_sufficient(const dist::HazardForm& h);

}  // namespace bigjump::karamata
