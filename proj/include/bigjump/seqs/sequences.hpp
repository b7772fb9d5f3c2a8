#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/lattice/oracle.hpp"

namespace bigjump::seqs {

using dist::kInf;

enum class Regime {
  finite_variance,     // b_n = sigma sqrt(n)
  stable_finite_mean,  // heavier left tail, index in (1, 2)
  infinite_mean_left,  // heavier left tail, index in (0, 1)
  balanced,            // infinite variance, left tail not heavier; b_n = h_n
};
const char* regime_name(Regime r);
Regime identify_regime(const dist::StepDistribution& d);

// For the balanced regime this is h_n with t_n = n, gamma = 3.
double natural_scale(const dist::StepDistribution& d, int n);
double natural_scale(const dist::StepDistribution& d, int n, Regime r);

// Solution of Q(x) = 1/n beyond the point where Q starts to decrease.
double a_n(const dist::StepDistribution& d, double n);

// sup_{0 <= t <= b} |F(x - t + Delta) / F(x + Delta) - 1|; t = b for T = inf
// (the ratio is monotone in t there), a 64-point t grid otherwise.
double insensitivity_defect(const dist::StepDistribution& d, double x, double b, double T = kInf);
// Smallest x with defect <= tol. UnboundedError when no such x is found.
double insensitivity_boundary(const dist::StepDistribution& d, double b, double tol, double T = kInf);

// Grid for the lattice-based checks. lo is rounded down to a multiple of delta.
struct CheckGrid {
  double delta = 0.05;
  double lo = kInf;  // inf: support_low of d (must then be finite)
  double hi = 1e3;
};

struct TruncationResult {
  double n_eps = 0.0;
  double n_eta = 0.0;
};
TruncationResult truncation_check(const dist::StepDistribution& d, double h, int n, double b, double T,
                                  const CheckGrid& grid, double K = 1.0);

struct SmallStepsResult {
  double defect = 0.0;        // point estimate of the sup
  double defect_upper = 0.0;  // from the oracle's upper brackets
  double x_at = 0.0;          // x attaining the sup
};
SmallStepsResult small_steps_defect(const dist::StepDistribution& d, double h, double J, int n, double T,
                                    const lattice::GridSpec& grid);

// Damped fixed point of J = sqrt(-2 n log(n Fbar(J))).
double heuristic_J(const dist::StepDistribution& d, double n);

// n Gbar(K b) for each K.
std::vector<double> scale_tail_trace(const dist::StepDistribution& d, int n, double b, const std::vector<double>& Ks);

}  // namespace bigjump::seqs
