#pragma once

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/lattice/cache.hpp"
#include "bigjump/lattice/lattice_pmf.hpp"

namespace bigjump::lattice {

// Steps in (lo, min(hi, cap)] are put on the grid; cap only bounds the size of
// the convolved laws.
struct GridSpec {
  double delta = 1.0 / 16;
  double lo = 0.0;
  double hi = 1e4;
  double cap = kInf;
};

enum class SpillMode { strict, bound };

struct OracleResult {
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  // Part of upper - lower caused by off-grid mass (as opposed to rounding).
  double spill_uncertainty = 0.0;
  bool exact = false;
};

// P{S_n in (x, x + T], xi_i <= top for all i}.
//
// Steps are split into "in" = (lo, min(hi, top)] and "out" = (-inf, lo] and
// (min(hi, top), top]. The law of the sum of n - 1 in-steps is convolved on
// the grid; the last step, and a single out-step, are integrated
// analytically. Paths with two or more out-steps are bracketed by their
// probability. Grid rounding is bracketed exactly; the point estimate removes
// the mean rounding offset.
class SumOracle {
 public:
  SumOracle(dist::StepDistribution d, int n, GridSpec grid, double top = kInf, const LawCache* cache = nullptr,
            ConvOptions opt = {});

  OracleResult query(double x, double T, SpillMode mode = SpillMode::strict) const;
  OracleResult tail(double x, SpillMode mode = SpillMode::strict) const { return query(x, kInf, mode); }

  int n() const { return n_; }
  const GridSpec& grid() const { return grid_; }
  const LatticePMF& partial_law() const { return law_; }
  bool lattice_exact() const { return aligned_; }
  double p_in() const { return p_in_; }
  double p_out() const { return q_; }
  // Probability of two or more out-steps.
  double multi_out() const { return p2_; }

 private:
  double mass(double a, double b) const;
  // P{xi in (y, y + T], xi in} + n P{xi in (y, y + T], xi out}.
  double g(double y, double T) const;
  double grid_term(double x, double T, double shift) const;

  dist::StepDistribution d_;
  int n_;
  GridSpec grid_;
  double top_;
  double hi_;         // min(hi, top)
  double top_grid_;   // first grid boundary at or above min(hi, top), or last one at or below cap
  bool aligned_ = false;
  double round_mean_ = 0.0;
  double p_in_ = 0.0, q_ = 0.0, p2_ = 0.0;
  LatticePMF law_;
};

// Grid key used by SumOracle for its cached partial laws.
std::string law_key(const dist::StepDistribution& d, int m, const GridSpec& g, double top);

}  // namespace bigjump::lattice
