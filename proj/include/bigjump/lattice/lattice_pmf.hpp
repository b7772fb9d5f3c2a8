#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "bigjump/dist/step_distribution.hpp"

namespace bigjump::lattice {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bracket {
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
  bool contains(double v) const { return v >= lower && v <= upper; }
};

// Sub-probability masses at positions origin + k * delta, plus off-grid mass
// with known bounds on its location:
//   spill_high  sits strictly above high_floor,
//   spill_low   sits at or below low_ceiling,
//   unresolved  could be anywhere.
struct LatticePMF {
  double origin = 0.0;
  double delta = 1.0;
  std::vector<double> masses;
  double spill_low = 0.0;
  double low_ceiling = -kInf;
  double spill_high = 0.0;
  double high_floor = kInf;
  double unresolved = 0.0;

  std::size_t size() const { return masses.size(); }
  double position(std::size_t k) const { return origin + double(k) * delta; }
  double grid_mass() const;
  double spill_mass() const { return spill_low + spill_high + unresolved; }
  double total_mass() const { return grid_mass() + spill_mass(); }
  // Moments of the grid part only (not normalised).
  double grid_moment(int k) const;
  // Index of the first position strictly above x (size() if none).
  std::size_t first_above(double x) const;
  // Sum of grid masses at positions in (a, b].
  double grid_sum(double a, double b) const;
  // P{Y > x} and P{x < Y <= x + T} for Y with this law, bracketed over the
  // unknown spill locations.
  Bracket tail(double x) const;
  Bracket window(double x, double T) const;
};

LatticePMF point_mass(double at, double delta);
// Drops leading and trailing zero cells (keeps at least one cell).
LatticePMF trimmed(const LatticePMF& p);

// Cell k of the grid is (lo + k delta, lo + (k + 1) delta]; its mass
// window_mass(lo + k delta, delta) is placed at the right endpoint, so
// P{S_1 > x} is exact at grid points. spill_high = tail(hi) (floor hi),
// spill_low = P{xi <= lo} (ceiling lo).
LatticePMF discretize(const dist::StepDistribution& d, double delta, double lo, double hi,
                      std::size_t max_cells = std::size_t(1) << 27);

enum class ConvMethod { automatic, direct, fft };

struct ConvOptions {
  ConvMethod method = ConvMethod::automatic;
  std::size_t max_cells = std::size_t(1) << 27;
  // Grid positions above cap_high (below cap_low) move to the high (low) spill.
  double cap_high = kInf;
  double cap_low = -kInf;
};

LatticePMF convolve(const LatticePMF& p, const LatticePMF& q, const ConvOptions& opt = {});
LatticePMF nfold(const LatticePMF& p, int n, const ConvOptions& opt = {});

// Removes all mass at positions > top (and < bottom). Spill whose location
// cannot be decided against the cut becomes unresolved.
LatticePMF restrict_to(const LatticePMF& p, double bottom, double top);
LatticePMF restricted_walk(const LatticePMF& p, double h, int n, bool two_sided = false, const ConvOptions& opt = {});

// Proper law on the grid: spill_low becomes an atom one cell below the grid,
// spill_high an atom one cell above it.
LatticePMF lump_spills(const LatticePMF& p);

enum class EpsVariant { epsilon, eta };

// Sup over grid points x >= h with positive lumped window mass of
//   epsilon: P{S_k in x + Delta, all xi_i > h} / F(x + Delta)
//   eta:     P{S_k in x + Delta, xi_2..xi_k < -K_level} / F(x + Delta)
// on the lumped law of p. Restricted convolutions are direct sums.
double epsilon_eta(const LatticePMF& p, double h, double K_level, int k, double T, EpsVariant variant);
// Values for k = 2..k_max, sharing the convolutions.
std::vector<double> epsilon_eta_series(const LatticePMF& p, double h, double K_level, int k_max, double T,
                                       EpsVariant variant);

}  // namespace bigjump::lattice
