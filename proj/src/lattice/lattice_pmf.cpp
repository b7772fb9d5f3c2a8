#include "bigjump/lattice/lattice_pmf.hpp"

#include <algorithm>
#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/simd/kernels.hpp"

namespace bigjump::lattice {

namespace {

// Pairwise sum; fixed order for any input.
double pairwise(const double* v, std::size_t n) {
  if (n <= 256) return simd::sum(v, n);
  const std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

}  // namespace

double LatticePMF::grid_mass() const { return pairwise(masses.data(), masses.size()); }

double LatticePMF::grid_moment(int k) const {
  std::vector<double> t(masses.size());
  for (std::size_t i = 0; i < masses.size(); ++i) t[i] = masses[i] * std::pow(position(i), k);
  return pairwise(t.data(), t.size());
}

std::size_t LatticePMF::first_above(double x) const {
  if (masses.empty()) return 0;
  // Positions within 1e-9 cells of x count as equal to x.
  const double r = (x - origin) / delta + 1e-9;
  if (r < 0.0) return 0;
  if (r >= double(masses.size())) return masses.size();
  return std::min(std::size_t(std::floor(r)) + 1, masses.size());
}

double LatticePMF::grid_sum(double a, double b) const {
  const std::size_t i = first_above(a);
  const std::size_t j = first_above(b);
  if (j <= i) return 0.0;
  return pairwise(masses.data() + i, j - i);
}

Bracket LatticePMF::tail(double x) const {
  const double g = grid_sum(x, kInf);
  Bracket b{g, g};
  if (spill_high > 0.0) {
    b.upper += spill_high;
    if (high_floor >= x) b.lower += spill_high;
  }
  if (spill_low > 0.0 && low_ceiling > x) b.upper += spill_low;
  b.upper += unresolved;
  return b;
}

Bracket LatticePMF::window(double x, double T) const {
  if (T == kInf) return tail(x);
  const double g = grid_sum(x, x + T);
  Bracket b{g, g};
  if (spill_high > 0.0 && high_floor < x + T) b.upper += spill_high;
  if (spill_low > 0.0 && low_ceiling > x) b.upper += spill_low;
  b.upper += unresolved;
  return b;
}

LatticePMF point_mass(double at, double delta) {
  LatticePMF p;
  p.origin = at;
  p.delta = delta;
  p.masses = {1.0};
  return p;
}

LatticePMF trimmed(const LatticePMF& p) {
  std::size_t a = 0, b = p.size();
  while (a < b && p.masses[a] == 0.0) ++a;
  while (b > a && p.masses[b - 1] == 0.0) --b;
  if (a == b) {
    LatticePMF r = p;
    r.masses.assign(1, 0.0);
    return r;
  }
  LatticePMF r = p;
  r.origin = p.position(a);
  r.masses.assign(p.masses.begin() + std::ptrdiff_t(a), p.masses.begin() + std::ptrdiff_t(b));
  return r;
}

LatticePMF discretize(const dist::StepDistribution& d, double delta, double lo, double hi, std::size_t max_cells) {
  if (!(delta > 0.0)) throw ConfigError("discretize: delta must be > 0");
  if (!(lo < hi)) throw ConfigError("discretize: need lo < hi");
  const double cells = (hi - lo) / delta;
  if (!(cells < double(max_cells))) throw ConfigError("discretize: grid too large");
  const auto K = std::size_t(std::ceil(cells - 1e-9));
  LatticePMF p;
  p.delta = delta;
  p.origin = lo + delta;
  p.masses.resize(K);
  const double top = lo + double(K) * delta;
  // Evaluate each boundary once; use cdf differences on the left half for accuracy.
  double prev_t = d.tail(lo);
  double prev_c = d.cdf(lo);
  for (std::size_t k = 0; k < K; ++k) {
    const double b = lo + double(k + 1) * delta;
    const double t = d.tail(b);
    const double c = d.cdf(b);
    const double m = prev_t <= 0.5 ? prev_t - t : c - prev_c;
    if (m < -1e-14) throw NumericalError("discretize: negative cell mass (broken distribution)");
    p.masses[k] = std::max(m, 0.0);
    prev_t = t;
    prev_c = c;
  }
  p.spill_high = d.tail(top);
  p.high_floor = top;
  p.spill_low = d.cdf(lo);
  p.low_ceiling = lo;
  if (p.spill_high == 0.0) p.high_floor = kInf;
  if (p.spill_low == 0.0) p.low_ceiling = -kInf;
  return p;
}

LatticePMF restrict_to(const LatticePMF& p, double bottom, double top) {
  LatticePMF r = p;
  for (std::size_t k = 0; k < r.size(); ++k) {
    const double x = r.position(k);
    // Grid positions carry rounding of order 1e-9 cells; treat those as on the cut.
    const double tol = 1e-9 * r.delta;
    if (x > top + tol || x < bottom - tol) r.masses[k] = 0.0;
  }
  if (r.spill_high > 0.0) {
    if (r.high_floor >= top) {
      r.spill_high = 0.0;
      r.high_floor = kInf;
    } else {
      r.unresolved += r.spill_high;
      r.spill_high = 0.0;
      r.high_floor = kInf;
    }
  }
  if (r.spill_low > 0.0) {
    if (r.low_ceiling < bottom) {
      r.spill_low = 0.0;
      r.low_ceiling = -kInf;
    } else if (r.low_ceiling > top) {
      r.unresolved += r.spill_low;
      r.spill_low = 0.0;
      r.low_ceiling = -kInf;
    } else if (bottom > -kInf) {
      r.unresolved += r.spill_low;
      r.spill_low = 0.0;
      r.low_ceiling = -kInf;
    }
  }
  return r;
}

LatticePMF lump_spills(const LatticePMF& p) {
  if (p.unresolved > 0.0) throw NumericalError("lump_spills: law has unresolved mass");
  LatticePMF r;
  r.delta = p.delta;
  r.origin = p.origin - p.delta;
  r.masses.assign(p.size() + 2, 0.0);
  r.masses.front() = p.spill_low;
  std::copy(p.masses.begin(), p.masses.end(), r.masses.begin() + 1);
  r.masses.back() = p.spill_high;
  return r;
}

LatticePMF restricted_walk(const LatticePMF& p, double h, int n, bool two_sided, const ConvOptions& opt) {
  if (n < 1) throw ConfigError("restricted_walk: n must be >= 1");
  const LatticePMF r = restrict_to(p, two_sided ? -h : -kInf, h);
  return nfold(r, n, opt);
}

}  // namespace bigjump::lattice
