#include "bigjump/lattice/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "bigjump/errors.hpp"
#include "bigjump/simd/kernels.hpp"

namespace bigjump::lattice {

namespace {

// Relative off-grid allowance in strict mode.
constexpr double kStrictSpill = 1e-12;

double pairwise(const double* v, std::size_t n) {
  if (n <= 256) return simd::sum(v, n);
  const std::size_t h = n / 2;
  return pairwise(v, h) + pairwise(v + h, n - h);
}

// sum_{k >= 2} C(n, k) q^k p^(n - k), without cancellation.
double two_or_more(int n, double p, double q) {
  if (n < 2 || q <= 0.0) return 0.0;
  double s = 0.0;
  const double lq = std::log(q), lp = p > 0.0 ? std::log(p) : -kInf;
  for (int k = 2; k <= n; ++k) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    const double lt = lc + k * lq + (n - k == 0 ? 0.0 : (n - k) * lp);
    const double t = std::exp(lt);
    s += t;
    if (k > 2 && t < 1e-18 * s) break;
  }
  return s;
}

std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", v);
  return b;
}

}  // namespace

std::string law_key(const dist::StepDistribution& d, int m, const GridSpec& g, double top) {
  return "sum-in|" + d.describe() + "|m=" + std::to_string(m) + "|delta=" + fmt(g.delta) + "|lo=" + fmt(g.lo) +
         "|hi=" + fmt(g.hi) + "|cap=" + fmt(g.cap) + "|top=" + fmt(top);
}

SumOracle::SumOracle(dist::StepDistribution d, int n, GridSpec grid, double top, const LawCache* cache,
                     ConvOptions opt)
    : d_(std::move(d)), n_(n), grid_(grid), top_(top) {
  if (n < 1) throw ConfigError("oracle: n must be >= 1");
  if (!(grid.delta > 0.0)) throw ConfigError("grid.delta must be > 0");
  if (!(grid.lo < grid.hi)) throw ConfigError("grid.lo must be below grid.hi");
  hi_ = std::min(grid.hi, top);
  if (!(hi_ > grid.lo)) throw ConfigError("oracle: restriction level is at or below grid.lo");
  // Below the cap the last cell may stick out past hi_; it then only holds
  // the mass of (top_grid - delta, hi_] at its right endpoint.
  const bool round_up = hi_ <= grid.cap;
  const double upper = std::min(hi_, grid.cap);
  const double r = (upper - grid.lo) / grid.delta;
  const double cells = round_up ? std::ceil(r - 1e-9) : std::floor(r + 1e-9);
  if (cells < 1.0) throw ConfigError("oracle: grid has no cells below the cap");
  if (cells > double(opt.max_cells)) throw ConfigError("oracle: grid too large for max_cells");
  top_grid_ = grid.lo + cells * grid.delta;

  p_in_ = mass(grid.lo, hi_);
  q_ = mass(-kInf, grid.lo) + (hi_ < top ? mass(hi_, top) : 0.0);
  p2_ = two_or_more(n, p_in_, q_);

  // Purely discrete laws whose atoms all sit on grid positions carry no rounding.
  const auto atoms = d_.atoms();
  aligned_ = !atoms.empty();
  for (const auto& a : atoms) {
    const double r = (a.value - grid.lo) / grid.delta;
    if (std::abs(r - std::round(r)) > 1e-9) aligned_ = false;
  }

  LatticePMF step = discretize(d_, grid.delta, grid.lo, top_grid_, opt.max_cells);
  const double grid_top = std::min(top_grid_, hi_);
  if (top_grid_ > hi_) step.masses.back() = mass(top_grid_ - grid.delta, hi_);
  // (-inf, lo] is handled analytically; (cap, hi] stays as spill.
  step.spill_low = 0.0;
  step.low_ceiling = -kInf;
  step.spill_high = top_grid_ < hi_ ? mass(top_grid_, hi_) : 0.0;
  step.high_floor = step.spill_high > 0.0 ? top_grid_ : kInf;

  if (!aligned_) {
    const double gm = step.grid_mass();
    if (gm > 0.0) {
      const double ex = d_.expect([](double y) { return y; }, grid.lo, grid_top, 1e-12);
      round_mean_ = std::clamp((step.grid_moment(1) - ex) / gm, 0.0, grid.delta);
    }
  }

  if (n == 1) {
    law_ = point_mass(0.0, grid.delta);
    return;
  }
  ConvOptions copt = opt;
  copt.cap_high = std::min(opt.cap_high, grid.cap);
  const std::string key = law_key(d_, n - 1, grid, top);
  if (cache) {
    if (auto hit = cache->load(key)) {
      law_ = std::move(*hit);
      return;
    }
  }
  law_ = nfold(step, n - 1, copt);
  if (cache) cache->store(key, law_);
}

double SumOracle::mass(double a, double b) const {
  if (!(b > a)) return 0.0;
  if (b == kInf) return d_.tail(a);
  if (a == -kInf) return d_.cdf(b);
  return d_.window_mass(a, b - a);
}

double SumOracle::g(double y, double T) const {
  const double b = T == kInf ? kInf : y + T;
  const double lo = grid_.lo;
  // In-part: (lo, hi_] intersected with (y, b].
  double in = mass(std::max(y, lo), std::min(b, hi_));
  double out = 0.0;
  if (y < lo) out += mass(y, std::min(b, lo));
  if (hi_ < top_) out += mass(std::max(y, hi_), std::min(b, top_));
  return in + double(n_) * out;
}

double SumOracle::grid_term(double x, double T, double shift) const {
  std::vector<double> terms(law_.size(), 0.0);
  for (std::size_t k = 0; k < law_.size(); ++k) {
    const double m = law_.masses[k];
    if (m == 0.0) continue;
    terms[k] = m * g(x - law_.position(k) + shift, T);
  }
  return pairwise(terms.data(), terms.size());
}

OracleResult SumOracle::query(double x, double T, SpillMode mode) const {
  if (!(T > 0.0)) throw ConfigError("oracle: T must be > 0");
  if (T != kInf) {
    const double r = T / grid_.delta;
    if (std::abs(r - std::round(r)) > 1e-9 * std::max(1.0, r))
      throw ConfigError("oracle: T must be an integer multiple of grid.delta");
  }
  const int m = n_ - 1;
  const double delta = grid_.delta;
  OracleResult res;

  // Grid part. With exact alignment, a nudge of 1e-9 cells keeps atoms that
  // sit on x on the correct side of the cut.
  double lower, upper, point;
  if (aligned_ || m == 0) {
    const double nudge = aligned_ ? 1e-9 * delta : 0.0;
    point = lower = upper = grid_term(x + nudge, T, 0.0);
  } else {
    const double wide = double(m) * delta;
    point = grid_term(x, T, double(m) * round_mean_);
    if (T == kInf) {
      lower = grid_term(x, T, wide);
      upper = grid_term(x, T, 0.0);
    } else {
      lower = std::max(0.0, grid_term(x, kInf, wide) - grid_term(x + T, kInf, 0.0));
      upper = grid_term(x, kInf, 0.0) - grid_term(x + T, kInf, wide);
    }
    point = std::clamp(point, lower, upper);
  }

  // Off-grid parts of the partial law, then paths with >= 2 out-steps.
  const double gmax = p_in_ + double(n_) * q_;
  double s_lo = 0.0, s_hi = 0.0;
  const double slack = aligned_ ? 0.0 : double(m) * delta;
  if (law_.spill_high > 0.0) {
    const double f = law_.high_floor;
    if (T == kInf) {
      s_lo += law_.spill_high * g(x - f + slack, kInf);
      s_hi += law_.spill_high * gmax;
    } else {
      // A partial sum above f needs a last step at or below x + T - f.
      s_hi += law_.spill_high * std::min(gmax, gmax - g(x + T - f, kInf));
    }
  }
  if (law_.spill_low > 0.0) s_hi += law_.spill_low * g(x - law_.low_ceiling, kInf);
  s_hi += law_.unresolved * gmax;
  s_hi += p2_;

  res.lower = lower + s_lo;
  res.upper = upper + s_hi;
  res.spill_uncertainty = s_hi - s_lo;
  res.point = point + s_lo + 0.5 * (s_hi - s_lo);
  res.exact = aligned_ && res.spill_uncertainty == 0.0;
  if (mode == SpillMode::strict && res.spill_uncertainty > kStrictSpill * res.point) {
    char msg[256];
    std::snprintf(msg, sizeof msg,
                  "oracle: off-grid mass %.3g exceeds %.0e of the probed value %.3g at x=%g "
                  "(widen grid.hi / grid.cap or use bound mode)",
                  res.spill_uncertainty, kStrictSpill, res.point, x);
    throw SpillError(msg);
  }
  return res;
}

}  // namespace bigjump::lattice
