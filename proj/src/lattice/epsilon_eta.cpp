#include <algorithm>
#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/lattice/lattice_pmf.hpp"

namespace bigjump::lattice {

namespace {

// Absolute grid index of a position that is an integer multiple of delta.
long long abs_index(double pos, double delta) {
  const double r = pos / delta;
  const double k = std::round(r);
  if (std::abs(r - k) > 1e-6) throw ConfigError("epsilon_eta: grid origin must be an integer multiple of delta");
  return (long long)k;
}

// Masses indexed by absolute grid index starting at `first`.
struct Dense {
  long long first = 0;
  std::vector<double> m;
};

Dense dense_of(const LatticePMF& p) { return {abs_index(p.origin, p.delta), p.masses}; }

// Sum over indices in (a, a + w] (w < 0 means to infinity) via suffix sums.
struct WindowSums {
  Dense d;
  std::vector<double> suffix;  // suffix[i] = sum_{j >= i} m[j]
  explicit WindowSums(Dense dd) : d(std::move(dd)), suffix(d.m.size() + 1, 0.0) {
    for (std::size_t i = d.m.size(); i-- > 0;) suffix[i] = suffix[i + 1] + d.m[i];
  }
  double above(long long a) const {  // indices > a
    const long long i = a + 1 - d.first;
    if (i <= 0) return suffix[0];
    if (i >= (long long)d.m.size()) return 0.0;
    return suffix[std::size_t(i)];
  }
  double window(long long a, long long w) const {
    if (w < 0) return above(a);
    // Direct sum of the window keeps small windows exact rather than a difference of suffixes.
    double s = 0.0;
    const long long lo = std::max(a + 1 - d.first, 0LL);
    const long long hi = std::min(a + w - d.first, (long long)d.m.size() - 1);
    for (long long i = lo; i <= hi; ++i) s += d.m[std::size_t(i)];
    return s;
  }
};

}  // namespace

std::vector<double> epsilon_eta_series(const LatticePMF& p, double h, double K_level, int k_max, double T,
                                       EpsVariant variant) {
  if (k_max < 2) throw ConfigError("epsilon_eta: k must be >= 2");
  if (!(T > 0.0)) throw ConfigError("epsilon_eta: T must be > 0");
  const LatticePMF full = lump_spills(p);
  long long w = -1;
  if (T != kInf) {
    const double r = T / full.delta;
    w = (long long)std::llround(r);
    if (std::abs(r - double(w)) > 1e-9 * std::max(1.0, r) || w < 1)
      throw ConfigError("epsilon_eta: T must be an integer multiple of delta");
  }
  const double tol = 1e-9 * full.delta;
  ConvOptions direct;
  direct.method = ConvMethod::direct;

  const WindowSums den(dense_of(full));
  // Largest grid index at or below h stands for x = h itself.
  const long long start = (long long)std::floor(h / full.delta + 1e-9);
  const long long last = den.d.first + (long long)den.d.m.size() - 1;
  auto sup_ratio = [&](const LatticePMF& law) {
    const WindowSums num(dense_of(law));
    double best = 0.0;
    bool any = false;
    for (long long x = start; x < last; ++x) {
      const double dm = den.window(x, w);
      if (!(dm > 0.0)) continue;
      any = true;
      best = std::max(best, num.window(x, w) / dm);
    }
    if (!any) throw ConfigError("epsilon_eta: empty admissible x-range");
    return best;
  };

  LatticePMF r = full;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double x = r.position(i);
    const bool keep = variant == EpsVariant::epsilon ? x > h + tol : x < -K_level - tol;
    if (!keep) r.masses[i] = 0.0;
  }
  std::vector<double> out;
  if (r.grid_mass() == 0.0) {
    out.assign(std::size_t(k_max - 1), 0.0);
    return out;
  }
  r = trimmed(r);
  // epsilon: all k steps restricted; eta: the first step is free.
  LatticePMF law = variant == EpsVariant::epsilon ? r : full;
  for (int k = 2; k <= k_max; ++k) {
    law = convolve(law, r, direct);
    out.push_back(sup_ratio(law));
  }
  return out;
}

double epsilon_eta(const LatticePMF& p, double h, double K_level, int k, double T, EpsVariant variant) {
  if (k < 2) throw ConfigError("epsilon_eta: k must be >= 2");
  return epsilon_eta_series(p, h, K_level, k, T, variant).back();
}

}  // namespace bigjump::lattice
