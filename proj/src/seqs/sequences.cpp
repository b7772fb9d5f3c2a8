#include "bigjump/seqs/sequences.hpp"

#include <algorithm>
#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/lattice/lattice_pmf.hpp"
#include "bigjump/numeric/roots.hpp"

namespace bigjump::seqs {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::finite_variance: return "finite_variance";
    case Regime::stable_finite_mean: return "stable_finite_mean";
    case Regime::infinite_mean_left: return "infinite_mean_left";
    case Regime::balanced: return "balanced";
  }
  return "?";
}

Regime identify_regime(const dist::StepDistribution& d) {
  if (d.has_variance()) return Regime::finite_variance;
  const double al = d.left_index(), br = d.right_index();
  if (al < br) {
    if (al > 1.0 && al < 2.0) return Regime::stable_finite_mean;
    if (al > 0.0 && al < 1.0) return Regime::infinite_mean_left;
    throw ConfigError("natural_scale: regime not identifiable for " + d.describe() +
                      " (left index must lie in (0, 1) or (1, 2))");
  }
  if (br < kInf) return Regime::balanced;
  throw ConfigError("natural_scale: regime not identifiable for " + d.describe());
}

namespace {

// Root of Gamma(3 - alpha) n mu2(b) = (alpha - 1) b^2 where the left side
// stops dominating.
double stable_scale(const dist::StepDistribution& d, int n) {
  const double alpha = d.left_index();
  const double g = std::tgamma(3.0 - alpha);
  auto f = [&](double b) { return g * double(n) * d.truncated_moments(b).mu2 - (alpha - 1.0) * b * b; };
  double prev = 1e-6;
  bool positive = f(prev) > 0.0;
  for (double b = prev * 1.25; b < 1e300; b *= 1.25) {
    const double v = f(b);
    if (v > 0.0) {
      positive = true;
    } else if (positive) {
      return numeric::bisect(f, prev, b, 1e-13);
    }
    prev = b;
  }
  throw NumericalError("natural_scale: no root of the stable scaling equation");
}

}  // namespace

double natural_scale(const dist::StepDistribution& d, int n) { return natural_scale(d, n, identify_regime(d)); }

double natural_scale(const dist::StepDistribution& d, int n, Regime r) {
  if (n < 1) throw ConfigError("natural_scale: n must be >= 1");
  switch (r) {
    case Regime::finite_variance: return std::sqrt(double(n) * d.variance());
    case Regime::stable_finite_mean: return stable_scale(d, n);
    case Regime::infinite_mean_left: {
      // inf{x : F(-x) < 1/n}
      const double target = 1.0 / double(n);
      auto pred = [&](double x) { return d.cdf(-x) < target; };
      double hi = 1.0;
      while (!pred(hi)) {
        hi *= 2.0;
        if (hi > 1e300) throw NumericalError("natural_scale: left quantile not found");
      }
      const double lo = pred(0.0) ? 0.0 : hi / 2.0;
      return lo == 0.0 ? 0.0 : numeric::bisect_predicate(pred, lo, hi, 0.0);
    }
    case Regime::balanced: {
      const double tn = double(n);
      const double g = double(n) * d.two_sided_tail(tn / 2.0);
      if (!(g < 1.0 && g > 0.0)) throw ConfigError("natural_scale: n Gbar(t_n / 2) must lie in (0, 1)");
      return tn / (-2.0 * 3.0 * std::log(g));
    }
  }
  return 0.0;
}

double a_n(const dist::StepDistribution& d, double n) {
  if (!(n > 1.0)) throw ConfigError("a_n: n must be > 1");
  auto Q = [&](double x) { return d.q_function(x); };
  // Geometric probe for the last increase of Q.
  double x_star = 1e-6;
  double prev = Q(x_star);
  for (double x = x_star * std::sqrt(2.0); x < 1e15; x *= std::sqrt(2.0)) {
    const double q = Q(x);
    if (q > prev * (1.0 + 1e-14)) x_star = x;
    prev = q;
  }
  const double target = 1.0 / n;
  if (!(Q(x_star) > target)) throw NumericalError("a_n: no root of Q(x) = 1/n beyond the decreasing point");
  double hi = x_star;
  while (Q(hi) > target) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("a_n: Q does not fall below 1/n");
  }
  const double lo = std::max(x_star, hi / 2.0);
  return numeric::bisect([&](double x) { return Q(x) - target; }, lo, hi, 0.0);
}

double insensitivity_defect(const dist::StepDistribution& d, double x, double b, double T) {
  const double den = d.window_mass(x, T);
  if (!(den > 0.0)) throw NumericalError("insensitivity_defect: zero window mass at x");
  if (b == 0.0) return 0.0;
  if (T == kInf) return std::abs(d.tail(x - b) / den - 1.0);
  double worst = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double t = b * double(i) / 64.0;
    worst = std::max(worst, std::abs(d.window_mass(x - t, T) / den - 1.0));
  }
  return worst;
}

double insensitivity_boundary(const dist::StepDistribution& d, double b, double tol, double T) {
  if (!(b >= 0.0)) throw ConfigError("insensitivity_boundary: b must be >= 0");
  if (!(tol > 0.0)) throw ConfigError("insensitivity_boundary: tol must be > 0");
  if (b == 0.0) return d.support_low();
  auto ok = [&](double x) {
    if (!(d.window_mass(x, T) > 0.0)) return false;
    return insensitivity_defect(d, x, b, T) <= tol;
  };
  const double lo_support = d.support_low();
  double x = std::max({2.0 * b, 1.0, std::isfinite(lo_support) ? lo_support + 2.0 * b : 0.0});
  int it = 0;
  while (!ok(x)) {
    if (!(d.window_mass(x, T) > 0.0) || ++it > 1100)
      throw UnboundedError("insensitivity_boundary: defect never drops below tol=" + std::to_string(tol) +
                           " (is the law long-tailed?)");
    x *= 2.0;
  }
  // Walk down to the last x that fails, then bisect.
  double good = x, bad = x / 1.1;
  for (int k = 0; k < 100000 && ok(bad); ++k) {
    good = bad;
    bad /= 1.1;
    if (bad < 1e-12) return good;
  }
  return numeric::bisect_predicate(ok, bad, good, 1e-13);
}

TruncationResult truncation_check(const dist::StepDistribution& d, double h, int n, double b, double T,
                                  const CheckGrid& grid, double K) {
  if (n < 1) throw ConfigError("truncation_check: n must be >= 1");
  double lo = grid.lo == kInf ? d.support_low() : grid.lo;
  if (!std::isfinite(lo)) throw ConfigError("truncation_check: grid.lo required for laws unbounded below");
  lo = std::floor(lo / grid.delta + 1e-9) * grid.delta;
  const auto p = lattice::discretize(d, grid.delta, lo, grid.hi);
  TruncationResult r;
  r.n_eps = double(n) * lattice::epsilon_eta(p, h, K * b, 2, T, lattice::EpsVariant::epsilon);
  r.n_eta = double(n) * lattice::epsilon_eta(p, h, K * b, 2, T, lattice::EpsVariant::eta);
  return r;
}

SmallStepsResult small_steps_defect(const dist::StepDistribution& d, double h, double J, int n, double T,
                                    const lattice::GridSpec& grid) {
  SmallStepsResult r;
  r.x_at = J;
  if (!(d.cdf(h) > 0.0)) return r;  // no path has all steps <= h
  if (!(grid.lo < h)) throw ConfigError("small_steps_defect: grid.lo must lie below h");
  const lattice::SumOracle o(d, n, grid, h);
  const double top = std::max(double(n) * h, J);
  std::vector<double> xs;
  const int pts = 64;
  for (int i = 0; i < pts; ++i) xs.push_back(J * std::pow(top / J, double(i) / (pts - 1)));
  auto ratio = [&](double num, double x) {
    const double den = double(n) * d.window_mass(x, T);
    if (num <= 0.0) return 0.0;
    return den > 0.0 ? num / den : kInf;
  };
  if (T == kInf) {
    for (double x : xs) {
      const auto q = o.query(x, kInf, lattice::SpillMode::bound);
      const double v = ratio(q.point, x);
      if (v > r.defect) {
        r.defect = v;
        r.x_at = x;
      }
      r.defect_upper = std::max(r.defect_upper, ratio(q.upper, x));
    }
    return r;
  }
  // Finite T: window values on the z grid, then suffix maxima.
  std::vector<double> zs, w, wu;
  double wmax = 0.0;
  for (double z = J; z <= top + grid.delta; z += grid.delta) {
    const auto q = o.query(z, T, lattice::SpillMode::bound);
    zs.push_back(z);
    w.push_back(q.point);
    wu.push_back(q.upper);
    wmax = std::max(wmax, q.point);
    if (wmax > 0.0 && o.query(z, kInf, lattice::SpillMode::bound).upper < 1e-3 * wmax) break;
  }
  std::vector<double> sw(w.size() + 1, 0.0), swu(w.size() + 1, 0.0);
  for (std::size_t i = w.size(); i-- > 0;) {
    sw[i] = std::max(sw[i + 1], w[i]);
    swu[i] = std::max(swu[i + 1], wu[i]);
  }
  for (double x : xs) {
    const auto i = std::size_t(std::lower_bound(zs.begin(), zs.end(), x - 1e-12) - zs.begin());
    if (i >= zs.size()) break;
    const double v = ratio(sw[i], x);
    if (v > r.defect) {
      r.defect = v;
      r.x_at = x;
    }
    r.defect_upper = std::max(r.defect_upper, ratio(swu[i], x));
  }
  return r;
}

double heuristic_J(const dist::StepDistribution& d, double n) {
  if (!(n > 1.0)) throw ConfigError("heuristic_J: n must be > 1");
  double J = std::sqrt(2.0 * n * std::log(n));
  for (int it = 0; it < 10000; ++it) {
    const double g = n * d.tail(J);
    if (!(g < 1.0) || !(g > 0.0))
      throw NumericalError("heuristic_J: n Fbar(J) = " + std::to_string(g) + " leaves (0, 1); no fixed point");
    const double next = 0.5 * J + 0.5 * std::sqrt(-2.0 * n * std::log(g));
    if (std::abs(next - J) < 1e-9 * J) return next;
    J = next;
  }
  throw NumericalError("heuristic_J: no convergence after 10^4 iterations");
}

std::vector<double> scale_tail_trace(const dist::StepDistribution& d, int n, double b, const std::vector<double>& Ks) {
  std::vector<double> out;
  for (double K : Ks) out.push_back(double(n) * d.two_sided_tail(K * b));
  return out;
}

}  // namespace bigjump::seqs
