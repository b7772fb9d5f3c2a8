#include "bigjump/karamata/karamata.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bigjump/errors.hpp"
#include "bigjump/numeric/quadrature.hpp"

namespace bigjump::karamata {

using dist::kInf;

double TailFunction::log_at(double x) const {
  if (log_f) return log_f(x);
  const double v = f(x);
  if (v < 0.0 || std::isnan(v)) throw ConfigError(name + ": function is negative at x=" + std::to_string(x));
  return std::log(v);
}

TailFunction closed_form(std::function<double(double)> f, std::string name, double domain_low) {
  TailFunction t;
  t.f = std::move(f);
  t.name = std::move(name);
  t.domain_low = domain_low;
  return t;
}

TailFunction from_distribution(const dist::StepDistribution& d, double T) {
  TailFunction t;
  t.name = d.describe();
  t.f = [d, T](double x) { return d.window_mass(x, T); };
  t.domain_low = d.support_low();
  t.compact_support = d.support_high() < kInf;
  t.breaks = d.breakpoints();
  const auto hz = d.hazard();
  if (hz && T == kInf) {
    const bool wrapped = d.family() == dist::Family::affine_wrapper;
    const double sh = wrapped ? d.shift() : 0.0, sc = wrapped ? d.scale() : 1.0;
    const dist::HazardForm h = *hz;
    t.log_f = [h, sh, sc](double x) {
      const double u = sh + sc * x;
      if (u < h.x_min) return 0.0;
      return std::min(0.0, std::log(h.kappa) + h.rho * std::log(u) - h.R(u));
    };
  }
  return t;
}

std::vector<double> geometric_grid(double a, double b, int per_decade) {
  if (!(a > 0.0 && b > a) || per_decade < 1) throw ConfigError("geometric_grid: need 0 < a < b");
  const int n = std::max(2, int(std::ceil(std::log10(b / a) * per_decade)) + 1);
  std::vector<double> g(static_cast<std::size_t>(n));
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < n; ++i) g[std::size_t(i)] = std::exp(la + (lb - la) * i / (n - 1));
  g.front() = a;
  g.back() = b;
  return g;
}

MatuszewskaResult matuszewska(const TailFunction& f, const std::vector<double>& x_grid,
                              const std::vector<double>& y_grid, double floor) {
  if (x_grid.empty() || y_grid.empty()) throw ConfigError("matuszewska: empty grid");
  const auto [xmin_it, xmax_it] = std::minmax_element(x_grid.begin(), x_grid.end());
  const double x_lo = *xmin_it, x_hi = *xmax_it;
  if (!(x_lo > 0.0) || x_hi < 1e3 * x_lo * (1 - 1e-12))
    throw ConfigError("matuszewska: x grid must span at least three decades");
  MatuszewskaResult r;
  r.decade_low = x_hi / 10.0;
  r.decade_high = x_hi;
  r.upper = -kInf;
  r.lower = kInf;
  for (double y : y_grid) {
    if (!(y > 1.0)) throw ConfigError("matuszewska: y grid must lie in (1, Y]");
    const double ly = std::log(y);
    for (double x : x_grid) {
      if (x < r.decade_low * (1 - 1e-12)) continue;
      const double a = f.log_at(x), b = f.log_at(x * y);
      if (!std::isfinite(a)) throw ConfigError(f.name + ": function is not positive on the grid");
      if (b == -kInf) throw ConfigError(f.name + ": function is not positive on the grid");
      // Ratio of values when both are representable keeps powers of two exact under scaling.
      double e;
      if (f.f && !f.log_f) {
        const double fx = f.f(x), fxy = f.f(x * y);
        e = std::log(fxy / fx) / ly;
      } else {
        e = (b - a) / ly;
      }
      r.upper = std::max(r.upper, e);
      r.lower = std::min(r.lower, e);
    }
  }
  if (r.upper < floor) {
    r.upper = -kInf;
    r.upper_sentinel = true;
  }
  if (r.lower < floor) {
    r.lower = -kInf;
    r.lower_sentinel = true;
  }
  return r;
}

double long_tail_defect(const dist::StepDistribution& d, double x, double y, double T) {
  const double den = d.window_mass(x, T);
  if (!(den > 0.0)) throw NumericalError("long_tail_defect: zero window mass at x");
  if (y == 0.0) return 0.0;
  return std::abs(d.window_mass(x - y, T) / den - 1.0);
}

IrvRow irv_defect(const TailFunction& f, double y, double x_max, int points) {
  IrvRow row;
  row.y = y;
  if (y == 1.0) return row;
  row.sup_ratio = -kInf;
  row.inf_ratio = kInf;
  for (double x : geometric_grid(x_max / 10.0, x_max, points)) {
    const double r = std::exp(f.log_at(x * y) - f.log_at(x));
    row.sup_ratio = std::max(row.sup_ratio, r);
    row.inf_ratio = std::min(row.inf_ratio, r);
  }
  return row;
}

std::vector<IrvRow> irv_trace(const TailFunction& f, const std::vector<double>& ys, double x_max) {
  std::vector<IrvRow> out;
  for (double y : ys) out.push_back(irv_defect(f, y, x_max));
  return out;
}

const char* sd_flag_name(SdFlag f) {
  switch (f) {
    case SdFlag::ok: return "ok";
    case SdFlag::divergent: return "divergent";
    case SdFlag::compact_support: return "compact_support";
  }
  return "?";
}

SdRatio sd_ratio(const TailFunction& H, double x, std::function<double(double)> split) {
  SdRatio r;
  const double lhx = H.log_at(x);
  if (lhx == -kInf) {
    r.flag = SdFlag::compact_support;
    return r;
  }
  auto h = [&](double y) { return std::exp(H.log_at(y)); };
  try {
    const auto tot = numeric::integrate_pieces(h, 0.0, kInf, H.breaks, 1e-10);
    if (!std::isfinite(tot.value)) throw NumericalError("not finite");
    r.integral = tot.value;
  } catch (const NumericalError&) {
    r.flag = SdFlag::divergent;
    r.integral = kInf;
  }
  const double s = std::clamp(split ? split(x) : std::sqrt(x), 0.0, x / 2.0);
  auto g = [&](double y) {
    const double v = H.log_at(y) + H.log_at(x - y) - lhx;
    return v == -kInf ? 0.0 : std::exp(v);
  };
  std::vector<double> breaks;
  for (double b : H.breaks) {
    breaks.push_back(b);
    breaks.push_back(x - b);
  }
  breaks.push_back(s);
  const auto q = numeric::integrate_pieces(g, 0.0, x / 2.0, breaks, 1e-10);
  r.ratio = q.value;
  r.error = q.error;
  return r;
}

const char* sd_verdict_name(SdVerdict v) {
  switch (v) {
    case SdVerdict::pass_B1: return "pass_B1";
    case SdVerdict::pass_B2: return "pass_B2";
    case SdVerdict::fail: return "fail";
    case SdVerdict::not_applicable: return "not_applicable";
  }
  return "?";
}

namespace {

// Hypotheses are checked on x = 10^k, k = 100..300; "eventually" means on all
// of those points.
std::vector<double> far_grid() {
  std::vector<double> g;
  for (int k = 100; k <= 300; k += 5) g.push_back(std::pow(10.0, k));
  return g;
}

struct Candidate {
  std::string name;
  std::function<double(double)> z, dz, d2z;
};

}  // namespace

SdCertificate sd_sufficient(const dist::HazardForm& h) {
  SdCertificate c;
  std::ostringstream t;
  const auto grid = far_grid();
  const double L = 1e-2;  // margins for "< 1" and "-> 0"
  auto logp = [&](double x) { return std::log(h.kappa) + h.rho * std::log(x); };

  // Long-tailedness of H = p e^{-R} with power p: R'(x) -> 0.
  const double xt = grid.back(), xm = grid[grid.size() / 2];
  const double lt = h.dR(xt);
  if (!(lt < L) || lt > h.dR(xm)) {
    t << "H not long-tailed: R'(x) = " << lt << " at x=" << xt << "; no criterion applies";
    c.verdict = SdVerdict::fail;
    c.text = t.str();
    return c;
  }

  Candidate z;
  if (h.kind == dist::Family::weibull_hazard) {
    const double a = (h.beta + 1.0) / 2.0;
    z = {"x^" + std::to_string(a), [a](double x) { return std::pow(x, a); },
         [a](double x) { return a * std::pow(x, a - 1.0); },
         [a](double x) { return a * (a - 1.0) * std::pow(x, a - 2.0); }};
  } else {
    z = {"R", [h](double x) { return h.R(x); }, [h](double x) { return h.dR(x); },
         [h](double x) { return h.d2R(x); }};
  }

  // pass_B1: z-majorant criterion.
  double sup_elast = -kInf;
  bool concave = true, ratio_noninc = true, r_grows = true;
  double prev_ratio = kInf, prev_rlog = 0.0;
  for (double x : grid) {
    sup_elast = std::max(sup_elast, x * z.dz(x) / z.z(x));
    concave = concave && z.d2z(x) <= 0.0;
    const double rz = h.R(x) / z.z(x);
    ratio_noninc = ratio_noninc && rz <= prev_ratio * (1 + 1e-12);
    prev_ratio = rz;
    const double rlog = h.R(x) / std::log(x);
    r_grows = r_grows && rlog > prev_rlog;
    prev_rlog = rlog;
  }
  r_grows = r_grows && prev_rlog > 10.0;
  t << "B1 with z = " << z.name << ": sup x z'/z = " << sup_elast << (sup_elast < 1.0 - L ? " < 1" : " not < 1")
    << ", z concave: " << (concave ? "yes" : "no") << ", R/z nonincreasing: " << (ratio_noninc ? "yes" : "no")
    << ", R >> log x: " << (r_grows ? "yes" : "no");
  if (sup_elast < 1.0 - L && concave && ratio_noninc && r_grows) {
    c.verdict = SdVerdict::pass_B1;
    c.text = t.str();
    return c;
  }

  // pass_B2: R' nonincreasing and e^{y R'(y)} H(y) integrable, i.e. its log
  // falls below -(1 + margin) log y.
  bool dr_noninc = true;
  double worst = -kInf;
  for (double x : grid) {
    dr_noninc = dr_noninc && h.d2R(x) <= 0.0;
    const double e = (x * h.dR(x) - h.R(x) + logp(x)) / std::log(x);
    worst = std::max(worst, e);
  }
  const bool integrable = worst < -1.0 - L;
  t << "; B2: R' nonincreasing: " << (dr_noninc ? "yes" : "no")
    << ", sup log(e^{yR'} H)/log y = " << worst << (integrable ? " (integrable)" : " (not integrable)");
  c.verdict = dr_noninc && integrable ? SdVerdict::pass_B2 : SdVerdict::fail;
  c.text = t.str();
  return c;
}

SdCertificate sd_sufficient(const dist::StepDistribution& d) {
  const auto h = d.hazard();
  if (!h) return {SdVerdict::not_applicable, d.describe() + ": no hazard decomposition p e^{-R}"};
  return sd_sufficient(*h);
}

}  // namespace bigjump::karamata
