#include "bigjump/seqs/boundary.hpp"

#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/numeric/roots.hpp"

namespace bigjump::seqs {

const char* provenance_name(Provenance p) {
  switch (p) {
    case Provenance::prop_8_1: return "prop_8_1";
    case Provenance::prop_8_2: return "prop_8_2";
    case Provenance::prop_8_3: return "prop_8_3";
    case Provenance::prop_8_4: return "prop_8_4";
    case Provenance::prop_9_1: return "prop_9_1";
    case Provenance::prop_9_2: return "prop_9_2";
    case Provenance::prop_9_3: return "prop_9_3";
    case Provenance::heuristic_24: return "heuristic_24";
    case Provenance::corollary_2_1: return "corollary_2_1";
  }
  return "?";
}

Provenance parse_provenance(const std::string& s) {
  for (int i = 0; i <= int(Provenance::corollary_2_1); ++i) {
    if (s == provenance_name(Provenance(i))) return Provenance(i);
  }
  throw ConfigError("unknown provenance '" + s + "'");
}

namespace {

void require_standardized(const dist::StepDistribution& d, Provenance p) {
  const std::string who = provenance_name(p);
  if (!d.has_variance()) throw ConfigError(who + ": regime mismatch, needs finite variance (" + d.describe() + ")");
  if (std::abs(d.mean()) > 1e-9 || std::abs(d.variance() - 1.0) > 1e-9)
    throw ConfigError(who + ": needs E xi = 0 and E xi^2 = 1; standardize the family first");
}

dist::HazardForm require_hazard(const dist::StepDistribution& d, Provenance p, dist::Family kind) {
  const auto h = d.hazard();
  if (!h || h->kind != kind)
    throw ConfigError(std::string(provenance_name(p)) + ": regime mismatch, needs a " + dist::family_name(kind) +
                      " family (got " + d.describe() + ")");
  return *h;
}

void require_regime(const dist::StepDistribution& d, Provenance p, Regime r) {
  const Regime got = identify_regime(d);
  if (got != r)
    throw ConfigError(std::string(provenance_name(p)) + ": regime mismatch, needs " + regime_name(r) + " (got " +
                      regime_name(got) + ")");
}

void add_flag(std::string& flags, const std::string& f) { flags += (flags.empty() ? "" : ";") + f; }

nlohmann::json num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

template <class T>
nlohmann::json opt_num(const std::optional<T>& v) {
  return v ? num(*v) : nlohmann::json(nullptr);
}

}  // namespace

BoundarySet boundary(const dist::StepDistribution& d, Provenance p, int n, const BoundaryOptions& opt) {
  if (n < 2) throw ConfigError("boundary: n must be >= 2");
  BoundarySet s;
  s.n = n;
  s.provenance = p;
  s.family = d.describe();
  s.options = opt;
  const double N = double(n), ln = std::log(N);
  const std::string who = provenance_name(p);
  bool want_I = opt.compute_I;

  switch (p) {
    case Provenance::prop_8_1: {
      require_standardized(d, p);
      const double r = d.right_index();
      if (!(r < kInf)) throw ConfigError(who + ": needs an O-regularly varying tail (power family)");
      const bool local = opt.T != kInf;
      s.alpha_F = s.beta_F = local ? -r - 1.0 : -r;
      const double t = opt.t.value_or(1.0);
      if (local) {
        if (!(*s.alpha_F < -3.0)) throw ConfigError(who + ": local case needs alpha_F < -3");
        if (!(t > -*s.beta_F - 3.0)) throw ConfigError(who + ": local case needs t > -beta_F - 3");
      } else {
        if (!(*s.alpha_F < -2.0)) throw ConfigError(who + ": needs alpha_F < -2");
        if (!(t > -*s.beta_F - 2.0)) throw ConfigError(who + ": needs t > -beta_F - 2");
      }
      s.t = t;
      s.b_n = std::sqrt(N);
      s.h_n = std::sqrt(N / (t * ln));
      s.J_n = std::sqrt(t * N * ln);
      s.x_formula = s.J_n;
      break;
    }
    case Provenance::prop_8_2: {
      require_standardized(d, p);
      const auto h = require_hazard(d, p, dist::Family::lognormal_hazard);
      const double t = opt.t.value_or(1.0);
      if (!(t > std::pow(2.0, 1.0 - h.beta) * h.c)) throw ConfigError(who + ": needs t > 2^(1 - beta) c");
      s.t = t;
      s.b_n = std::sqrt(N);
      const double lb = std::pow(ln, h.beta);
      s.h_n = std::sqrt(N / (t * lb));
      s.J_n = std::sqrt(t * N * lb);
      s.x_formula = h.beta < 2.0 ? s.J_n : opt.multiplier * std::sqrt(N * std::pow(ln, 2.0 * h.beta - 2.0));
      break;
    }
    case Provenance::prop_8_3: {
      require_standardized(d, p);
      const auto h = require_hazard(d, p, dist::Family::weibull_hazard);
      if (!(opt.eps > 0.0)) throw ConfigError(who + ": needs eps > 0");
      s.b_n = std::sqrt(N);
      s.h_n = std::pow(N, (1.0 - h.beta - opt.eps) / (2.0 - h.beta));
      s.J_n = std::pow(N, (1.0 + opt.eps) / (2.0 - h.beta));
      // x / R(x) = multiplier sqrt(n); x / R(x) is increasing for beta < 1.
      const double target = opt.multiplier * std::sqrt(N);
      auto f = [&](double x) { return x / h.R(x) - target; };
      double lo = std::max(h.x_min, 1.0), hi = lo * 2.0;
      if (f(lo) >= 0.0) {
        s.x_formula = lo;
      } else {
        while (f(hi) < 0.0) hi *= 2.0;
        s.x_formula = numeric::bisect(f, lo, hi, 1e-14);
      }
      break;
    }
    case Provenance::prop_8_4: {
      require_standardized(d, p);
      const auto h = require_hazard(d, p, dist::Family::light_subexp);
      if (!(opt.eps > 0.0)) throw ConfigError(who + ": needs eps > 0");
      s.b_n = std::sqrt(N);
      s.h_n = std::sqrt(N);
      s.J_n = std::exp(std::pow(h.c + opt.eps, 1.0 / h.beta) * std::pow(N, 1.0 / (2.0 * h.beta)));
      const double xt = std::exp(opt.multiplier * std::pow(N, 1.0 / (2.0 * h.beta)));
      if (std::isfinite(xt)) s.x_formula = xt;
      break;
    }
    case Provenance::prop_9_1: {
      require_regime(d, p, Regime::balanced);
      if (!(opt.gamma > 0.0)) throw ConfigError(who + ": needs gamma > 0");
      const double tn = opt.tn_coeff * std::pow(N, opt.tn_power);
      const double g = N * d.two_sided_tail(tn / 2.0);
      if (!(g > 0.0 && g < 1.0)) throw ConfigError(who + ": needs 0 < n Gbar(t_n / 2) < 1");
      if (!(N * d.two_sided_tail(tn) < 1.0)) throw ConfigError(who + ": needs n Gbar(t_n) < 1");
      s.h_n = tn / (-2.0 * opt.gamma * std::log(g));
      s.J_n = tn / 2.0;
      s.b_n = s.h_n;
      s.a_n = a_n(d, N);
      if (s.h_n < *s.a_n) add_flag(s.flags, "h_n<a_n");
      s.x_formula = opt.multiplier * d.quantile_upper(1.0 / N);
      break;
    }
    case Provenance::prop_9_2: {
      require_regime(d, p, Regime::stable_finite_mean);
      const double a = d.left_index(), be = d.right_index();
      const double t = opt.t.value_or(2.0);
      if (!(t > 1.0)) throw ConfigError(who + ": needs t > 1");
      s.t = t;
      s.b_n = natural_scale(d, n, Regime::stable_finite_mean);
      const double L = (be - a) / (a - 1.0) * ln;
      s.h_n = std::pow(L, -1.0 / a) * s.b_n;
      s.J_n = t * std::pow(L, (a - 1.0) / a) * s.b_n;
      s.x_formula = s.J_n;
      break;
    }
    case Provenance::prop_9_3: {
      require_regime(d, p, Regime::infinite_mean_left);
      const double be = d.right_index();
      if (!(opt.eps > 0.0)) throw ConfigError(who + ": needs eps > 0");
      s.b_n = natural_scale(d, n, Regime::infinite_mean_left);
      s.h_n = std::pow(N, 1.0 / be);
      s.J_n = std::pow(N, 1.0 / be + opt.eps);
      s.x_formula = opt.multiplier * s.b_n;
      break;
    }
    case Provenance::heuristic_24: {
      require_regime(d, p, Regime::finite_variance);
      s.b_n = std::sqrt(N * d.variance());
      s.J_n = heuristic_J(d, N);
      s.h_n = N / s.J_n;
      add_flag(s.flags, "heuristic");
      break;
    }
    case Provenance::corollary_2_1: {
      if (!d.has_mean() || std::abs(d.mean()) > 1e-9) throw ConfigError(who + ": needs E xi = 0");
      if (!(opt.kappa > 1.0 && opt.kappa <= 2.0)) throw ConfigError(who + ": needs 1 < kappa <= 2");
      const double idx = std::min(d.left_index(), d.right_index());
      if (!(d.has_variance() || idx > opt.kappa)) throw ConfigError(who + ": needs E|xi|^kappa < inf");
      if (!(opt.a > 0.0)) throw ConfigError(who + ": needs a > 0");
      s.h_n = s.b_n = std::pow(N * opt.a, 1.0 / opt.kappa);
      s.J_n = opt.a * N / 2.0;
      s.I_n = opt.a * N / 2.0;
      s.x_formula = opt.a * N;
      want_I = false;
      break;
    }
  }

  if (!(s.h_n <= s.J_n))
    throw ConfigError(who + ": h_n = " + std::to_string(s.h_n) + " exceeds J_n = " + std::to_string(s.J_n) +
                      " at n = " + std::to_string(n));

  if (want_I) {
    try {
      s.I_n = insensitivity_boundary(d, s.b_n, opt.tol_I, opt.T);
    } catch (const UnboundedError&) {
      add_flag(s.flags, "I_unbounded");
    }
  } else if (!s.I_n) {
    add_flag(s.flags, "I_absent");
  }
  s.x_n = s.I_n ? *s.I_n + s.J_n : s.J_n;

  for (double v : {s.b_n, s.h_n, s.J_n, s.x_n}) {
    if (!(v > 0.0) || !std::isfinite(v)) throw NumericalError(who + ": boundary entries must be finite and positive");
  }
  if (s.I_n && !(*s.I_n > 0.0)) throw NumericalError(who + ": I_n must be positive");
  return s;
}

nlohmann::json to_json(const BoundaryOptions& o) {
  nlohmann::json j;
  j["t"] = opt_num(o.t);
  j["eps"] = num(o.eps);
  j["gamma"] = num(o.gamma);
  j["tol_I"] = num(o.tol_I);
  j["multiplier"] = num(o.multiplier);
  j["T"] = num(o.T);
  j["K"] = num(o.K);
  j["tn_coeff"] = num(o.tn_coeff);
  j["tn_power"] = num(o.tn_power);
  j["a"] = num(o.a);
  j["kappa"] = num(o.kappa);
  j["compute_I"] = o.compute_I;
  return j;
}

nlohmann::json to_json(const BoundarySet& b) {
  nlohmann::json j;
  j["n"] = b.n;
  j["provenance"] = provenance_name(b.provenance);
  j["family"] = b.family;
  j["b_n"] = num(b.b_n);
  j["a_n"] = opt_num(b.a_n);
  j["h_n"] = num(b.h_n);
  j["I_n"] = opt_num(b.I_n);
  j["J_n"] = num(b.J_n);
  j["x_n"] = num(b.x_n);
  j["x_formula"] = opt_num(b.x_formula);
  j["t_used"] = num(b.t);
  j["alpha_F"] = opt_num(b.alpha_F);
  j["beta_F"] = opt_num(b.beta_F);
  j["flags"] = b.flags;
  j["options"] = to_json(b.options);
  return j;
}

}  // namespace bigjump::seqs
