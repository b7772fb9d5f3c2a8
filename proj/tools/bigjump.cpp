#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "bigjump/errors.hpp"
#include "bigjump/harness/config.hpp"
#include "bigjump/harness/diagnose.hpp"
#include "bigjump/harness/experiment.hpp"
#include "bigjump/harness/report.hpp"
#include "bigjump/lattice/oracle.hpp"
#include "bigjump/mc/estimators.hpp"
#include "bigjump/seqs/boundary.hpp"

namespace bj = bigjump;
namespace hs = bigjump::harness;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitCheck = 4;

struct Global {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  bool check = false;
};

double real_opt(const std::string& field, const std::string& v) { return hs::parse_real(field, v); }

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw bj::Error("cannot write '" + p.string() + "'");
  f << text;
}

std::filesystem::path out_dir(const Global& g) {
  std::filesystem::path p = g.out.empty() ? "." : g.out;
  std::filesystem::create_directories(p);
  return p;
}

int report_check(const std::vector<std::string>& fails) {
  for (const auto& f : fails) std::cerr << "check failed: " << f << "\n";
  return fails.empty() ? 0 : kExitCheck;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Big-jump domain boundaries: exact lattice sums, Monte Carlo and diagnostics"};
  app.require_subcommand(1);
  Global g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: all cores)")->capture_default_str();
  app.add_option("--out", g.out, "Output directory");
  app.add_flag("--check", g.check, "Assertion mode: exit 4 when a check fails");

  // boundary
  auto* cb = app.add_subcommand("boundary", "Print the boundary set as JSON");
  std::string b_family, b_prov, b_T = "inf";
  int b_n = 0;
  std::optional<double> b_t;
  bj::seqs::BoundaryOptions bopt;
  bool b_no_I = false;
  cb->add_option("--family", b_family, "Family spec, e.g. pareto,alpha=2.5,standardize=unit_variance")->required();
  cb->add_option("--provenance", b_prov, "prop_8_1 ... corollary_2_1")->required();
  cb->add_option("--n", b_n, "Number of steps")->required();
  cb->add_option("--t", b_t);
  cb->add_option("--eps", bopt.eps)->capture_default_str();
  cb->add_option("--gamma", bopt.gamma)->capture_default_str();
  cb->add_option("--tol-I", bopt.tol_I)->capture_default_str();
  cb->add_option("--multiplier", bopt.multiplier)->capture_default_str();
  cb->add_option("--T", b_T, "Window length or inf")->capture_default_str();
  cb->add_option("--tn-coeff", bopt.tn_coeff)->capture_default_str();
  cb->add_option("--tn-power", bopt.tn_power)->capture_default_str();
  cb->add_option("--a", bopt.a)->capture_default_str();
  cb->add_option("--kappa", bopt.kappa)->capture_default_str();
  cb->add_flag("--no-I", b_no_I, "Skip the insensitivity boundary");

  // verify
  auto* cv = app.add_subcommand("verify", "Run an experiment from a config file");
  std::string v_config;
  cv->add_option("--config", v_config, "Config file (key = value)")->required();
  bool v_seed_given = false;

  // diagnose
  auto* cd = app.add_subcommand("diagnose", "Family diagnostics");
  std::string d_family, d_T = "inf", d_lo;
  double d_xmax = 1e5;
  cd->add_option("--family", d_family)->required();
  cd->add_option("--T", d_T)->capture_default_str();
  cd->add_option("--grid-lo", d_lo, "Lower end of the truncation-check grid");
  cd->add_option("--x-max", d_xmax)->capture_default_str();

  // oracle
  auto* co = app.add_subcommand("oracle", "Exact lattice query of P{S_n in (x, x + T]}");
  std::string o_family, o_T = "inf", o_lo, o_cap = "inf", o_mode = "strict", o_top = "inf";
  int o_n = 0;
  double o_x = 0.0, o_delta = 1.0 / 16, o_hi = 1e4;
  co->add_option("--family", o_family)->required();
  co->add_option("--n", o_n)->required();
  co->add_option("--x", o_x)->required();
  co->add_option("--T", o_T)->capture_default_str();
  co->add_option("--delta", o_delta)->capture_default_str();
  co->add_option("--lo", o_lo, "Grid lower end (default: support minimum)");
  co->add_option("--hi", o_hi)->capture_default_str();
  co->add_option("--cap", o_cap)->capture_default_str();
  co->add_option("--top", o_top, "Restrict every step to <= top")->capture_default_str();
  co->add_option("--mode", o_mode, "strict or bound")->capture_default_str();

  // mc
  auto* cm = app.add_subcommand("mc", "One Monte Carlo estimate");
  std::string m_family, m_T = "inf", m_method = "big_jump_cmc";
  int m_n = 0;
  double m_x = 0.0, m_h = 0.0;
  std::uint64_t m_samples = 100000;
  cm->add_option("--family", m_family)->required();
  cm->add_option("--n", m_n)->required();
  cm->add_option("--x", m_x)->required();
  cm->add_option("--T", m_T)->capture_default_str();
  cm->add_option("--method", m_method, "plain, big_jump_cmc or tilted_restricted")->capture_default_str();
  cm->add_option("--samples", m_samples)->capture_default_str();
  cm->add_option("--h-level", m_h, "Truncation level (tilted_restricted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  v_seed_given = app.count("--seed") > 0;

  try {
    if (*cb) {
      const auto d = hs::build_family(hs::parse_family_spec(b_family));
      bopt.t = b_t;
      bopt.T = real_opt("--T", b_T);
      bopt.compute_I = !b_no_I;
      const auto s = bj::seqs::boundary(d, bj::seqs::parse_provenance(b_prov), b_n, bopt);
      const std::string text = bj::seqs::to_json(s).dump(2) + "\n";
      std::cout << text;
      if (!g.out.empty()) write_file(out_dir(g) / "boundary.json", text);
      return 0;
    }
    if (*cv) {
      auto c = hs::load_config(v_config);
      if (v_seed_given) {
        hs::set_key(c, "mc.seed", std::to_string(g.seed));
        hs::validate(c);
      }
      const auto rep = hs::run_experiment(c, {g.threads});
      const auto dir = out_dir(g);
      hs::emit(rep, hs::Format::csv, (dir / "report.csv").string());
      hs::emit(rep, hs::Format::json, (dir / "report.json").string());
      for (const auto& s : rep.summary) {
        std::printf("n=%d %s sup|ratio-1| (x >= x_n) = %s\n", s.n, s.p_source.c_str(),
                    s.sup_abs_dev ? hs::fmt_real(*s.sup_abs_dev).c_str() : "n/a");
      }
      std::printf("config_hash=%s rows=%zu\n", rep.config_hash.c_str(), rep.rows.size());
      return g.check ? report_check(hs::check_report(c, rep)) : 0;
    }
    if (*cd) {
      const auto d = hs::build_family(hs::parse_family_spec(d_family));
      hs::DiagnoseOptions opt;
      opt.T = real_opt("--T", d_T);
      opt.x_max = d_xmax;
      if (!d_lo.empty()) opt.grid.lo = real_opt("--grid-lo", d_lo);
      const auto diag = hs::diagnose(d, opt);
      if (!g.out.empty()) {
        const auto dir = out_dir(g);
        for (const auto& t : diag.traces) write_file(dir / (t.name + ".csv"), hs::trace_csv(t));
        write_file(dir / "diagnose.json", hs::to_json(diag).dump(2) + "\n");
      }
      std::cout << hs::to_json(diag).dump(2) << "\n";
      return 0;
    }
    if (*co) {
      const auto d = hs::build_family(hs::parse_family_spec(o_family));
      bj::lattice::GridSpec grid;
      grid.delta = o_delta;
      grid.hi = o_hi;
      grid.cap = real_opt("--cap", o_cap);
      if (o_lo.empty()) {
        const double lo = d.support_low();
        if (!std::isfinite(lo)) throw bj::ConfigError("--lo: required for laws unbounded below");
        grid.lo = std::floor(lo / grid.delta + 1e-9) * grid.delta;
      } else {
        grid.lo = real_opt("--lo", o_lo);
      }
      bj::lattice::SpillMode mode;
      if (o_mode == "strict") mode = bj::lattice::SpillMode::strict;
      else if (o_mode == "bound") mode = bj::lattice::SpillMode::bound;
      else throw bj::ConfigError("--mode: expected strict or bound");
      const double T = real_opt("--T", o_T);
      const bj::lattice::SumOracle o(d, o_n, grid, real_opt("--top", o_top));
      const auto q = o.query(o_x, T, mode);
      const double nwm = double(o_n) * d.window_mass(o_x, T);
      json j = {{"n", o_n},
                {"x", o_x},
                {"T", hs::real_json(T)},
                {"point", q.point},
                {"lower", q.lower},
                {"upper", q.upper},
                {"spill_uncertainty", q.spill_uncertainty},
                {"exact", q.exact},
                {"n_window_mass", nwm},
                {"ratio", hs::real_json(q.point / nwm)}};
      std::cout << j.dump(2) << "\n";
      if (g.check && !(q.lower <= q.point && q.point <= q.upper))
        return report_check({"oracle bracket does not contain the point estimate"});
      return 0;
    }
    if (*cm) {
      const auto d = hs::build_family(hs::parse_family_spec(m_family));
      const double T = real_opt("--T", m_T);
      const bj::mc::RunOptions mo{g.threads};
      bj::mc::EstimatorResult r;
      switch (bj::mc::parse_method(m_method)) {
        case bj::mc::Method::plain: r = bj::mc::plain_tail(d, m_n, m_x, T, m_samples, g.seed, mo); break;
        case bj::mc::Method::big_jump_cmc:
          if (T != bj::dist::kInf) throw bj::ConfigError("--method big_jump_cmc: T must be inf");
          r = bj::mc::big_jump_cmc(d, m_n, m_x, m_samples, g.seed, mo);
          break;
        case bj::mc::Method::tilted_restricted:
          if (!(m_h > 0.0)) throw bj::ConfigError("--h-level: required (> 0) for tilted_restricted");
          r = bj::mc::tilted_restricted(d, m_h, m_n, m_x, T, m_samples, g.seed, mo);
          break;
      }
      std::cout << bj::mc::to_json(r).dump(2) << "\n";
      if (g.check && !(r.std_error >= 0.0 && r.estimate >= 0.0 && r.estimate <= 1.0 + 3.0 * r.std_error))
        return report_check({"estimator invariants violated"});
      return 0;
    }
  } catch (const bj::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const bj::NumericalError& e) {
    std::cerr << "numerical guard: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
