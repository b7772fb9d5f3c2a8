#include "bigjump/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "bigjump/errors.hpp"
#include "bigjump/lattice/cache.hpp"

namespace bigjump::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Seed of one (n, x) cell; independent of evaluation order.
std::uint64_t cell_seed(std::uint64_t master, int n, std::size_t xi) {
  return splitmix64(master ^ splitmix64((std::uint64_t(std::uint32_t(n)) << 32) | std::uint64_t(xi)));
}

Row make_row(int n, double x, double xn, double p, std::string source, double nwm) {
  Row r;
  r.n = n;
  r.x = x;
  r.x_over_boundary = x / xn;
  r.p_value = p;
  r.p_source = std::move(source);
  r.n_window_mass = nwm;
  r.ratio = p / nwm;
  return r;
}

}  // namespace

std::vector<SummaryEntry> summarize(const std::vector<Row>& rows) {
  std::vector<SummaryEntry> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SummaryEntry& e) { return e.n == r.n && e.p_source == r.p_source; });
    if (it == out.end()) {
      out.push_back({r.n, r.p_source, std::nullopt, std::nullopt, 0});
      it = out.end() - 1;
    }
    if (!(r.x_over_boundary >= 1.0)) continue;
    ++it->rows;
    const double dev = std::abs(r.ratio - 1.0);
    if (!it->sup_abs_dev || dev > *it->sup_abs_dev || std::isnan(dev)) {
      it->sup_abs_dev = dev;
      it->x_at = r.x;
    }
  }
  std::sort(out.begin(), out.end(), [](const SummaryEntry& a, const SummaryEntry& b) {
    return a.n != b.n ? a.n < b.n : a.p_source < b.p_source;
  });
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& c, RunOptions opt) {
  validate(c);
  const auto d = build_family(c.family);
  ExperimentReport rep;
  rep.config = c.echo;
  rep.config_hash = config_hash(c);

  lattice::GridSpec grid = c.grid;
  if (c.grid_lo_auto) {
    const double lo = d.support_low();
    if (!std::isfinite(lo)) throw ConfigError("grid.lo: required for laws unbounded below");
    grid.lo = std::floor(lo / grid.delta + 1e-9) * grid.delta;
  }
  std::unique_ptr<lattice::LawCache> cache;
  if (!c.cache_dir.empty()) cache = std::make_unique<lattice::LawCache>(c.cache_dir);
  const bool want_oracle = c.method != Source::mc, want_mc = c.method != Source::oracle;
  const mc::Method mm = c.mc_method.value_or(c.T == kInf ? mc::Method::big_jump_cmc : mc::Method::plain);
  const std::string mc_source = std::string("mc:") + mc::method_name(mm);

  for (int n : c.n_grid) {
    const auto b = seqs::boundary(d, c.provenance, n, c.options);
    rep.boundaries.push_back(seqs::to_json(b));
    std::vector<double> xs;
    if (!c.x_values.empty()) {
      xs = c.x_values;
    } else {
      for (double m : c.x_multiples) xs.push_back(m * b.x_n);
    }
    std::unique_ptr<lattice::SumOracle> oracle;
    if (want_oracle) oracle = std::make_unique<lattice::SumOracle>(d, n, grid, kInf, cache.get());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double x = xs[i];
      const double nwm = double(n) * d.window_mass(x, c.T);
      if (want_oracle) {
        const auto q = oracle->query(x, c.T, c.spill);
        Row r = make_row(n, x, b.x_n, q.point, "oracle", nwm);
        r.p_lower = q.lower;
        r.p_upper = q.upper;
        rep.rows.push_back(std::move(r));
      }
      if (want_mc) {
        const std::uint64_t seed = cell_seed(c.seed, n, i);
        const mc::RunOptions mo{opt.threads};
        const auto e = mm == mc::Method::plain ? mc::plain_tail(d, n, x, c.T, c.mc_samples, seed, mo)
                                               : mc::big_jump_cmc(d, n, x, c.mc_samples, seed, mo);
        Row r = make_row(n, x, b.x_n, e.estimate, mc_source, nwm);
        r.std_error = e.std_error;
        rep.rows.push_back(std::move(r));
      }
    }
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(), [](const Row& a, const Row& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.x != b.x) return a.x < b.x;
    return a.p_source < b.p_source;
  });
  rep.summary = summarize(rep.rows);
  return rep;
}

std::vector<std::string> check_report(const ExperimentConfig& c, const ExperimentReport& r) {
  std::vector<std::string> fails;
  const auto& k = c.checks;
  if (k.sup_max) {
    for (const auto& s : r.summary) {
      if (s.sup_abs_dev && !(*s.sup_abs_dev <= *k.sup_max))
        fails.push_back("n=" + std::to_string(s.n) + " " + s.p_source + ": sup |ratio - 1| = " +
                        std::to_string(*s.sup_abs_dev) + " > check.sup_max");
    }
  }
  for (const auto& row : r.rows) {
    if (!(row.x_over_boundary >= 1.0)) continue;
    if ((k.ratio_min && !(row.ratio >= *k.ratio_min)) || (k.ratio_max && !(row.ratio <= *k.ratio_max)))
      fails.push_back("n=" + std::to_string(row.n) + " x=" + std::to_string(row.x) + " " + row.p_source +
                      ": ratio " + std::to_string(row.ratio) + " outside [check.ratio_min, check.ratio_max]");
  }
  if (c.method == Source::both) {
    int cells = 0, ok = 0;
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i) {
      const Row &a = r.rows[i], &b = r.rows[i + 1];
      if (a.n != b.n || a.x != b.x) continue;
      const Row& mcr = a.std_error ? a : b;
      const Row& orr = a.std_error ? b : a;
      ++cells;
      if (std::abs(mcr.p_value - orr.p_value) <= k.mc_z * *mcr.std_error) ++ok;
    }
    if (cells > 0 && double(ok) < k.mc_coverage * double(cells))
      fails.push_back("mc/oracle agreement " + std::to_string(ok) + "/" + std::to_string(cells) +
                      " below check.mc_coverage");
  }
  return fails;
}

}  // namespace bigjump::harness
