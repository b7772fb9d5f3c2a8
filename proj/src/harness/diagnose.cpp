#include "bigjump/harness/diagnose.hpp"

#include <cmath>

#include "bigjump/errors.hpp"
#include "bigjump/harness/report.hpp"

namespace bigjump::harness {

std::string trace_csv(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + fmt_real(r[i]);
    out += "\n";
  }
  return out;
}

Diagnostics diagnose(const dist::StepDistribution& d, const DiagnoseOptions& opt) {
  Diagnostics g;
  g.family = d.describe();

  try {
    const auto f = karamata::from_distribution(d, opt.T);
    g.matuszewska = karamata::matuszewska(f, karamata::geometric_grid(opt.x_max / 1e4, opt.x_max),
                                          karamata::geometric_grid(1.1, 10.0, 10));
  } catch (const Error& e) {
    g.notes.push_back(std::string("matuszewska skipped: ") + e.what());
  }

  Trace lt{"long_tail", {"x", "defect"}, {}};
  const double lo = d.support_low();
  const double x0 = std::max(1.0, std::isfinite(lo) ? lo + 1.0 : 1.0);
  for (double x : karamata::geometric_grid(x0, std::max(opt.x_max, 10.0 * x0), 8)) {
    if (!(d.window_mass(x, opt.T) > 0.0)) break;
    lt.rows.push_back({x, karamata::long_tail_defect(d, x, 1.0, opt.T)});
  }
  // Long-tailed when the shift defect has come down to a few percent and is
  // still falling at the end of the trace.
  if (lt.rows.size() >= 2) {
    const double last = lt.rows.back()[1], first = lt.rows.front()[1];
    g.long_tailed = last < 0.05 && last < first;
  }
  g.traces.push_back(std::move(lt));

  g.sd = karamata::sd_sufficient(d);

  Trace tr{"truncation", {"n", "h", "b", "n_eps", "n_eta"}, {}};
  Trace st{"scale_tail", {"n", "K", "n_Gbar_Kb"}, {}};
  for (int n : opt.ns) {
    double b;
    try {
      b = seqs::natural_scale(d, n);
    } catch (const Error& e) {
      g.notes.push_back("n=" + std::to_string(n) + ": natural scale unavailable: " + e.what());
      continue;
    }
    const auto ks = std::vector<double>{1, 2, 4, 8, 16};
    const auto v = seqs::scale_tail_trace(d, n, b, ks);
    for (std::size_t i = 0; i < ks.size(); ++i) st.rows.push_back({double(n), ks[i], v[i]});
    try {
      const auto t = seqs::truncation_check(d, b, n, b, opt.T, opt.grid);
      tr.rows.push_back({double(n), b, b, t.n_eps, t.n_eta});
    } catch (const Error& e) {
      g.notes.push_back("n=" + std::to_string(n) + ": truncation check skipped: " + e.what());
    }
  }
  g.traces.push_back(std::move(tr));
  g.traces.push_back(std::move(st));

  std::string v = g.long_tailed ? "long-tailed" : "not long-tailed";
  if (g.matuszewska) {
    v += "; Matuszewska indices (" + fmt_real(g.matuszewska->upper) + ", " + fmt_real(g.matuszewska->lower) + ")";
  }
  v += std::string("; sd_sufficient: ") + karamata::sd_verdict_name(g.sd.verdict);
  g.verdict = v;
  return g;
}

nlohmann::json to_json(const Diagnostics& g) {
  nlohmann::json j;
  j["family"] = g.family;
  if (g.matuszewska) {
    const auto& m = *g.matuszewska;
    j["matuszewska"] = {{"upper", real_json(m.upper)},           {"lower", real_json(m.lower)},
                        {"upper_sentinel", m.upper_sentinel}, {"lower_sentinel", m.lower_sentinel},
                        {"decade_low", real_json(m.decade_low)}, {"decade_high", real_json(m.decade_high)}};
  } else {
    j["matuszewska"] = nullptr;
  }
  j["long_tailed"] = g.long_tailed;
  j["sd_sufficient"] = {{"verdict", karamata::sd_verdict_name(g.sd.verdict)}, {"text", g.sd.text}};
  j["notes"] = g.notes;
  j["verdict"] = g.verdict;
  return j;
}

}  // namespace bigjump::harness
