#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/harness/config.hpp"
#include "bigjump/harness/diagnose.hpp"
#include "bigjump/harness/experiment.hpp"
#include "bigjump/harness/report.hpp"

using namespace bigjump;
using namespace bigjump::harness;

namespace {

const char* kBase = R"(# small oracle run
provenance = prop_8_1
method = oracle
family.name = pareto
family.alpha = 2.5
family.x_min = 1
family.standardize = unit_variance
grid.n = 5,10,20
grid.x_multiples = 0.5,1,1.5,2,3,4,6
grid.delta = 0.125
grid.hi = 1e5
grid.cap = 400
options.t = 1
options.compute_I = false
)";

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("config errors name the field") {
  CHECK(contains(error_of(std::string(kBase) + "grid.bogus = 1\n"), "grid.bogus"));
  CHECK(contains(error_of(std::string(kBase) + "grid.delta = 0.5\n"), "grid.delta"));
  std::string bad_family = kBase;
  bad_family.replace(bad_family.find("name = pareto"), 13, "name = cauchy");
  CHECK(contains(error_of(bad_family), "family"));
  CHECK(contains(error_of("provenance = prop_8_1\nfamily.name = coin\n"), "grid.n"));
  CHECK(contains(error_of(std::string(kBase) + "grid.spill = maybe\n"), "grid.spill"));
  CHECK(contains(error_of(std::string(kBase) + "mc.method = tilted_restricted\n"), "mc.method"));
  CHECK(contains(error_of(std::string(kBase) + "provenance = prop_10\n"), "provenance"));
  CHECK(contains(error_of(std::string(kBase) + "this line has no equals\n"), "line"));
  CHECK(error_of(kBase).empty());
}

TEST_CASE("family spec strings") {
  const auto k = parse_family_spec("pareto,alpha=2.5,standardize=unit_variance");
  CHECK(k.at("name") == "pareto");
  CHECK(k.at("alpha") == "2.5");
  const auto d = build_family(k);
  CHECK(d.mean() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.variance() == doctest::Approx(1.0).epsilon(1e-9));
  const auto lat = build_family({{"name", "lattice"}, {"atoms", "-1:0.5/2:0.5"}});
  CHECK(lat.tail(0.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(build_family({{"name", "lattice"}, {"atoms", "-1:0.5/2:0.4"}}), ConfigError);
  CHECK(parse_real("x", "inf") == dist::kInf);
  CHECK_THROWS_AS(parse_real("grid.hi", "ten"), ConfigError);
}

TEST_CASE("hash is stable and sensitive") {
  const auto a = parse_config(kBase);
  // Comments, spacing and key order do not matter.
  std::string reordered = "grid.n=5,10,20\n# moved\n";
  std::istringstream in(kBase);
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#' && !contains(line, "grid.n ")) reordered += line + "\n";
  const auto b = parse_config(reordered);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  auto c = a;
  set_key(c, "mc.seed", "2");
  CHECK(config_hash(a) != config_hash(c));
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("oracle run shapes and round trips") {
  const auto cfg = parse_config(kBase);
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 21);
  const auto csv = to_csv(rep);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  int lines = 1;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    CHECK(line.back() == ',');  // oracle rows carry no standard error
  }
  CHECK(lines == 22);
  CHECK(rep.boundaries.size() == 3);
  CHECK(rep.config_hash == config_hash(cfg));

  for (const auto& r : rep.rows) {
    CHECK(r.p_source == "oracle");
    CHECK(r.ratio == doctest::Approx(r.p_value / r.n_window_mass).epsilon(1e-14));
    REQUIRE(r.p_lower.has_value());
    CHECK(*r.p_lower <= r.p_value);
    CHECK(r.p_value <= *r.p_upper);
  }
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& p = rep.rows[i - 1];
    const auto& q = rep.rows[i];
    CHECK((p.n < q.n || (p.n == q.n && p.x <= q.x)));
  }

  // Summary recomputed from the rows by hand.
  for (const auto& s : rep.summary) {
    double sup = 0.0;
    for (const auto& r : rep.rows)
      if (r.n == s.n && r.x_over_boundary >= 1.0) sup = std::max(sup, std::abs(r.ratio - 1.0));
    REQUIRE(s.sup_abs_dev.has_value());
    CHECK(*s.sup_abs_dev == sup);
    CHECK(s.rows == 6);  // multiples >= 1
  }
  CHECK(summarize(rep.rows) == rep.summary);

  const auto back = report_from_json(nlohmann::json::parse(to_json(rep).dump()));
  CHECK(back == rep);
  CHECK(to_csv(back) == csv);

  // Deterministic across runs.
  CHECK(run_experiment(cfg) == rep);
}

TEST_CASE("non-finite values survive json") {
  CHECK(real_json(dist::kInf) == "inf");
  CHECK(real_json(-dist::kInf) == "-inf");
  CHECK(real_json(std::nan("")) == "nan");
  CHECK(real_from_json(real_json(dist::kInf)) == dist::kInf);
  CHECK(std::isnan(real_from_json(real_json(std::nan("")))));
  CHECK(real_from_json(real_json(0.1)) == 0.1);
  CHECK(fmt_real(0.1) == "0.10000000000000001");
}

TEST_CASE("mc rows and checks") {
  std::string text = kBase;
  text.replace(text.find("method = oracle"), 15, "method = both");
  text += "mc.samples = 20000\nmc.seed = 5\ncheck.sup_max = 10\n";
  text.replace(text.find("grid.n = 5,10,20"), 16, "grid.n = 5");
  const auto cfg = parse_config(text);
  const auto rep = run_experiment(cfg);
  CHECK(rep.rows.size() == 14);
  int mc_rows = 0;
  for (const auto& r : rep.rows)
    if (r.p_source == "mc:big_jump_cmc") {
      ++mc_rows;
      CHECK(r.std_error.has_value());
    }
  CHECK(mc_rows == 7);
  CHECK(check_report(cfg, rep).empty());
  CHECK(run_experiment(cfg, {3}) == rep);

  auto strict = cfg;
  set_key(strict, "check.sup_max", "1e-9");
  const auto failed = check_report(strict, rep);
  CHECK(!failed.empty());
}

TEST_CASE("golden: standardized pareto at three boundaries") {
  const auto cfg = parse_config(R"(
provenance = prop_8_1
family.name = pareto
family.alpha = 2.5
family.x_min = 1
family.standardize = unit_variance
grid.n = 100
grid.x_multiples = 3
grid.delta = 0.0625
grid.hi = 1e5
grid.cap = 2000
options.t = 1
options.compute_I = false
)");
  const auto rep = run_experiment(cfg);
  REQUIRE(rep.rows.size() == 1);
  CHECK(rep.rows[0].x_over_boundary == doctest::Approx(3.0));
  CHECK(rep.rows[0].ratio >= 0.8);
  CHECK(rep.rows[0].ratio <= 1.2);
}

TEST_CASE("diagnose") {
  const auto p = dist::make_family("pareto", {{"alpha", 2.5}, {"x_min", 1.0}});
  DiagnoseOptions o;
  o.ns = {10};
  o.grid.hi = 200.0;
  o.grid.delta = 0.25;
  const auto g = diagnose(p, o);
  REQUIRE(g.matuszewska.has_value());
  CHECK(g.matuszewska->upper == doctest::Approx(-2.5).epsilon(0.02));
  CHECK(g.matuszewska->lower == doctest::Approx(-2.5).epsilon(0.02));
  CHECK(g.long_tailed);
  CHECK(g.traces.size() >= 2);
  for (const auto& t : g.traces) {
    const auto csv = trace_csv(t);
    CHECK(csv.substr(0, csv.find('\n')).find(t.columns.front()) == 0);
  }

  const auto e = diagnose(dist::make_family("exponential", {{"c", 1.0}}), o);
  CHECK(!e.long_tailed);
  CHECK(contains(e.verdict, "not long-tailed"));

  const auto ln = diagnose(dist::make_family("lognormal_hazard", {{"beta", 2.0}, {"c", 0.5}}), o);
  CHECK(ln.sd.verdict == karamata::SdVerdict::pass_B1);
  CHECK(to_json(ln).at("sd_sufficient").at("verdict") == "pass_B1");
}
