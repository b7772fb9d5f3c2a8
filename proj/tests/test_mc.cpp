#include <doctest.h>

#include <cmath>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/dist/tilted.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/lattice/oracle.hpp"
#include "bigjump/mc/estimators.hpp"
#include "bigjump/seqs/boundary.hpp"

using namespace bigjump;
using dist::kInf;

namespace {

dist::StepDistribution coin() { return dist::make_family("coin", {}); }
dist::StepDistribution std_pareto() {
  return dist::standardize(dist::make_family("pareto", {{"alpha", 2.5}, {"x_min", 1.0}}));
}

lattice::GridSpec pareto_grid(double cap) {
  lattice::GridSpec g;
  g.delta = 1.0 / 32;
  g.lo = std::floor(std_pareto().support_low() * 32.0) / 32.0;
  g.hi = 1e5;
  g.cap = cap;
  return g;
}

}  // namespace

TEST_CASE("plain estimator") {
  const auto r = mc::plain_tail(coin(), 2, 0.5, kInf, 1000000, 1);
  CHECK(std::abs(r.estimate - 0.75) <= 3.0 * r.std_error);
  CHECK(r.std_error == doctest::Approx(std::sqrt(0.75 * 0.25 / 1e6)).epsilon(0.01));
  CHECK(r.method == mc::Method::plain);
  CHECK(r.samples == 1000000);
  const auto again = mc::plain_tail(coin(), 2, 0.5, kInf, 1000000, 1);
  CHECK(again.estimate == r.estimate);
  CHECK(again.std_error == r.std_error);
  CHECK_THROWS_AS(mc::plain_tail(coin(), 2, 0.5, kInf, 99, 1), ConfigError);
  // Window: P{S_2 in (0.5, 1.5]} = 1/2.
  const auto w = mc::plain_tail(coin(), 2, 0.5, 1.0, 200000, 3);
  CHECK(std::abs(w.estimate - 0.5) <= 3.29 * w.std_error);
}

TEST_CASE("worker count does not change results") {
  for (unsigned t : {2u, 3u, 0u}) {
    const auto a = mc::big_jump_cmc(std_pareto(), 10, 30.0, 50000, 77, {1});
    const auto b = mc::big_jump_cmc(std_pareto(), 10, 30.0, 50000, 77, {t});
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_error == b.std_error);
    const auto c = mc::plain_tail(std_pareto(), 10, 3.0, 1.0, 50000, 77, {1});
    const auto d = mc::plain_tail(std_pareto(), 10, 3.0, 1.0, 50000, 77, {t});
    CHECK(c.estimate == d.estimate);
  }
}

TEST_CASE("big-jump conditional estimator") {
  const auto p = dist::make_family("pareto", {{"alpha", 2.5}, {"x_min", 1.0}});
  const auto one = mc::big_jump_cmc(p, 1, 7.0, 1000, 5);
  CHECK(one.estimate == doctest::Approx(p.tail(7.0)).epsilon(1e-15));
  CHECK(one.std_error == 0.0);

  // Coin n=2: Z = 1 when xi_1 = 0, 1/2 when xi_1 = 1 (tie at the maximum), so E Z = 3/4.
  const auto c = mc::big_jump_cmc(coin(), 2, 0.5, 200000, 11);
  CHECK(std::abs(c.estimate - 0.75) <= 3.29 * c.std_error);
  CHECK(c.std_error == doctest::Approx(0.25 / std::sqrt(2e5)).epsilon(0.01));
  // Values lie in [0, n].
  const auto big = mc::big_jump_cmc(coin(), 5, -10.0, 1000, 2);
  CHECK(big.estimate <= 5.0);
  CHECK(big.estimate >= 0.0);
}

TEST_CASE("estimators agree with the lattice oracle") {
  const auto d = std_pareto();
  seqs::BoundaryOptions o;
  o.t = 1.0;
  o.compute_I = false;
  const auto b = seqs::boundary(d, seqs::Provenance::prop_8_1, 20, o);
  const double x = b.J_n;
  const lattice::SumOracle orc(d, 20, pareto_grid(3.0 * x + 50.0));
  const double ref = orc.tail(x).point;
  const auto pl = mc::plain_tail(d, 20, x, kInf, 400000, 8);
  CHECK(std::abs(pl.estimate - ref) <= 3.29 * pl.std_error);
  const auto cm = mc::big_jump_cmc(d, 20, x, 100000, 8);
  CHECK(std::abs(cm.estimate - ref) <= 3.29 * cm.std_error);

  // Coin, n=5: exact binomial tail 6/32 at x = 3.
  const auto cc = mc::big_jump_cmc(coin(), 5, 3.0, 100000, 4);
  CHECK(std::abs(cc.estimate - 6.0 / 32.0) <= 3.29 * cc.std_error);
}

TEST_CASE("tilted estimator") {
  // One-step identity on a lattice law, by direct summation.
  const auto lat = dist::make_lattice({{-1.0, 0.2}, {0.5, 0.3}, {1.0, 0.25}, {2.5, 0.15}, {4.0, 0.1}});
  const double h = 2.5;
  const auto t = dist::tilt_truncate(lat, h);
  for (double x : {-2.0, 0.0, 0.75}) {
    for (double T : {1.0, 2.0, kInf}) {
      const double b = T == kInf ? kInf : x + T;
      const double lhs = t.phi() * t.expect([h](double y) { return std::exp(-y / h); }, x, b);
      double rhs = 0.0;
      for (const auto& a : lat.atoms())
        if (a.value > x && a.value <= b && a.value <= h) rhs += a.prob;
      CHECK(std::abs(lhs - rhs) <= 1e-12);
    }
  }

  // Coin, h=2, n=5, x=3 against the restricted oracle.
  lattice::GridSpec g;
  g.delta = 1.0;
  g.lo = -1.0;
  g.hi = 4.0;
  const double ref = lattice::SumOracle(coin(), 5, g, 2.0).tail(3.0).point;
  const auto r = mc::tilted_restricted(coin(), 2.0, 5, 3.0, kInf, 100000, 6);
  CHECK(std::abs(r.estimate - ref) <= 3.29 * r.std_error);
  CHECK(r.estimate > 0.0);
  CHECK(r.estimate <= std::pow(dist::tilt_truncate(coin(), 2.0).phi(), 5));

  // Restriction that bites: steps <= 3 for standardized pareto.
  const auto d = std_pareto();
  lattice::GridSpec pg = pareto_grid(kInf);
  pg.hi = 10.0;
  const double rr = lattice::SumOracle(d, 8, pg, 3.0).tail(6.0, lattice::SpillMode::bound).point;
  const auto rt = mc::tilted_restricted(d, 3.0, 8, 6.0, kInf, 100000, 9);
  CHECK(std::abs(rt.estimate - rr) <= 3.29 * rt.std_error + 1e-4 * rr);
}

TEST_CASE("desk-scale unbiasedness over seeds") {
  int ok_plain = 0, ok_cmc = 0;
  const int R = 200;
  for (int s = 0; s < R; ++s) {
    const auto a = mc::plain_tail(coin(), 5, 3.0, kInf, 2000, std::uint64_t(s));
    const auto b = mc::big_jump_cmc(coin(), 5, 3.0, 2000, std::uint64_t(s));
    ok_plain += std::abs(a.estimate - 6.0 / 32.0) <= 3.29 * a.std_error;
    ok_cmc += std::abs(b.estimate - 6.0 / 32.0) <= 3.29 * b.std_error;
  }
  CHECK(ok_plain >= R * 97 / 100);
  CHECK(ok_cmc >= R * 97 / 100);
}

TEST_CASE("json") {
  const auto r = mc::plain_tail(coin(), 2, 0.5, kInf, 1000, 99);
  const auto j = mc::to_json(r);
  CHECK(j.at("method") == "plain");
  CHECK(j.at("seed") == 99);
  CHECK(j.at("estimate").get<double>() == r.estimate);
  CHECK(mc::parse_method("big_jump_cmc") == mc::Method::big_jump_cmc);
  CHECK_THROWS_AS(mc::parse_method("splitting"), ConfigError);
}
