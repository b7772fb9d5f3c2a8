#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>

#include "bigjump/dist/step_distribution.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/lattice/cache.hpp"
#include "bigjump/lattice/lattice_pmf.hpp"
#include "bigjump/lattice/oracle.hpp"
#include "bigjump/numeric/quadrature.hpp"

using namespace bigjump;
using lattice::kInf;
using lattice::LatticePMF;

namespace {

double binom_pmf(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) - n * std::log(2.0));
}

dist::StepDistribution pareto25() { return dist::make_family("pareto", {{"alpha", 2.5}, {"x_min", 1.0}}); }

LatticePMF pmf(double origin, double delta, std::vector<double> m) {
  LatticePMF p;
  p.origin = origin;
  p.delta = delta;
  p.masses = std::move(m);
  return p;
}

// Law of S_n by brute-force enumeration of atoms, restricted by keep().
template <class Keep>
std::map<long long, double> enumerate(const std::vector<std::pair<long long, double>>& atoms, int n, Keep keep) {
  std::map<long long, double> law{{0, 1.0}};
  for (int i = 0; i < n; ++i) {
    std::map<long long, double> next;
    for (const auto& [s, p] : law)
      for (const auto& [v, q] : atoms)
        if (keep(v)) next[s + v] += p * q;
    law = std::move(next);
  }
  return law;
}

}  // namespace

TEST_CASE("discretize: right-endpoint cells and spills") {
  const auto d = pareto25();
  const auto p = lattice::discretize(d, 0.25, 1.0, 50.0);
  CHECK(p.origin == doctest::Approx(1.25));
  for (std::size_t k = 0; k < p.size(); k += 17)
    CHECK(p.masses[k] == doctest::Approx(d.window_mass(1.0 + 0.25 * double(k), 0.25)).epsilon(1e-13));
  CHECK(p.spill_high == doctest::Approx(std::pow(50.0, -2.5)).epsilon(1e-13));
  CHECK(std::abs(p.total_mass() - 1.0) < 1e-13);
  // Exact tails at grid points.
  for (double x : {1.0, 2.0, 7.5, 40.0}) {
    const auto t = p.tail(x);
    CHECK(t.lower <= d.tail(x) * (1.0 + 1e-12));
    CHECK(t.upper >= d.tail(x) * (1.0 - 1e-12));
    CHECK(t.lower == doctest::Approx(d.tail(x)).epsilon(1e-12));
  }
}

TEST_CASE("convolution: fft and direct agree; binomial n-fold") {
  const auto d = pareto25();
  const auto p = lattice::discretize(d, 0.1, 1.0, 80.0);
  lattice::ConvOptions direct, fft;
  direct.method = lattice::ConvMethod::direct;
  fft.method = lattice::ConvMethod::fft;
  const auto a = lattice::convolve(p, p, direct), b = lattice::convolve(p, p, fft);
  REQUIRE(a.size() == b.size());
  CHECK(a.origin == doctest::Approx(b.origin));
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.masses[k] - b.masses[k]));
  CHECK(worst < 1e-13);
  // Conservation: grid + spills = 1.
  CHECK(std::abs(a.total_mass() - 1.0) < 1e-12);
  CHECK(std::abs(b.total_mass() - 1.0) < 1e-12);

  const auto coin = pmf(0.0, 1.0, {0.5, 0.5});
  for (int n : {1, 2, 7, 40}) {
    const auto s = lattice::nfold(coin, n);
    REQUIRE(s.size() == std::size_t(n + 1));
    for (int k = 0; k <= n; ++k) CHECK(s.masses[std::size_t(k)] == doctest::Approx(binom_pmf(n, k)).epsilon(1e-10));
  }
}

TEST_CASE("restricted walk against enumeration") {
  // Atoms -1, 0, 1, 2 on unit grid.
  const std::vector<std::pair<long long, double>> atoms = {{-1, 0.3}, {0, 0.2}, {1, 0.3}, {2, 0.2}};
  const auto p = pmf(-1.0, 1.0, {0.3, 0.2, 0.3, 0.2});
  for (bool two : {false, true}) {
    const auto r = lattice::restricted_walk(p, 1.0, 4, two);
    const auto ref = enumerate(atoms, 4, [&](long long v) { return v <= 1 && (!two || v >= -1); });
    for (const auto& [s, q] : ref) {
      const double pos = double(s);
      CHECK(r.grid_sum(pos - 0.5, pos + 0.5) == doctest::Approx(q).epsilon(1e-13));
    }
  }
}

TEST_CASE("sum oracle on lattice laws is exact") {
  const auto coin = dist::make_family("coin", {});
  lattice::GridSpec g;
  g.delta = 1.0;
  g.lo = -1.0;
  g.hi = 5.0;
  const lattice::SumOracle o(coin, 5, g);
  CHECK(o.lattice_exact());
  const auto q = o.tail(2.5);
  CHECK(q.exact);
  double ref = 0.0;
  for (int k = 3; k <= 5; ++k) ref += binom_pmf(5, k);
  CHECK(q.point == doctest::Approx(ref).epsilon(1e-14));
  // Atom exactly on x stays on the correct side.
  CHECK(o.tail(2.0).point == doctest::Approx(ref).epsilon(1e-14));
  CHECK(o.tail(1.999).point == doctest::Approx(ref + binom_pmf(5, 2)).epsilon(1e-14));
  CHECK(o.query(1.5, 1.0).point == doctest::Approx(binom_pmf(5, 2)).epsilon(1e-14));
  CHECK_THROWS_AS(o.query(1.5, 0.5), ConfigError);

  // Restricted version: all steps <= 0 leaves S_5 = 0.
  const lattice::SumOracle r(coin, 5, g, 0.0);
  CHECK(r.tail(-0.5).point == doctest::Approx(std::pow(0.5, 5)).epsilon(1e-14));
  CHECK(r.tail(0.5).point == 0.0);
}

TEST_CASE("sum oracle brackets an independent quadrature of P{S_2 > x}") {
  const auto d = pareto25();
  auto exact = [&](double x) {
    // P{xi_1 + xi_2 > x} = P{xi_1 > x - 1} + int_1^{x-1} Fbar(x - y) f(y) dy
    auto f = [&](double y) { return std::pow(x - y, -2.5) * 2.5 * std::pow(y, -3.5); };
    return std::pow(x - 1.0, -2.5) + numeric::integrate_pieces(f, 1.0, x - 1.0, {x / 2.0}, 1e-12).value;
  };
  double prev_width = kInf;
  for (double delta : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    lattice::GridSpec g;
    g.delta = delta;
    g.lo = 1.0;
    g.hi = 2000.0;
    const lattice::SumOracle o(d, 2, g);
    double width = 0.0;
    for (double x : {5.0, 12.5, 40.0, 150.0}) {
      CAPTURE(x);
      const auto q = o.query(x, kInf, lattice::SpillMode::bound);
      const double e = exact(x);
      CHECK(q.lower <= e * (1 + 1e-12));
      CHECK(q.upper >= e * (1 - 1e-12));
      CHECK(q.point == doctest::Approx(e).epsilon(2e-3));
      width = std::max(width, (q.upper - q.lower) / e);
    }
    CHECK(width < prev_width);
    prev_width = width;
  }
}

TEST_CASE("epsilon / eta against enumeration on a small lattice") {
  // Law on the unit grid: P{k} for k = -3..6.
  const std::vector<double> m = {0.05, 0.05, 0.1, 0.2, 0.2, 0.15, 0.1, 0.07, 0.05, 0.03};
  const auto p = pmf(-3.0, 1.0, m);
  std::vector<std::pair<long long, double>> atoms;
  for (std::size_t i = 0; i < m.size(); ++i) atoms.push_back({(long long)i - 3, m[i]});
  const double h = 2.0, K = 1.0;
  for (double T : {kInf, 1.0}) {
    auto F = [&](long long x) {
      double s = 0.0;
      for (const auto& [v, q] : atoms)
        if (v > x && (T == kInf || v <= x + (long long)T)) s += q;
      return s;
    };
    for (int k : {2, 3}) {
      // epsilon: all steps > h.
      const auto le = enumerate(atoms, k, [&](long long v) { return v > h; });
      // eta: first step free, the rest < -K.
      std::map<long long, double> lh;
      for (const auto& [v, q] : atoms) {
        for (const auto& [s, r] : enumerate(atoms, k - 1, [&](long long u) { return u < -K; })) lh[v + s] += q * r;
      }
      auto sup = [&](const std::map<long long, double>& law) {
        double best = 0.0;
        for (long long x = (long long)h; x < 7; ++x) {
          const double den = F(x);
          if (!(den > 0.0)) continue;
          double num = 0.0;
          for (const auto& [s, q] : law)
            if (s > x && (T == kInf || s <= x + (long long)T)) num += q;
          best = std::max(best, num / den);
        }
        return best;
      };
      CAPTURE(k);
      CAPTURE(T);
      CHECK(lattice::epsilon_eta(p, h, K, k, T, lattice::EpsVariant::epsilon) ==
            doctest::Approx(sup(le)).epsilon(1e-13));
      CHECK(lattice::epsilon_eta(p, h, K, k, T, lattice::EpsVariant::eta) == doctest::Approx(sup(lh)).epsilon(1e-13));
    }
  }
}

TEST_CASE("property: epsilon_k <= epsilon_2^(k-1)") {
  const auto p = lattice::discretize(pareto25(), 0.05, 1.0, 200.0);
  for (double h : {5.0, 10.0}) {
    for (double T : {kInf, 1.0}) {
      const auto e = lattice::epsilon_eta_series(p, h, 1.0, 4, T, lattice::EpsVariant::epsilon);
      for (int k = 3; k <= 4; ++k)
        CHECK(e[std::size_t(k - 2)] <= std::pow(e[0], k - 1) * (1 + 1e-12));
    }
  }
}

TEST_CASE("law cache round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "bigjump_test_cache";
  std::filesystem::remove_all(dir);
  const lattice::LawCache c(dir.string());
  auto p = lattice::discretize(pareto25(), 0.5, 1.0, 30.0);
  CHECK_FALSE(c.load("k").has_value());
  c.store("k", p);
  const auto q = c.load("k");
  REQUIRE(q.has_value());
  CHECK(q->masses == p.masses);
  CHECK(q->origin == p.origin);
  CHECK(q->spill_high == p.spill_high);
  CHECK(q->high_floor == p.high_floor);
  CHECK_FALSE(c.load("other").has_value());
  // A cached oracle reproduces the uncached one bit for bit.
  lattice::GridSpec g;
  g.delta = 0.125;
  g.lo = 1.0;
  g.hi = 100.0;
  const lattice::SumOracle a(pareto25(), 4, g, kInf, &c), b(pareto25(), 4, g, kInf, &c), u(pareto25(), 4, g);
  CHECK(a.tail(20.0, lattice::SpillMode::bound).point == b.tail(20.0, lattice::SpillMode::bound).point);
  CHECK(a.tail(20.0, lattice::SpillMode::bound).point == u.tail(20.0, lattice::SpillMode::bound).point);
  std::filesystem::remove_all(dir);
}

TEST_CASE("strict mode refuses large off-grid mass") {
  lattice::GridSpec g;
  g.delta = 0.25;
  g.lo = 1.0;
  g.hi = 4.0;
  const lattice::SumOracle o(pareto25(), 6, g);
  CHECK_THROWS_AS(o.tail(30.0, lattice::SpillMode::strict), SpillError);
  const auto q = o.tail(30.0, lattice::SpillMode::bound);
  CHECK(q.lower <= q.point);
  CHECK(q.point <= q.upper);
  CHECK(q.spill_uncertainty > 0.0);
}
