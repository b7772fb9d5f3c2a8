#include <doctest.h>

#include <cmath>
#include <complex>
#include <string>
#include <random>
#include <vector>

#include "bigjump/simd/kernels.hpp"

using namespace bigjump;

namespace {

std::vector<double> random_vec(std::size_t n, unsigned seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 g(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

// Lengths around the 4-lane width and its tails.
const std::size_t kLens[] = {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 63, 1000, 4099};

}  // namespace

TEST_CASE("isa reporting") {
  CHECK(std::string(simd::isa_name(simd::Isa::scalar)) == "scalar");
  CHECK(std::string(simd::isa_name(simd::Isa::avx2)) == "avx2");
  if (!simd::avx2_available()) CHECK(simd::active_isa() == simd::Isa::scalar);
  simd::set_force_scalar(true);
  CHECK(simd::active_isa() == simd::Isa::scalar);
  simd::set_force_scalar(false);
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (!simd::avx2_available()) {
    MESSAGE("AVX2 not available; equivalence test skipped");
    return;
  }
  for (std::size_t n : kLens) {
    CAPTURE(n);
    const auto x = random_vec(n, 1 + unsigned(n)), y0 = random_vec(n, 100 + unsigned(n));

    auto ys = y0, ya = y0;
    simd::scalar::axpy(0.37, x.data(), ys.data(), n);
    simd::avx2::axpy(0.37, x.data(), ya.data(), n);
    for (std::size_t i = 0; i < n; ++i) CHECK(ya[i] == doctest::Approx(ys[i]).epsilon(1e-15));

    auto ss = x, sa = x;
    simd::scalar::scale(-2.5, ss.data(), n);
    simd::avx2::scale(-2.5, sa.data(), n);
    CHECK(ss == sa);

    auto cs = x, ca = x;
    const double ms = simd::scalar::clip_negative(cs.data(), n);
    const double ma = simd::avx2::clip_negative(ca.data(), n);
    CHECK(cs == ca);
    CHECK(ms == ma);

    const double sum_s = simd::scalar::sum(x.data(), n), sum_a = simd::avx2::sum(x.data(), n);
    CHECK(std::abs(sum_s - sum_a) <= 1e-13 * std::max(1.0, double(n)));
    const double dot_s = simd::scalar::dot(x.data(), y0.data(), n), dot_a = simd::avx2::dot(x.data(), y0.data(), n);
    CHECK(std::abs(dot_s - dot_a) <= 1e-13 * std::max(1.0, double(n)));
  }
}

TEST_CASE("complex product: avx2 matches scalar, aliasing allowed") {
  if (!simd::avx2_available()) return;
  for (std::size_t n : kLens) {
    const auto a = random_vec(2 * n, 7), b = random_vec(2 * n, 8);
    std::vector<double> os(2 * n), oa(2 * n);
    simd::scalar::complex_mul(a.data(), b.data(), os.data(), n);
    simd::avx2::complex_mul(a.data(), b.data(), oa.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(oa[i] == doctest::Approx(os[i]).epsilon(1e-14));
    auto alias = a;
    simd::avx2::complex_mul(alias.data(), b.data(), alias.data(), n);
    for (std::size_t i = 0; i < 2 * n; ++i) CHECK(alias[i] == doctest::Approx(os[i]).epsilon(1e-14));
  }
}

TEST_CASE("complex product scalar reference against std::complex") {
  const auto a = random_vec(10, 3), b = random_vec(10, 4);
  std::vector<double> o(10);
  simd::scalar::complex_mul(a.data(), b.data(), o.data(), 5);
  for (int k = 0; k < 5; ++k) {
    const std::complex<double> z = std::complex<double>(a[2 * k], a[2 * k + 1]) * std::complex<double>(b[2 * k], b[2 * k + 1]);
    CHECK(o[2 * k] == doctest::Approx(z.real()).epsilon(1e-15));
    CHECK(o[2 * k + 1] == doctest::Approx(z.imag()).epsilon(1e-15));
  }
}

TEST_CASE("direct convolution against a naive double loop, both paths") {
  const auto p = random_vec(37, 11, 0.0, 1.0), q = random_vec(53, 12, 0.0, 1.0);
  std::vector<double> ref(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) ref[i + j] += p[i] * q[j];
  for (bool force : {true, false}) {
    simd::set_force_scalar(force);
    std::vector<double> out(ref.size(), -1.0);
    simd::convolve_direct(p.data(), p.size(), q.data(), q.size(), out.data());
    for (std::size_t k = 0; k < ref.size(); ++k) CHECK(out[k] == doctest::Approx(ref[k]).epsilon(1e-13));
  }
  simd::set_force_scalar(false);
}
