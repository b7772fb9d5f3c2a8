#include "bigjump/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(__i386__)
#define BIGJUMP_X86 1
#include <immintrin.h>
#endif

namespace bigjump::simd {

namespace {

std::atomic<int> g_force_scalar{-1};  // -1: not yet read from the environment

bool force_scalar() {
  int v = g_force_scalar.load(std::memory_order_relaxed);
  if (v < 0) {
    const char* env = std::getenv("BIGJUMP_SIMD");
    v = (env != nullptr && std::strcmp(env, "scalar") == 0) ? 1 : 0;
    g_force_scalar.store(v, std::memory_order_relaxed);
  }
  return v == 1;
}

}  // namespace

bool avx2_available() {
#if defined(BIGJUMP_X86) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok;
#else
  return false;
#endif
}

void set_force_scalar(bool v) { g_force_scalar.store(v ? 1 : 0, std::memory_order_relaxed); }

Isa active_isa() { return (!force_scalar() && avx2_available()) ? Isa::avx2 : Isa::scalar; }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

namespace scalar {

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= a;
}

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double ar = a[2 * k], ai = a[2 * k + 1];
    const double br = b[2 * k], bi = b[2 * k + 1];
    out[2 * k] = ar * br - ai * bi;
    out[2 * k + 1] = ar * bi + ai * br;
  }
}

double clip_negative(double* v, std::size_t n) {
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] < 0.0) {
      worst = std::min(worst, v[i]);
      v[i] = 0.0;
    }
  }
  return worst;
}

double sum(const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += v[i];
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace scalar

namespace avx2 {

#if defined(BIGJUMP_X86) && (defined(__GNUC__) || defined(__clang__))

__attribute__((target("avx2,fma"))) void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += a * x[i];
}

__attribute__((target("avx2,fma"))) void scale(double a, double* v, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(v + i, _mm256_mul_pd(va, _mm256_loadu_pd(v + i)));
  for (; i < n; ++i) v[i] *= a;
}

__attribute__((target("avx2,fma"))) void complex_mul(const double* a, const double* b, double* out,
                                                      std::size_t n) {
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * k);  // ar0 ai0 ar1 ai1
    const __m256d vb = _mm256_loadu_pd(b + 2 * k);
    const __m256d br = _mm256_movedup_pd(vb);        // br0 br0 br1 br1
    const __m256d bi = _mm256_permute_pd(vb, 0xF);   // bi0 bi0 bi1 bi1
    const __m256d sw = _mm256_permute_pd(va, 0x5);   // ai0 ar0 ai1 ar1
    // even lanes: ar*br - ai*bi, odd lanes: ai*br + ar*bi
    const __m256d r = _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(sw, bi));
    _mm256_storeu_pd(out + 2 * k, r);
  }
  if (k < n) scalar::complex_mul(a + 2 * k, b + 2 * k, out + 2 * k, n - k);
}

__attribute__((target("avx2,fma"))) double clip_negative(double* v, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  __m256d worst = zero;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(v + i);
    worst = _mm256_min_pd(worst, x);
    _mm256_storeu_pd(v + i, _mm256_max_pd(x, zero));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, worst);
  double w = std::min(std::min(lanes[0], lanes[1]), std::min(lanes[2], lanes[3]));
  return std::min(w, scalar::clip_negative(v + i, n - i));
}

__attribute__((target("avx2,fma"))) static double hsum(__m256d acc) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

__attribute__((target("avx2,fma"))) double sum(const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(v + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += v[i];
  return s;
}

__attribute__((target("avx2,fma"))) double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

#else

void axpy(double a, const double* x, double* y, std::size_t n) { scalar::axpy(a, x, y, n); }
void scale(double a, double* v, std::size_t n) { scalar::scale(a, v, n); }
void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
  scalar::complex_mul(a, b, out, n);
}
double clip_negative(double* v, std::size_t n) { return scalar::clip_negative(v, n); }
double sum(const double* v, std::size_t n) { return scalar::sum(v, n); }
double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }

#endif

}  // namespace avx2

void axpy(double a, const double* x, double* y, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::axpy(a, x, y, n);
  scalar::axpy(a, x, y, n);
}

void scale(double a, double* v, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::scale(a, v, n);
  scalar::scale(a, v, n);
}

void complex_mul(const double* a, const double* b, double* out, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::complex_mul(a, b, out, n);
  scalar::complex_mul(a, b, out, n);
}

double clip_negative(double* v, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::clip_negative(v, n);
  return scalar::clip_negative(v, n);
}

double sum(const double* v, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::sum(v, n);
  return scalar::sum(v, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  if (active_isa() == Isa::avx2) return avx2::dot(a, b, n);
  return scalar::dot(a, b, n);
}

void convolve_direct(const double* p, std::size_t np, const double* q, std::size_t nq, double* out) {
  if (np == 0 || nq == 0) return;
  std::fill(out, out + np + nq - 1, 0.0);
  // Sweep the longer operand so each axpy call is long.
  const bool swap = np > nq;
  const double* s = swap ? q : p;
  const double* l = swap ? p : q;
  const std::size_t ns = swap ? nq : np;
  const std::size_t nl = swap ? np : nq;
  for (std::size_t i = 0; i < ns; ++i) {
    if (s[i] != 0.0) axpy(s[i], l, out + i, nl);
  }
}

}  // namespace bigjump::simd
