#pragma once

#include <cstddef>

// Inner loops of the lattice convolution. Each kernel has a scalar reference
// and an AVX2+FMA variant; the dispatching entry points pick one at runtime.
namespace bigjump::simd {

enum class Isa { scalar, avx2 };

bool avx2_available();
Isa active_isa();
const char* isa_name(Isa isa);

// Force the scalar path regardless of CPU support. Also honoured through the
// BIGJUMP_SIMD=scalar environment variable at first use.
void set_force_scalar(bool v);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);
// v[i] *= a
void scale(double a, double* v, std::size_t n);
// Interleaved complex product out[k] = a[k] * b[k], n complex values. out may alias a or b.
void complex_mul(const double* a, const double* b, double* out, std::size_t n);
// Sets negative entries to zero and returns the most negative value seen (0 if none).
double clip_negative(double* v, std::size_t n);
double sum(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
// out[k] = sum_i p[i] q[k - i], out has np + nq - 1 cells and is overwritten.
void convolve_direct(const double* p, std::size_t np, const double* q, std::size_t nq, double* out);

namespace scalar {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* v, std::size_t n);
void complex_mul(const double* a, const double* b, double* out, std::size_t n);
double clip_negative(double* v, std::size_t n);
double sum(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

namespace avx2 {
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* v, std::size_t n);
void complex_mul(const double* a, const double* b, double* out, std::size_t n);
double clip_negative(double* v, std::size_t n);
double sum(const double* v, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2

}  // namespace bigjump::simd
