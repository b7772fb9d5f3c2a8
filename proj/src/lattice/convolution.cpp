#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "bigjump/errors.hpp"
#include "bigjump/lattice/lattice_pmf.hpp"
#include "bigjump/simd/kernels.hpp"

namespace bigjump::lattice {

namespace {

struct Plans {
  fftw_plan forward;
  fftw_plan backward;
};

std::mutex g_plan_mutex;
std::map<std::size_t, Plans>& plan_cache() {
  static std::map<std::size_t, Plans> cache;
  return cache;
}

// Planning is not thread-safe in FFTW; execution with new arrays is.
Plans plans_for(std::size_t n) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  double* r = fftw_alloc_real(n);
  fftw_complex* c = fftw_alloc_complex(n / 2 + 1);
  Plans p;
  p.forward = fftw_plan_dft_r2c_1d(int(n), r, c, FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_1d(int(n), c, r, FFTW_ESTIMATE);
  fftw_free(r);
  fftw_free(c);
  cache.emplace(n, p);
  return p;
}

std::size_t fft_size(std::size_t len) {
  std::size_t n = 1;
  while (n < len) n <<= 1;
  return n;
}

struct RealBuf {
  double* p;
  explicit RealBuf(std::size_t n) : p(fftw_alloc_real(n)) {}
  ~RealBuf() { fftw_free(p); }
};
struct ComplexBuf {
  fftw_complex* p;
  explicit ComplexBuf(std::size_t n) : p(fftw_alloc_complex(n)) {}
  ~ComplexBuf() { fftw_free(p); }
};

// Clip threshold for FFT round-off on normalised inputs.
constexpr double kClip = 1e-13;

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t len = a.size() + b.size() - 1;
  const std::size_t n = fft_size(len);
  const Plans plans = plans_for(n);
  RealBuf ra(n), rb(n);
  ComplexBuf ca(n / 2 + 1), cb(n / 2 + 1);
  std::fill(ra.p, ra.p + n, 0.0);
  std::fill(rb.p, rb.p + n, 0.0);
  std::copy(a.begin(), a.end(), ra.p);
  std::copy(b.begin(), b.end(), rb.p);
  fftw_execute_dft_r2c(plans.forward, ra.p, ca.p);
  fftw_execute_dft_r2c(plans.forward, rb.p, cb.p);
  simd::complex_mul(&ca.p[0][0], &cb.p[0][0], &ca.p[0][0], n / 2 + 1);
  fftw_execute_dft_c2r(plans.backward, ca.p, ra.p);
  simd::scale(1.0 / double(n), ra.p, len);
  const double worst = simd::clip_negative(ra.p, len);
  // Inputs carry total mass <= 1 per operand; round-off beyond this signals a broken input.
  double scale_ab = 0.0;
  for (double v : a) scale_ab = std::max(scale_ab, v);
  double mb = 0.0;
  for (double v : b) mb = std::max(mb, v);
  scale_ab = std::max(scale_ab * mb * double(std::min(a.size(), b.size())), 1.0);
  if (worst < -kClip * scale_ab) throw NumericalError("convolve: FFT round-off exceeded the clip bound");
  return std::vector<double>(ra.p, ra.p + len);
}

std::vector<double> direct_convolve(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1);
  simd::convolve_direct(a.data(), a.size(), b.data(), b.size(), out.data());
  return out;
}

double sum_of(const std::vector<double>& v) { return simd::sum(v.data(), v.size()); }

}  // namespace

LatticePMF convolve(const LatticePMF& p, const LatticePMF& q, const ConvOptions& opt) {
  if (std::abs(p.delta - q.delta) > 1e-12 * std::max(p.delta, q.delta))
    throw ConfigError("convolve: mismatched grid steps");
  if (p.masses.empty() || q.masses.empty()) throw ConfigError("convolve: empty grid");
  LatticePMF r;
  r.delta = p.delta;
  r.origin = p.origin + q.origin;
  if (p.size() + q.size() - 1 > opt.max_cells) throw NumericalError("convolve: grid overflow (result exceeds max cells)");

  ConvMethod m = opt.method;
  if (m == ConvMethod::automatic) {
    const double work = double(p.size()) * double(q.size());
    m = (std::min(p.size(), q.size()) <= 64 || work <= 4e6) ? ConvMethod::direct : ConvMethod::fft;
  }
  r.masses = m == ConvMethod::direct ? direct_convolve(p.masses, q.masses) : fft_convolve(p.masses, q.masses);

  // Spill propagation. Grid extents: positions of the first and last cells.
  const double gp = sum_of(p.masses), gq = sum_of(q.masses);
  const double p_min = p.position(0), p_max = p.position(p.size() - 1);
  const double q_min = q.position(0), q_max = q.position(q.size() - 1);

  double high = 0.0, floor = kInf;
  auto add_high = [&](double mass, double f) {
    if (mass <= 0.0) return;
    high += mass;
    floor = std::min(floor, f);
  };
  add_high(p.spill_high * gq, p.high_floor + q_min);
  add_high(q.spill_high * gp, q.high_floor + p_min);
  add_high(p.spill_high * q.spill_high, p.high_floor + q.high_floor);

  double low = 0.0, ceiling = -kInf;
  auto add_low = [&](double mass, double c) {
    if (mass <= 0.0) return;
    low += mass;
    ceiling = std::max(ceiling, c);
  };
  add_low(p.spill_low * gq, p.low_ceiling + q_max);
  add_low(q.spill_low * gp, q.low_ceiling + p_max);
  add_low(p.spill_low * q.spill_low, p.low_ceiling + q.low_ceiling);

  double unresolved = p.spill_high * q.spill_low + p.spill_low * q.spill_high;
  const double pt = p.total_mass(), qt = q.total_mass();
  unresolved += p.unresolved * qt + q.unresolved * pt - p.unresolved * q.unresolved;

  // Caps move grid cells into the spills.
  if (opt.cap_high < kInf) {
    const std::size_t k = r.first_above(opt.cap_high);
    if (k < r.size()) {
      double moved = 0.0;
      for (std::size_t i = k; i < r.size(); ++i) moved += r.masses[i];
      r.masses.resize(std::max<std::size_t>(k, 1));
      if (k == 0) r.masses[0] = 0.0;
      add_high(moved, opt.cap_high);
    }
  }
  if (opt.cap_low > -kInf) {
    // Positions strictly below cap_low.
    const double rr = (opt.cap_low - r.origin) / r.delta - 1e-9;
    if (rr > 0.0) {
      const std::size_t k = std::min(r.size(), std::size_t(std::ceil(rr)));
      if (k > 0) {
        double moved = 0.0;
        for (std::size_t i = 0; i < k; ++i) moved += r.masses[i];
        add_low(moved, r.position(k - 1));
        if (k >= r.size()) {
          r.masses.assign(1, 0.0);
          r.origin = r.position(r.size() - 1);
        } else {
          r.masses.erase(r.masses.begin(), r.masses.begin() + std::ptrdiff_t(k));
          r.origin += double(k) * r.delta;
        }
      }
    }
  }
  r.spill_high = high;
  r.high_floor = high > 0.0 ? floor : kInf;
  r.spill_low = low;
  r.low_ceiling = low > 0.0 ? ceiling : -kInf;
  r.unresolved = unresolved;
  return r;
}

LatticePMF nfold(const LatticePMF& p, int n, const ConvOptions& opt) {
  if (n < 1) throw ConfigError("nfold: n must be >= 1");
  LatticePMF base = p;
  LatticePMF acc;
  bool have = false;
  while (n > 0) {
    if (n & 1) {
      acc = have ? convolve(acc, base, opt) : base;
      have = true;
    }
    n >>= 1;
    if (n > 0) base = convolve(base, base, opt);
  }
  return acc;
}

}  // namespace bigjump::lattice
