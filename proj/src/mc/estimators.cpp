#include "bigjump/mc/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

#include "bigjump/dist/tilted.hpp"
#include "bigjump/errors.hpp"
#include "bigjump/rng/philox.hpp"

namespace bigjump::mc {

const char* method_name(Method m) {
  switch (m) {
    case Method::plain: return "plain";
    case Method::big_jump_cmc: return "big_jump_cmc";
    case Method::tilted_restricted: return "tilted_restricted";
  }
  return "?";
}

Method parse_method(const std::string& s) {
  if (s == "plain") return Method::plain;
  if (s == "big_jump_cmc") return Method::big_jump_cmc;
  if (s == "tilted_restricted") return Method::tilted_restricted;
  throw ConfigError("unknown mc method '" + s + "' (plain, big_jump_cmc, tilted_restricted)");
}

namespace {

struct Stats {
  double count = 0.0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations
};

Stats merge(const Stats& a, const Stats& b) {
  if (a.count == 0.0) return b;
  if (b.count == 0.0) return a;
  Stats r;
  r.count = a.count + b.count;
  const double delta = b.mean - a.mean;
  r.mean = a.mean + delta * (b.count / r.count);
  r.m2 = a.m2 + b.m2 + delta * delta * (a.count * b.count / r.count);
  return r;
}

Stats reduce(const std::vector<Stats>& v, std::size_t lo, std::size_t hi) {
  if (hi - lo == 1) return v[lo];
  const std::size_t mid = lo + (hi - lo) / 2;
  return merge(reduce(v, lo, mid), reduce(v, mid, hi));
}

// Runs sample(Stream&) for every index in [0, samples) and returns the
// merged statistics; the chunk layout and merge order are fixed.
template <class F>
Stats run(std::uint64_t samples, std::uint64_t seed, std::uint32_t stream, unsigned threads, const F& sample) {
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Stats> part(chunks);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) {
      Stats s;
      const std::uint64_t end = std::min(samples, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) {
        rng::Stream st(seed, stream, i);
        const double v = sample(st);
        s.count += 1.0;
        const double delta = v - s.mean;
        s.mean += delta / s.count;
        s.m2 += delta * (v - s.mean);
      }
      part[c] = s;
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = unsigned(std::min<std::uint64_t>(threads, chunks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return reduce(part, 0, part.size());
}

double sample_se(const Stats& s) {
  if (s.count < 2.0) return 0.0;
  return std::sqrt(std::max(0.0, s.m2 / (s.count - 1.0)) / s.count);
}

bool in_window(double s, double x, double T) { return s > x && (T == kInf || s <= x + T); }

void check_common(int n, double T, std::uint64_t samples, std::uint64_t min_samples, const char* who) {
  if (n < 1) throw ConfigError(std::string(who) + ": n must be >= 1");
  if (!(T > 0.0)) throw ConfigError(std::string(who) + ": T must be > 0 or inf");
  if (samples < min_samples)
    throw ConfigError(std::string(who) + ": samples must be >= " + std::to_string(min_samples));
}

}  // namespace

EstimatorResult plain_tail(const dist::StepDistribution& d, int n, double x, double T, std::uint64_t samples,
                           std::uint64_t seed, RunOptions opt) {
  check_common(n, T, samples, 100, "plain_tail");
  const Stats s = run(samples, seed, 0, opt.threads, [&](rng::Stream& st) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += d.sample_one(st);
    return in_window(sum, x, T) ? 1.0 : 0.0;
  });
  EstimatorResult r;
  r.estimate = s.mean;
  r.std_error = std::sqrt(s.mean * (1.0 - s.mean) / s.count);
  r.samples = samples;
  r.method = Method::plain;
  r.seed = seed;
  return r;
}

EstimatorResult big_jump_cmc(const dist::StepDistribution& d, int n, double x, std::uint64_t samples,
                             std::uint64_t seed, RunOptions opt) {
  check_common(n, kInf, samples, 2, "big_jump_cmc");
  const double N = double(n);
  const Stats s = run(samples, seed, 0, opt.threads, [&](rng::Stream& st) {
    double sum = 0.0, m = -kInf;
    int ties = 0;
    for (int i = 0; i < n - 1; ++i) {
      const double v = d.sample_one(st);
      sum += v;
      if (v > m) {
        m = v;
        ties = 1;
      } else if (v == m) {
        ++ties;
      }
    }
    const double y = x - sum;
    double z = d.tail(std::max(m, y));
    if (m > y) z += d.atom(m) / double(ties + 1);
    return N * z;
  });
  EstimatorResult r;
  r.estimate = s.mean;
  r.std_error = sample_se(s);
  r.samples = samples;
  r.method = Method::big_jump_cmc;
  r.seed = seed;
  return r;
}

EstimatorResult tilted_restricted(const dist::StepDistribution& d, double h, int n, double x, double T,
                                  std::uint64_t samples, std::uint64_t seed, RunOptions opt) {
  check_common(n, T, samples, 2, "tilted_restricted");
  if (!std::isfinite(x)) throw ConfigError("tilted_restricted: x must be finite");
  const auto tl = dist::tilt_truncate(d, h);
  // Samples are e^{-(S - x)/h} on the window (<= 1); the constant
  // phi^n e^{-x/h} is applied once at the end.
  const double log_c = double(n) * std::log(tl.phi()) - x / h;
  const double c = std::exp(log_c);
  if (!std::isfinite(c)) throw NumericalError("tilted_restricted: phi^n e^{-x/h} overflows (log = " +
                                              std::to_string(log_c) + ")");
  const Stats s = run(samples, seed, 1, opt.threads, [&](rng::Stream& st) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += tl.sample_one(st);
    return in_window(sum, x, T) ? std::exp(-(sum - x) / h) : 0.0;
  });
  EstimatorResult r;
  r.estimate = c * s.mean;
  r.std_error = c * sample_se(s);
  r.samples = samples;
  r.method = Method::tilted_restricted;
  r.seed = seed;
  return r;
}

nlohmann::json to_json(const EstimatorResult& r) {
  return {{"estimate", r.estimate}, {"std_error", r.std_error}, {"samples", r.samples},
          {"method", method_name(r.method)}, {"seed", r.seed}};
}

}  // namespace bigjump::mc
