#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "bigjump/dist/step_distribution.hpp"

namespace bigjump::mc {

using dist::kInf;

enum class Method { plain, big_jump_cmc, tilted_restricted };
const char* method_name(Method m);
Method parse_method(const std::string& s);

struct EstimatorResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  Method method = Method::plain;
  std::uint64_t seed = 0;
};

// Samples are processed in fixed chunks of kChunk indices and the chunk
// statistics are merged pairwise, so results do not depend on threads.
inline constexpr std::uint64_t kChunk = 4096;

struct RunOptions {
  unsigned threads = 1;  // 0: hardware concurrency
};

// Frequency of {S_n in (x, x + T]}; binomial standard error.
EstimatorResult plain_tail(const dist::StepDistribution& d, int n, double x, double T, std::uint64_t samples,
                           std::uint64_t seed, RunOptions opt = {});

// Z = n [Fbar(max(M, x - S)) + 1{M > x - S} P{xi = M} / (k + 1)] over n - 1
// sampled steps with sum S, maximum M attained k times. The atom term breaks
// ties at the maximum uniformly, so the estimator stays unbiased for laws
// with atoms. T = inf only.
EstimatorResult big_jump_cmc(const dist::StepDistribution& d, int n, double x, std::uint64_t samples,
                             std::uint64_t seed, RunOptions opt = {});

// P{S_n in (x, x + T], xi_i <= h for all i} = phi^n E[e^{-S/h}; S in (x, x + T]]
// under the tilted law. Weights are formed in log space.
EstimatorResult tilted_restricted(const dist::StepDistribution& d, double h, int n, double x, double T,
                                  std::uint64_t samples, std::uint64_t seed, RunOptions opt = {});

nlohmann::json to_json(const EstimatorResult& r);

}  // namespace bigjump::mc
