#ifndef PCOR_SAMPLERS_HPP
#define PCOR_SAMPLERS_HPP

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pcor/context.hpp"
#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"
#include "pcor/mechanism.hpp"
#include "pcor/rng.hpp"
#include "pcor/utility.hpp"

namespace pcor {

enum class SamplerKind { Direct, Uniform, RandomWalk, Dfs, Bfs };

std::string to_string(SamplerKind kind);
SamplerKind sampler_kind_from_string(const std::string& name);

struct SamplerSpec {
  SamplerKind kind = SamplerKind::Bfs;
  int n = 50;                              // sample count
  double total_epsilon = 0.2;              // the epsilon of the OCDP guarantee
  std::optional<Context> starting_context; // required for RandomWalk/DFS/BFS
  std::uint64_t max_attempts = 10'000'000; // cap for uniform sampling

  std::string to_string() const;
  void validate() const;
};

/// Ordered multiset of matching contexts collected by a sampler; the final
/// exponential-mechanism draw selects from these. Every element matches the
/// target (f_M true and V in D_C).
struct SampleSet {
  std::vector<Context> contexts;
  SamplerKind provenance = SamplerKind::Direct;
};

struct ReleaseResult {
  Context private_context;
  SampleSet sample_set;
  double epsilon1_used = 0.0;
  std::uint64_t mechanism_invocations = 0;
  std::chrono::nanoseconds wall_time{0};
  std::uint64_t contexts_examined = 0;  // f_M evaluations (graph expansion count)
  std::uint64_t sample_attempts = 0;    // uniform sampling candidate draws
};

/// epsilon -> epsilon_1 accounting. Direct, uniform and random-walk releases
/// spend the whole budget on the single final draw (epsilon = 2*eps1); DFS and
/// BFS spend one draw per sample plus the final draw (epsilon = (2n+2)*eps1).
double budget_split(SamplerKind kind, int n, double total_epsilon);

/// Match-and-score callback for one (dataset, target, detector, utility)
/// binding: the utility of the context when it matches, nullopt otherwise.
/// Evaluation counting lives here so complexity claims are testable; tests
/// substitute stubs at this seam.
struct MatchOracle {
  std::function<std::optional<double>(const Context&)> eval;
  mutable std::uint64_t calls = 0;

  std::optional<double> operator()(const Context& context) const {
    ++calls;
    return eval(context);
  }
};

MatchOracle make_match_oracle(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, const UtilitySpec& utility);

// Core algorithms over an abstract match oracle on the t-bit context graph.
ReleaseResult direct_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                  Rng& rng);
ReleaseResult uniform_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                   int n, std::uint64_t max_attempts, Rng& rng);
ReleaseResult random_walk_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                       int n, const Context& starting, Rng& rng);
ReleaseResult dfs_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon, int n,
                               const Context& starting, Rng& rng);
ReleaseResult bfs_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon, int n,
                               const Context& starting, Rng& rng);

// Dataset-level releases: bind the oracle, then run the core algorithm.

/// Enumerate all 2^t contexts, collect the full COE, one mechanism draw.
ReleaseResult direct_release(const Dataset& dataset, const Record& target,
                             const VerifyFn& verify, const UtilitySpec& utility, double epsilon,
                             Rng& rng);

/// Draw uniform bit vectors until n match, then one mechanism draw.
ReleaseResult uniform_release(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, const UtilitySpec& utility, double epsilon,
                              int n, Rng& rng,
                              std::uint64_t max_attempts = SamplerSpec{}.max_attempts);

/// Walk matching neighbors (uniform without replacement per position) from the
/// starting context, then one mechanism draw over the multiset.
ReleaseResult random_walk_release(const Dataset& dataset, const Record& target,
                                  const VerifyFn& verify, const UtilitySpec& utility,
                                  double epsilon, int n, const Context& starting, Rng& rng);

/// Depth-first search whose child selection is itself a mechanism draw.
ReleaseResult dfs_release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                          const UtilitySpec& utility, double epsilon, int n,
                          const Context& starting, Rng& rng);

/// Breadth-first search treating the frontier as a weighted priority queue.
ReleaseResult bfs_release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                          const UtilitySpec& utility, double epsilon, int n,
                          const Context& starting, Rng& rng);

/// Dispatch by spec.kind.
ReleaseResult release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                      const UtilitySpec& utility, const SamplerSpec& spec, Rng& rng);

/// Data-owner helper (spends no privacy budget): the all-ones context if it
/// matches, otherwise random restarts of uniform contexts containing the
/// target. For fixture setup and run configuration only.
Context find_starting_context(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, Rng& rng,
                              std::uint64_t max_attempts = SamplerSpec{}.max_attempts);

}  // namespace pcor

#endif  // PCOR_SAMPLERS_HPP
