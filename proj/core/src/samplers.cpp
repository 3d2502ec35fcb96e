#include "pcor/samplers.hpp"

#include <algorithm>
#include <unordered_set>

#include "pcor/errors.hpp"

namespace pcor {

namespace {

using Clock = std::chrono::steady_clock;

/// Uniform random context: p = 1/2 per bit, drawn word-wise. Unused low bits
/// of the last word are cleared to keep the equality/hash invariant.
Context random_context(std::uint32_t t, Rng& rng) {
  Context c(t);
  for (std::uint32_t i = 0; i < t; i += 64) {
    const std::uint32_t bits = std::min<std::uint32_t>(64, t - i);
    std::uint64_t word = rng.next_u64();
    if (bits < 64) word &= ~0ULL << (64 - bits);
    for (std::uint32_t j = 0; j < bits; ++j)
      if ((word >> (63 - j)) & 1ULL) c.set(i + j, true);
  }
  return c;
}

bool matches(const Dataset& dataset, const Record& target, const VerifyFn& verify,
             const Context& context) {
  auto row = dataset.row_of(target.id);
  if (!row || !dataset.contains(context, *row)) return false;
  return verify(dataset.filter(context), target).is_outlier;
}

struct ReleaseTimer {
  explicit ReleaseTimer(ReleaseResult& result, const MatchOracle& oracle)
      : result_(result), oracle_(oracle), start_(Clock::now()), calls_before_(oracle.calls) {}
  ~ReleaseTimer() {
    result_.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
    result_.contexts_examined = oracle_.calls - calls_before_;
  }
  ReleaseResult& result_;
  const MatchOracle& oracle_;
  Clock::time_point start_;
  std::uint64_t calls_before_;
};

}  // namespace

std::string to_string(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::Direct: return "direct";
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::RandomWalk: return "rwalk";
    case SamplerKind::Dfs: return "dfs";
    case SamplerKind::Bfs: return "bfs";
  }
  return "?";
}

SamplerKind sampler_kind_from_string(const std::string& name) {
  if (name == "direct") return SamplerKind::Direct;
  if (name == "uniform") return SamplerKind::Uniform;
  if (name == "rwalk") return SamplerKind::RandomWalk;
  if (name == "dfs") return SamplerKind::Dfs;
  if (name == "bfs") return SamplerKind::Bfs;
  throw ConfigError("unknown sampler '" + name + "' (expected direct|uniform|rwalk|dfs|bfs)");
}

std::string SamplerSpec::to_string() const {
  std::string out = pcor::to_string(kind);
  out += "(n=" + std::to_string(n) + ",epsilon=" + std::to_string(total_epsilon) + ")";
  return out;
}

void SamplerSpec::validate() const {
  if (n < 1) throw ConfigError("sample count n must be >= 1");
  if (!(total_epsilon > 0.0)) throw ConfigError("total epsilon must be positive");
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

double budget_split(SamplerKind kind, int n, double total_epsilon) {
  if (!(total_epsilon > 0.0)) throw ConfigError("total epsilon must be positive");
  if (n < 1) throw ConfigError("sample count n must be >= 1");
  switch (kind) {
    case SamplerKind::Direct:
    case SamplerKind::Uniform:
    case SamplerKind::RandomWalk:
      return total_epsilon / 2.0;
    case SamplerKind::Dfs:
    case SamplerKind::Bfs:
      return total_epsilon / (2.0 * n + 2.0);
  }
  throw ConfigError("unknown sampler kind");
}

MatchOracle make_match_oracle(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, const UtilitySpec& utility) {
  auto target_row = dataset.row_of(target.id);
  if (!target_row) throw ConfigError("target id " + std::to_string(target.id) +
                                     " is not in the dataset");
  UtilityEvaluator evaluator(dataset, target, verify, utility);
  MatchOracle oracle;
  oracle.eval = [&dataset, &target, verify, row = *target_row,
                 evaluator = std::move(evaluator)](const Context& context)
      -> std::optional<double> {
    if (!dataset.contains(context, row)) return std::nullopt;
    const Population pop = dataset.filter(context);
    if (!verify(pop, target).is_outlier) return std::nullopt;
    return evaluator.value_of_population(pop);
  };
  return oracle;
}

ReleaseResult direct_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                  Rng& rng) {
  if (t > 63) throw ConfigError("direct release enumerates 2^t contexts; t must be <= 63");
  ReleaseResult result;
  result.sample_set.provenance = SamplerKind::Direct;
  result.epsilon1_used = budget_split(SamplerKind::Direct, 1, epsilon);
  ReleaseTimer timer(result, oracle);

  std::vector<double> utilities;
  for (std::uint64_t k = 0; k < (1ULL << t); ++k) {
    const Context c = Context::from_index(t, k);
    if (auto u = oracle(c)) {
      result.sample_set.contexts.push_back(c);
      utilities.push_back(*u);
    }
  }
  if (utilities.empty())
    throw SamplingError("no valid context: the target's COE is empty");

  const std::size_t idx = exp_mechanism_index(utilities, result.epsilon1_used, rng);
  result.mechanism_invocations = 1;
  result.private_context = result.sample_set.contexts[idx];
  return result;
}

ReleaseResult uniform_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                   int n, std::uint64_t max_attempts, Rng& rng) {
  ReleaseResult result;
  result.sample_set.provenance = SamplerKind::Uniform;
  result.epsilon1_used = budget_split(SamplerKind::Uniform, n, epsilon);
  ReleaseTimer timer(result, oracle);

  std::vector<double> utilities;
  while (result.sample_set.contexts.size() < static_cast<std::size_t>(n)) {
    if (result.sample_attempts >= max_attempts)
      throw SamplingError("uniform sampling exhausted after " +
                          std::to_string(result.sample_attempts) + " attempts with " +
                          std::to_string(result.sample_set.contexts.size()) + " of " +
                          std::to_string(n) + " matches");
    ++result.sample_attempts;
    const Context c = random_context(t, rng);
    if (auto u = oracle(c)) {
      result.sample_set.contexts.push_back(c);
      utilities.push_back(*u);
    }
  }

  const std::size_t idx = exp_mechanism_index(utilities, result.epsilon1_used, rng);
  result.mechanism_invocations = 1;
  result.private_context = result.sample_set.contexts[idx];
  return result;
}

ReleaseResult random_walk_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon,
                                       int n, const Context& starting, Rng& rng) {
  ReleaseResult result;
  result.sample_set.provenance = SamplerKind::RandomWalk;
  result.epsilon1_used = budget_split(SamplerKind::RandomWalk, n, epsilon);
  ReleaseTimer timer(result, oracle);

  const auto start_utility = oracle(starting);
  if (!start_utility)
    throw SamplingError("random walk requires a matching starting context");

  std::vector<double> utilities{*start_utility};
  result.sample_set.contexts.push_back(starting);

  Context current = starting;
  std::vector<std::uint32_t> pending(t);  // unexplored neighbor bits of `current`
  for (std::uint32_t i = 0; i < t; ++i) pending[i] = i;

  while (result.sample_set.contexts.size() < static_cast<std::size_t>(n)) {
    if (pending.empty()) break;  // every neighbor rejected: the walk is stuck
    const std::size_t j = static_cast<std::size_t>(rng.below(pending.size()));
    const std::uint32_t bit = pending[j];
    pending[j] = pending.back();
    pending.pop_back();
    const Context next = current.flipped(bit);
    if (auto u = oracle(next)) {
      result.sample_set.contexts.push_back(next);
      utilities.push_back(*u);
      current = next;
      pending.resize(t);
      for (std::uint32_t i = 0; i < t; ++i) pending[i] = i;
    }
  }

  const std::size_t idx = exp_mechanism_index(utilities, result.epsilon1_used, rng);
  result.mechanism_invocations = 1;
  result.private_context = result.sample_set.contexts[idx];
  return result;
}

ReleaseResult dfs_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon, int n,
                               const Context& starting, Rng& rng) {
  ReleaseResult result;
  result.sample_set.provenance = SamplerKind::Dfs;
  result.epsilon1_used = budget_split(SamplerKind::Dfs, n, epsilon);
  ReleaseTimer timer(result, oracle);

  const auto start_utility = oracle(starting);
  if (!start_utility) throw SamplingError("DFS requires a matching starting context");

  std::vector<std::pair<Context, double>> stack{{starting, *start_utility}};
  std::unordered_set<Context, ContextHash> visited;
  std::vector<double> visited_utilities;

  std::vector<Context> children;
  std::vector<double> child_utilities;
  while (result.sample_set.contexts.size() < static_cast<std::size_t>(n) && !stack.empty()) {
    const auto [top, top_utility] = stack.back();
    // marked when it becomes stack top, so dead-end tops still enter the
    // final candidate pool
    if (visited.insert(top).second) {
      result.sample_set.contexts.push_back(top);
      visited_utilities.push_back(top_utility);
    }

    children.clear();
    child_utilities.clear();
    for (std::uint32_t bit = 0; bit < t; ++bit) {
      const Context child = top.flipped(bit);
      if (visited.contains(child)) continue;
      if (auto u = oracle(child)) {
        children.push_back(child);
        child_utilities.push_back(*u);
      }
    }

    if (children.empty()) {
      stack.pop_back();
    } else {
      const std::size_t idx = exp_mechanism_index(child_utilities, result.epsilon1_used, rng);
      ++result.mechanism_invocations;
      stack.emplace_back(children[idx], child_utilities[idx]);
    }
  }

  const std::size_t idx = exp_mechanism_index(visited_utilities, result.epsilon1_used, rng);
  ++result.mechanism_invocations;
  result.private_context = result.sample_set.contexts[idx];
  return result;
}

ReleaseResult bfs_release_core(std::uint32_t t, const MatchOracle& oracle, double epsilon, int n,
                               const Context& starting, Rng& rng) {
  ReleaseResult result;
  result.sample_set.provenance = SamplerKind::Bfs;
  result.epsilon1_used = budget_split(SamplerKind::Bfs, n, epsilon);
  ReleaseTimer timer(result, oracle);

  const auto start_utility = oracle(starting);
  if (!start_utility) throw SamplingError("BFS requires a matching starting context");

  std::vector<Context> frontier{starting};
  std::vector<double> frontier_utilities{*start_utility};
  std::unordered_set<Context, ContextHash> frontier_set{starting};
  std::unordered_set<Context, ContextHash> visited;
  std::vector<double> visited_utilities;

  while (result.sample_set.contexts.size() < static_cast<std::size_t>(n) && !frontier.empty()) {
    const std::size_t idx = exp_mechanism_index(frontier_utilities, result.epsilon1_used, rng);
    ++result.mechanism_invocations;
    const Context chosen = frontier[idx];
    const double chosen_utility = frontier_utilities[idx];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(idx));
    frontier_utilities.erase(frontier_utilities.begin() + static_cast<std::ptrdiff_t>(idx));
    frontier_set.erase(chosen);

    visited.insert(chosen);
    result.sample_set.contexts.push_back(chosen);
    visited_utilities.push_back(chosen_utility);

    for (std::uint32_t bit = 0; bit < t; ++bit) {
      const Context child = chosen.flipped(bit);
      if (visited.contains(child) || frontier_set.contains(child)) continue;
      if (auto u = oracle(child)) {
        frontier.push_back(child);
        frontier_utilities.push_back(*u);
        frontier_set.insert(child);
      }
    }
  }

  const std::size_t idx = exp_mechanism_index(visited_utilities, result.epsilon1_used, rng);
  ++result.mechanism_invocations;
  result.private_context = result.sample_set.contexts[idx];
  return result;
}

ReleaseResult direct_release(const Dataset& dataset, const Record& target,
                             const VerifyFn& verify, const UtilitySpec& utility, double epsilon,
                             Rng& rng) {
  const MatchOracle oracle = make_match_oracle(dataset, target, verify, utility);
  return direct_release_core(dataset.schema().total_bits(), oracle, epsilon, rng);
}

ReleaseResult uniform_release(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, const UtilitySpec& utility, double epsilon,
                              int n, Rng& rng, std::uint64_t max_attempts) {
  const MatchOracle oracle = make_match_oracle(dataset, target, verify, utility);
  return uniform_release_core(dataset.schema().total_bits(), oracle, epsilon, n, max_attempts,
                              rng);
}

ReleaseResult random_walk_release(const Dataset& dataset, const Record& target,
                                  const VerifyFn& verify, const UtilitySpec& utility,
                                  double epsilon, int n, const Context& starting, Rng& rng) {
  const MatchOracle oracle = make_match_oracle(dataset, target, verify, utility);
  return random_walk_release_core(dataset.schema().total_bits(), oracle, epsilon, n, starting,
                                  rng);
}

ReleaseResult dfs_release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                          const UtilitySpec& utility, double epsilon, int n,
                          const Context& starting, Rng& rng) {
  const MatchOracle oracle = make_match_oracle(dataset, target, verify, utility);
  return dfs_release_core(dataset.schema().total_bits(), oracle, epsilon, n, starting, rng);
}

ReleaseResult bfs_release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                          const UtilitySpec& utility, double epsilon, int n,
                          const Context& starting, Rng& rng) {
  const MatchOracle oracle = make_match_oracle(dataset, target, verify, utility);
  return bfs_release_core(dataset.schema().total_bits(), oracle, epsilon, n, starting, rng);
}

ReleaseResult release(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                      const UtilitySpec& utility, const SamplerSpec& spec, Rng& rng) {
  spec.validate();
  const bool needs_start = spec.kind == SamplerKind::RandomWalk ||
                           spec.kind == SamplerKind::Dfs || spec.kind == SamplerKind::Bfs;
  if (needs_start && !spec.starting_context)
    throw ConfigError(to_string(spec.kind) + " sampling requires a starting context");
  switch (spec.kind) {
    case SamplerKind::Direct:
      return direct_release(dataset, target, verify, utility, spec.total_epsilon, rng);
    case SamplerKind::Uniform:
      return uniform_release(dataset, target, verify, utility, spec.total_epsilon, spec.n, rng,
                             spec.max_attempts);
    case SamplerKind::RandomWalk:
      return random_walk_release(dataset, target, verify, utility, spec.total_epsilon, spec.n,
                                 *spec.starting_context, rng);
    case SamplerKind::Dfs:
      return dfs_release(dataset, target, verify, utility, spec.total_epsilon, spec.n,
                         *spec.starting_context, rng);
    case SamplerKind::Bfs:
      return bfs_release(dataset, target, verify, utility, spec.total_epsilon, spec.n,
                         *spec.starting_context, rng);
  }
  throw ConfigError("unknown sampler kind");
}

Context find_starting_context(const Dataset& dataset, const Record& target,
                              const VerifyFn& verify, Rng& rng, std::uint64_t max_attempts) {
  const std::uint32_t t = dataset.schema().total_bits();
  auto target_row = dataset.row_of(target.id);
  if (!target_row)
    throw ConfigError("target id " + std::to_string(target.id) + " is not in the dataset");

  const Context full = Context::all_ones(t);
  if (matches(dataset, target, verify, full)) return full;

  // restart with uniform contexts forced to contain the target
  const Schema& schema = dataset.schema();
  for (std::uint64_t attempt = 0; attempt < max_attempts; ++attempt) {
    Context c = random_context(t, rng);
    for (std::uint32_t a = 0; a < schema.attribute_count(); ++a)
      c.set(schema.bit_index(a, target.values[a]), true);
    if (matches(dataset, target, verify, c)) return c;
  }
  throw SamplingError("no starting context found for target id " + std::to_string(target.id) +
                      " within the attempt cap");
}

}  // namespace pcor
