#ifndef PCOR_MECHANISM_HPP
#define PCOR_MECHANISM_HPP

#include <span>
#include <utility>
#include <vector>

#include "pcor/context.hpp"
#include "pcor/rng.hpp"
#include "pcor/utility.hpp"

namespace pcor {

/// Privacy budget of one release: the total epsilon of the run and the
/// epsilon_1 each mechanism invocation spends. per_call_epsilon is derived
/// from the total by the per-sampler accounting (see budget_split);
/// per_call_epsilon = 0 is permitted only in test mode and yields a uniform
/// draw over finite-utility candidates.
struct EpsilonBudget {
  double total_epsilon = 0.0;
  double per_call_epsilon = 0.0;
};

/// Outcome of one exponential-mechanism draw. `probabilities` is parallel to
/// the candidate list handed in; entries with the -inf utility marker are
/// exactly 0.
struct WeightedDraw {
  Context chosen;
  std::size_t chosen_index = 0;
  std::vector<double> probabilities;
};

/// Selection probabilities Pr[c] = exp(eps1 * u(c)) / sum exp(eps1 * u(c'))
/// with sensitivity 1, computed with a max shift so that utilities as large as
/// dataset sizes cannot overflow. Duplicated candidates in a multiset each
/// count independently.
///
/// Throws MechanismError when the list is empty or no candidate has finite
/// utility; throws ConfigError for a negative epsilon.
std::vector<double> exact_probabilities(std::span<const UtilityValue> utilities, double epsilon1);

/// As above for candidate lists already known to be all-finite (samplers hold
/// this invariant for every collected sample).
std::vector<double> exact_probabilities(std::span<const double> utilities, double epsilon1);

/// Inverse-CDF draw over precomputed probabilities. A draw that lands exactly
/// on a boundary resolves to the lower index; zero-probability candidates are
/// never returned.
std::size_t draw_from_probabilities(std::span<const double> probabilities, Rng& rng);

/// One private draw: exact_probabilities + inverse-CDF with the given source.
std::size_t exp_mechanism_index(std::span<const UtilityValue> utilities, double epsilon1,
                                Rng& rng);
std::size_t exp_mechanism_index(std::span<const double> utilities, double epsilon1, Rng& rng);

/// Full-contract form over (context, utility) candidates.
WeightedDraw exp_mechanism(std::span<const std::pair<Context, UtilityValue>> candidates,
                           double epsilon1, Rng& rng);

}  // namespace pcor

#endif  // PCOR_MECHANISM_HPP
