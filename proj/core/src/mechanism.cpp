#include "pcor/mechanism.hpp"

#include <cmath>
#include <limits>

#include "pcor/errors.hpp"

namespace pcor {

std::vector<double> exact_probabilities(std::span<const UtilityValue> utilities,
                                        double epsilon1) {
  if (epsilon1 < 0.0) throw ConfigError("mechanism epsilon must be non-negative");
  if (utilities.empty()) throw MechanismError("empty candidate set");

  double max_utility = -std::numeric_limits<double>::infinity();
  for (const UtilityValue& u : utilities)
    if (u.is_finite() && u.value() > max_utility) max_utility = u.value();
  if (!std::isfinite(max_utility))
    throw MechanismError("no candidate with finite utility");

  std::vector<double> probs(utilities.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    if (!utilities[i].is_finite()) continue;
    const double w = std::exp(epsilon1 * (utilities[i].value() - max_utility));
    probs[i] = w;
    total += w;
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> exact_probabilities(std::span<const double> utilities, double epsilon1) {
  if (epsilon1 < 0.0) throw ConfigError("mechanism epsilon must be non-negative");
  if (utilities.empty()) throw MechanismError("empty candidate set");

  double max_utility = utilities[0];
  for (double u : utilities) max_utility = std::max(max_utility, u);

  std::vector<double> probs(utilities.size());
  double total = 0.0;
  for (std::size_t i = 0; i < utilities.size(); ++i) {
    probs[i] = std::exp(epsilon1 * (utilities[i] - max_utility));
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::size_t draw_from_probabilities(std::span<const double> probabilities, Rng& rng) {
  const double u = rng.next_double();
  double cum = 0.0;
  std::size_t last_positive = probabilities.size();
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    cum += probabilities[i];
    last_positive = i;
    if (u <= cum) return i;
  }
  // floating rounding left cum marginally below 1
  if (last_positive == probabilities.size())
    throw MechanismError("no candidate with positive probability");
  return last_positive;
}

std::size_t exp_mechanism_index(std::span<const UtilityValue> utilities, double epsilon1,
                                Rng& rng) {
  const std::vector<double> probs = exact_probabilities(utilities, epsilon1);
  return draw_from_probabilities(probs, rng);
}

std::size_t exp_mechanism_index(std::span<const double> utilities, double epsilon1, Rng& rng) {
  const std::vector<double> probs = exact_probabilities(utilities, epsilon1);
  return draw_from_probabilities(probs, rng);
}

WeightedDraw exp_mechanism(std::span<const std::pair<Context, UtilityValue>> candidates,
                           double epsilon1, Rng& rng) {
  std::vector<UtilityValue> utilities;
  utilities.reserve(candidates.size());
  for (const auto& [context, utility] : candidates) utilities.push_back(utility);

  WeightedDraw draw;
  draw.probabilities = exact_probabilities(utilities, epsilon1);
  draw.chosen_index = draw_from_probabilities(draw.probabilities, rng);
  draw.chosen = candidates[draw.chosen_index].first;
  return draw;
}

}  // namespace pcor
