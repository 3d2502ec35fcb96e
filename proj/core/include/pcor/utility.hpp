#ifndef PCOR_UTILITY_HPP
#define PCOR_UTILITY_HPP

#include <optional>
#include <string>
#include <vector>

#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"

namespace pcor {

/// Utility of a context for a target, with a distinguished marker for
/// non-matching contexts. The marker is a tag rather than a floating-point
/// -inf so the mechanism's log-sum-exp arithmetic stays total.
class UtilityValue {
 public:
  static UtilityValue neg_infinity() { return UtilityValue(); }
  static UtilityValue finite(double v) {
    UtilityValue u;
    u.finite_ = true;
    u.value_ = v;
    return u;
  }

  bool is_finite() const { return finite_; }

  /// Value of a finite utility; calling this on the marker is a logic error.
  double value() const { return value_; }

  bool operator==(const UtilityValue&) const = default;

 private:
  bool finite_ = false;
  double value_ = 0.0;
};

enum class UtilityKind { PopulationSize, Overlap };

std::string to_string(UtilityKind kind);
UtilityKind utility_kind_from_string(const std::string& name);

/// Which utility scores candidate contexts. Both shipped utilities count
/// records, so the sensitivity contract Delta-u = 1 holds for both.
/// Overlap requires the starting context C_V.
struct UtilitySpec {
  UtilityKind kind = UtilityKind::PopulationSize;
  std::optional<Context> starting_context;

  std::string to_string() const;  // canonical form, used in file fingerprints
  void validate() const;
};

/// u_V(D, C): population size when the context matches, the -inf marker
/// otherwise.
UtilityValue population_size_utility(const Dataset& dataset, const Context& context,
                                     const Record& target, const DetectorSpec& detector);

/// u_V(D, C): |D_C intersect D_{C_V}| (distinct record ids) when the context
/// matches, the -inf marker otherwise.
UtilityValue overlap_utility(const Dataset& dataset, const Context& context, const Record& target,
                             const DetectorSpec& detector, const Context& starting);

/// Utility bound to one (dataset, target, detector, spec) tuple. Precomputes
/// the starting population for overlap scoring so per-context evaluation stays
/// a single filter pass.
class UtilityEvaluator {
 public:
  UtilityEvaluator(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                   const UtilitySpec& spec);

  /// Full contract: verify then score.
  UtilityValue evaluate(const Context& context) const;

  /// Score of a population already known to match (samplers hold this
  /// invariant for every collected candidate).
  double value_of_population(const Population& population) const;

 private:
  const Dataset& dataset_;
  const Record& target_;
  VerifyFn verify_;
  UtilitySpec spec_;
  std::vector<char> starting_member_;  // by dataset row, overlap only
};

}  // namespace pcor

#endif  // PCOR_UTILITY_HPP
