#include "pcor/utility.hpp"

#include "pcor/errors.hpp"

namespace pcor {

std::string to_string(UtilityKind kind) {
  return kind == UtilityKind::PopulationSize ? "popsize" : "overlap";
}

UtilityKind utility_kind_from_string(const std::string& name) {
  if (name == "popsize") return UtilityKind::PopulationSize;
  if (name == "overlap") return UtilityKind::Overlap;
  throw ConfigError("unknown utility '" + name + "' (expected popsize|overlap)");
}

std::string UtilitySpec::to_string() const {
  std::string out = pcor::to_string(kind);
  if (kind == UtilityKind::Overlap && starting_context)
    out += "(start=" + starting_context->to_string() + ")";
  return out;
}

void UtilitySpec::validate() const {
  if (kind == UtilityKind::Overlap && !starting_context)
    throw ConfigError("overlap utility requires a starting context");
}

UtilityValue population_size_utility(const Dataset& dataset, const Context& context,
                                     const Record& target, const DetectorSpec& detector) {
  const Population pop = dataset.filter(context);
  if (!verify(pop, target, detector).is_outlier) return UtilityValue::neg_infinity();
  return UtilityValue::finite(static_cast<double>(pop.size()));
}

UtilityValue overlap_utility(const Dataset& dataset, const Context& context, const Record& target,
                             const DetectorSpec& detector, const Context& starting) {
  const Population pop = dataset.filter(context);
  if (!verify(pop, target, detector).is_outlier) return UtilityValue::neg_infinity();
  std::vector<char> in_start(dataset.size(), 0);
  for (std::uint32_t row : dataset.filter(starting).member_rows) in_start[row] = 1;
  std::size_t overlap = 0;
  for (std::uint32_t row : pop.member_rows)
    if (in_start[row]) ++overlap;
  return UtilityValue::finite(static_cast<double>(overlap));
}

UtilityEvaluator::UtilityEvaluator(const Dataset& dataset, const Record& target,
                                   const VerifyFn& verify, const UtilitySpec& spec)
    : dataset_(dataset), target_(target), verify_(verify), spec_(spec) {
  spec_.validate();
  if (spec_.kind == UtilityKind::Overlap) {
    starting_member_.assign(dataset.size(), 0);
    for (std::uint32_t row : dataset.filter(*spec_.starting_context).member_rows)
      starting_member_[row] = 1;
  }
}

UtilityValue UtilityEvaluator::evaluate(const Context& context) const {
  const Population pop = dataset_.filter(context);
  if (!verify_(pop, target_).is_outlier) return UtilityValue::neg_infinity();
  return UtilityValue::finite(value_of_population(pop));
}

double UtilityEvaluator::value_of_population(const Population& population) const {
  if (spec_.kind == UtilityKind::PopulationSize)
    return static_cast<double>(population.size());
  std::size_t overlap = 0;
  for (std::uint32_t row : population.member_rows)
    if (starting_member_[row]) ++overlap;
  return static_cast<double>(overlap);
}

}  // namespace pcor
