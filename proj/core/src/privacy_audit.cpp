#include "pcor/privacy_audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcor/errors.hpp"
#include "pcor/mechanism.hpp"
#include "pcor/samplers.hpp"

namespace pcor {

Dataset make_neighbor(const Dataset& dataset, int delta, Rng& rng,
                      std::vector<std::int64_t>* removed_ids,
                      std::optional<std::int64_t> keep_id) {
  if (delta < 0) throw ConfigError("neighbor delta must be non-negative");
  if (static_cast<std::size_t>(delta) >= dataset.size())
    throw ConfigError("neighbor delta must be smaller than the dataset");

  std::vector<std::uint32_t> pool;
  pool.reserve(dataset.size());
  for (std::uint32_t row = 0; row < dataset.size(); ++row) {
    if (keep_id && dataset.records()[row].id == *keep_id) continue;
    pool.push_back(row);
  }
  if (static_cast<std::size_t>(delta) > pool.size())
    throw ConfigError("neighbor delta leaves no removable records");

  // partial Fisher-Yates: first delta entries are a uniform sample
  for (int i = 0; i < delta; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  std::vector<std::uint32_t> removed(pool.begin(), pool.begin() + delta);
  if (removed_ids) {
    removed_ids->clear();
    for (std::uint32_t row : removed) removed_ids->push_back(dataset.records()[row].id);
  }
  return dataset.without_rows(removed);
}

namespace {

double jaccard_percentage(const std::vector<Context>& a, const std::vector<Context>& b,
                          bool* both_empty) {
  if (both_empty) *both_empty = false;
  if (a.empty() && b.empty()) {
    if (both_empty) *both_empty = true;
    return 100.0;  // vacuous match
  }
  std::size_t common = 0;
  auto it1 = a.begin();
  auto it2 = b.begin();
  while (it1 != a.end() && it2 != b.end()) {
    if (*it1 == *it2) {
      ++common;
      ++it1;
      ++it2;
    } else if (*it1 < *it2) {
      ++it1;
    } else {
      ++it2;
    }
  }
  const std::size_t unions = a.size() + b.size() - common;
  return 100.0 * static_cast<double>(common) / static_cast<double>(unions);
}

}  // namespace

double coe_match(const Dataset& d1, const Dataset& d2, const Record& target,
                 const VerifyFn& verify, std::uint32_t cap, bool* both_empty) {
  const CoeSet coe1 = enumerate_coe(d1, target, verify, cap);
  const CoeSet coe2 = enumerate_coe(d2, target, verify, cap);
  return jaccard_percentage(coe1.contexts, coe2.contexts, both_empty);
}

const MatchCell& MatchReport::cell(DetectorKind detector, int delta) const {
  for (const MatchCell& c : cells)
    if (c.detector == detector && c.delta == delta) return c;
  throw ConfigError("no such cell in the match report");
}

MatchReport coe_match_experiment(const Dataset& dataset,
                                 const std::vector<DetectorSpec>& detectors,
                                 const std::vector<int>& deltas, int trials,
                                 const std::vector<std::int64_t>& target_ids, std::uint64_t seed,
                                 std::uint32_t cap) {
  MatchReport report;
  for (std::size_t d = 0; d < detectors.size(); ++d) {
    const VerifyFn verify = make_verifier(detectors[d]);
    // base COE per target is shared by every (delta, trial) pair
    std::vector<CoeSet> base;
    for (std::int64_t id : target_ids) {
      const Record* target = dataset.find_record(id);
      if (!target)
        throw ConfigError("target id " + std::to_string(id) + " is not in the dataset");
      base.push_back(enumerate_coe(dataset, *target, verify, cap));
    }
    for (std::size_t x = 0; x < deltas.size(); ++x) {
      MatchCell cell;
      cell.detector = detectors[d].kind;
      cell.delta = deltas[x];
      double sum = 0.0;
      for (std::size_t ti = 0; ti < target_ids.size(); ++ti) {
        const Record& target = *dataset.find_record(target_ids[ti]);
        for (int trial = 0; trial < trials; ++trial) {
          Rng rng(Rng::derive_seed(seed, (d << 8) ^ x, ti, static_cast<std::uint64_t>(trial)));
          const Dataset neighbor =
              make_neighbor(dataset, deltas[x], rng, nullptr, target.id);
          const CoeSet coe2 = enumerate_coe(neighbor, target, verify, cap);
          bool vacuous = false;
          sum += jaccard_percentage(base[ti].contexts, coe2.contexts, &vacuous);
          ++cell.pairs;
          if (vacuous) ++cell.vacuous;
        }
      }
      cell.mean_percentage = cell.pairs ? sum / static_cast<double>(cell.pairs) : 0.0;
      report.cells.push_back(cell);
    }
  }
  return report;
}

RatioReport probability_ratio_audit(const Dataset& d1, const Dataset& d2, const Record& target,
                                    const DetectorSpec& detector, const UtilitySpec& utility,
                                    double epsilon, std::uint32_t cap) {
  if (!d1.row_of(target.id) || !d2.row_of(target.id))
    throw ConfigError("ratio audit target must be present in both datasets");
  const VerifyFn verify = make_verifier(detector);

  RatioReport report;
  report.target_id = target.id;
  report.bound = std::exp(epsilon);

  const CoeSet coe1 = enumerate_coe(d1, target, verify, cap);
  const CoeSet coe2 = enumerate_coe(d2, target, verify, cap);
  report.equal_coe = coe1.contexts == coe2.contexts;

  const double epsilon1 = budget_split(SamplerKind::Direct, 1, epsilon);
  const UtilityEvaluator eval1(d1, target, verify, utility);
  const UtilityEvaluator eval2(d2, target, verify, utility);

  std::vector<double> u1(coe1.contexts.size());
  for (std::size_t i = 0; i < coe1.contexts.size(); ++i)
    u1[i] = eval1.value_of_population(d1.filter(coe1.contexts[i]));
  std::vector<double> u2(coe2.contexts.size());
  for (std::size_t i = 0; i < coe2.contexts.size(); ++i)
    u2[i] = eval2.value_of_population(d2.filter(coe2.contexts[i]));

  if (coe1.contexts.empty() || coe2.contexts.empty()) {
    report.empty_intersection = true;
    report.pass = true;  // vacuous: no common output to compare
    return report;
  }
  const std::vector<double> p1 = exact_probabilities(std::span<const double>(u1), epsilon1);
  const std::vector<double> p2 = exact_probabilities(std::span<const double>(u2), epsilon1);

  double max_ratio = 0.0;
  std::size_t i1 = 0, i2 = 0;
  while (i1 < coe1.contexts.size() && i2 < coe2.contexts.size()) {
    if (coe1.contexts[i1] == coe2.contexts[i2]) {
      // both directions: the pair is unordered
      max_ratio = std::max({max_ratio, p1[i1] / p2[i2], p2[i2] / p1[i1]});
      ++report.intersection_size;
      ++i1;
      ++i2;
    } else if (coe1.contexts[i1] < coe2.contexts[i2]) {
      ++i1;
    } else {
      ++i2;
    }
  }
  if (report.intersection_size == 0) {
    report.empty_intersection = true;
    report.pass = true;
    return report;
  }
  report.max_ratio = max_ratio;
  report.pass = max_ratio <= report.bound;
  return report;
}

double RatioSummary::equal_pass_fraction() const {
  return equal_pairs ? static_cast<double>(equal_pass) / static_cast<double>(equal_pairs) : 1.0;
}

double RatioSummary::unequal_pass_fraction() const {
  return unequal_pairs ? static_cast<double>(unequal_pass) / static_cast<double>(unequal_pairs)
                       : 1.0;
}

RatioSummary ratio_audit_experiment(const Dataset& dataset, const DetectorSpec& detector,
                                    const UtilitySpec& utility, double epsilon,
                                    const std::vector<std::int64_t>& target_ids, int trials,
                                    int delta, std::uint64_t seed, std::uint32_t cap) {
  RatioSummary summary;
  for (std::size_t ti = 0; ti < target_ids.size(); ++ti) {
    const Record* target = dataset.find_record(target_ids[ti]);
    if (!target)
      throw ConfigError("target id " + std::to_string(target_ids[ti]) +
                        " is not in the dataset");
    for (int trial = 0; trial < trials; ++trial) {
      Rng rng(Rng::derive_seed(seed, 0xA0D17, ti, static_cast<std::uint64_t>(trial)));
      const Dataset neighbor = make_neighbor(dataset, delta, rng, nullptr, target->id);
      const RatioReport report =
          probability_ratio_audit(dataset, neighbor, *target, detector, utility, epsilon, cap);
      ++summary.pairs;
      if (report.empty_intersection) {
        ++summary.skipped;
        summary.reports.push_back(report);
        continue;
      }
      if (report.equal_coe) {
        ++summary.equal_pairs;
        if (report.pass) ++summary.equal_pass;
      } else {
        ++summary.unequal_pairs;
        if (report.pass) ++summary.unequal_pass;
      }
      summary.reports.push_back(report);
    }
  }
  return summary;
}

}  // namespace pcor
