#ifndef PCOR_PRIVACY_AUDIT_HPP
#define PCOR_PRIVACY_AUDIT_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"
#include "pcor/oracle.hpp"
#include "pcor/rng.hpp"
#include "pcor/utility.hpp"

namespace pcor {

struct NeighborSpec {
  int delta = 1;    // records removed per neighbor
  int trials = 50;  // random neighbors per target
  std::uint64_t seed = 0;
};

/// Dataset with `delta` uniformly chosen records removed. `keep_id` shields
/// one record (the audited outlier) from removal; `removed_ids` logs what was
/// dropped. delta = 0 returns an identical dataset (test mode).
Dataset make_neighbor(const Dataset& dataset, int delta, Rng& rng,
                      std::vector<std::int64_t>* removed_ids = nullptr,
                      std::optional<std::int64_t> keep_id = std::nullopt);

/// COE similarity of one target across two datasets, as a percentage.
/// The metric is Jaccard: 100 * |COE1 n COE2| / |COE1 u COE2|; the paper
/// reports a "match" percentage without defining one, so the choice is
/// declared here and in output metadata. Two empty COEs count as a vacuous
/// 100% match and set the flag.
double coe_match(const Dataset& d1, const Dataset& d2, const Record& target,
                 const VerifyFn& verify, std::uint32_t cap = kDefaultEnumerationCap,
                 bool* both_empty = nullptr);

/// Mean COE match per (detector, delta) cell over targets and neighbor trials.
struct MatchCell {
  DetectorKind detector = DetectorKind::Grubbs;
  int delta = 0;
  double mean_percentage = 0.0;
  std::size_t pairs = 0;
  std::size_t vacuous = 0;  // pairs where both COEs were empty
};

struct MatchReport {
  std::vector<MatchCell> cells;

  const MatchCell& cell(DetectorKind detector, int delta) const;
};

MatchReport coe_match_experiment(const Dataset& dataset,
                                 const std::vector<DetectorSpec>& detectors,
                                 const std::vector<int>& deltas, int trials,
                                 const std::vector<std::int64_t>& target_ids, std::uint64_t seed,
                                 std::uint32_t cap = kDefaultEnumerationCap);

/// Exact worst-case selection-probability ratio of the direct mechanism
/// across one (dataset, neighbor) pair, evaluated in both directions over the
/// COE intersection. No Monte Carlo: probabilities come from
/// exact_probabilities on both sides (epsilon_1 = epsilon/2 each).
struct RatioReport {
  std::int64_t target_id = 0;
  double max_ratio = 0.0;
  double bound = 0.0;  // e^epsilon
  bool pass = false;
  bool equal_coe = false;
  bool empty_intersection = false;
  std::size_t intersection_size = 0;
};

RatioReport probability_ratio_audit(const Dataset& d1, const Dataset& d2, const Record& target,
                                    const DetectorSpec& detector, const UtilitySpec& utility,
                                    double epsilon, std::uint32_t cap = kDefaultEnumerationCap);

struct RatioSummary {
  std::size_t pairs = 0;
  std::size_t equal_pairs = 0;
  std::size_t equal_pass = 0;
  std::size_t unequal_pairs = 0;
  std::size_t unequal_pass = 0;
  std::size_t skipped = 0;  // flagged pairs with an empty COE intersection
  std::vector<RatioReport> reports;

  double equal_pass_fraction() const;
  double unequal_pass_fraction() const;
};

/// The empirical protocol behind the ratio audit: `trials` random neighbors
/// per target at the given delta, each audited exactly. Pairs where the
/// target's COE is empty on either side are flagged and skipped.
RatioSummary ratio_audit_experiment(const Dataset& dataset, const DetectorSpec& detector,
                                    const UtilitySpec& utility, double epsilon,
                                    const std::vector<std::int64_t>& target_ids, int trials,
                                    int delta, std::uint64_t seed,
                                    std::uint32_t cap = kDefaultEnumerationCap);

}  // namespace pcor

#endif  // PCOR_PRIVACY_AUDIT_HPP
