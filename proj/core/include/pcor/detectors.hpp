#ifndef PCOR_DETECTORS_HPP
#define PCOR_DETECTORS_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pcor/dataset.hpp"

namespace pcor {

enum class DetectorKind { Grubbs, Lof, Histogram };

std::string to_string(DetectorKind kind);
DetectorKind detector_kind_from_string(const std::string& name);

/// Parameters of the deterministic outlier verification function f_M(D_C, V).
/// All detectors are pure functions of (metric-value multiset, target value,
/// spec); there is no randomness in detection.
struct DetectorSpec {
  DetectorKind kind = DetectorKind::Grubbs;
  double grubbs_alpha = 0.05;      // two-sided significance level
  int lof_k = 10;                  // neighbor count
  double lof_threshold = 1.5;      // LOF score cutoff
  double hist_freq_coeff = 2.5e-3; // relative bin-frequency cutoff
  int min_population = 0;          // 0 = derived default

  /// Minimum population size to attempt detection: max(3, lof_k+1) for LOF,
  /// 3 otherwise, raised further if min_population asks for more. Populations
  /// below this verify to false rather than erroring.
  int effective_min_population() const;

  std::string to_string() const;  // canonical form, used in file fingerprints

  void validate() const;  // throws ConfigError on out-of-range parameters
};

/// Detection outcome. `score` is the detector's test statistic (Grubbs
/// statistic, LOF score, or target bin count) and is diagnostic only.
struct Verdict {
  bool is_outlier = false;
  double score = 0.0;
};

/// f_M(D_C, V): is the target an outlier in the population under the spec?
/// False whenever the target is not a population member or the population is
/// smaller than the spec's minimum.
Verdict verify(const Population& population, const Record& target, const DetectorSpec& spec);

/// As `verify`, but the target is identified by its index into the
/// population's value list (the fast path used by samplers and the oracle).
Verdict verify_at(std::span<const double> values, std::size_t target_index,
                  const DetectorSpec& spec);

/// Indices (ascending) of every value flagged as an outlier. Used to build
/// per-context outlier lists in one pass.
std::vector<std::size_t> detect_all(std::span<const double> values, const DetectorSpec& spec);

/// |target - mean| / sample standard deviation; 0 when the deviation is zero.
double grubbs_statistic(std::span<const double> values, double target_value);

/// Two-sided Grubbs critical value for n samples at significance alpha.
double grubbs_critical_value(std::size_t n, double alpha);

/// LOF score of the given value (which must occur in `values`) with absolute
/// difference as the metric-axis distance. Ties in k-distance include all
/// equidistant points.
double lof_score(std::span<const double> values, double target_value, int k);

/// Equal-width binning over [min, max] with round(sqrt(n)) bins (at least 1);
/// outlier iff the target's bin count is below coeff * n.
Verdict histogram_verdict(std::span<const double> values, double target_value, double coeff);

std::size_t histogram_bin_count(std::size_t population_size);

/// Verification callback type: samplers and the oracle are generic over the
/// detector, so tests can substitute stubs.
using VerifyFn = std::function<Verdict(const Population&, const Record&)>;

VerifyFn make_verifier(const DetectorSpec& spec);

}  // namespace pcor

#endif  // PCOR_DETECTORS_HPP
