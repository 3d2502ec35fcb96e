#include "pcor/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>

#include "pcor/errors.hpp"

namespace pcor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct MomentStats {
  double mean = 0.0;
  double stddev = 0.0;   // sample standard deviation (n-1)
  double max_dev = 0.0;  // max |x - mean|
};

MomentStats moments(std::span<const double> values) {
  MomentStats st;
  const std::size_t n = values.size();
  st.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double x : values) {
    const double d = x - st.mean;
    ss += d * d;
    st.max_dev = std::max(st.max_dev, std::abs(d));
  }
  st.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return st;
}

/// Per-point LOF state over the sorted value array. Windows are contiguous in
/// 1-D: the k-distance neighborhood of a point is an interval around it.
struct LofTable {
  std::vector<std::size_t> perm;  // sorted position -> original index
  std::vector<double> sorted;
  std::vector<std::size_t> lo, hi;  // inclusive window bounds per sorted position
  std::vector<double> kdist;
  std::vector<double> lrd;
  std::vector<double> score;

  LofTable(std::span<const double> values, int k);
  std::size_t position_of_index(std::size_t original_index) const;
};

LofTable::LofTable(std::span<const double> values, int k) {
  const std::size_t n = values.size();
  perm.resize(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  sorted.resize(n);
  for (std::size_t p = 0; p < n; ++p) sorted[p] = values[perm[p]];

  lo.resize(n);
  hi.resize(n);
  kdist.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t l = p, h = p;
    for (int step = 0; step < k; ++step) {
      const double dl = l > 0 ? sorted[p] - sorted[l - 1] : kInf;
      const double dr = h + 1 < n ? sorted[h + 1] - sorted[p] : kInf;
      if (dl <= dr) {
        --l;
      } else {
        ++h;
      }
    }
    double dk = std::max(sorted[p] - sorted[l], sorted[h] - sorted[p]);
    // include every point tied with the k-th nearest
    while (l > 0 && sorted[p] - sorted[l - 1] <= dk) --l;
    while (h + 1 < n && sorted[h + 1] - sorted[p] <= dk) ++h;
    lo[p] = l;
    hi[p] = h;
    kdist[p] = dk;
  }

  lrd.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (kdist[p] == 0.0) {
      lrd[p] = kInf;  // >= k duplicates of this value; reachability collapses to 0
      continue;
    }
    double sum = 0.0;
    for (std::size_t q = lo[p]; q <= hi[p]; ++q) {
      if (q == p) continue;
      sum += std::max(kdist[q], std::abs(sorted[p] - sorted[q]));
    }
    const double count = static_cast<double>(hi[p] - lo[p]);
    lrd[p] = count > 0 ? count / sum : kInf;
  }

  score.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (!std::isfinite(lrd[p])) {
      score[p] = 1.0;  // target inside a duplicate cluster is as dense as its neighbors
      continue;
    }
    double sum = 0.0;
    for (std::size_t q = lo[p]; q <= hi[p]; ++q) {
      if (q == p) continue;
      sum += lrd[q];
    }
    const double count = static_cast<double>(hi[p] - lo[p]);
    score[p] = (sum / count) / lrd[p];
  }
}

std::size_t LofTable::position_of_index(std::size_t original_index) const {
  for (std::size_t p = 0; p < perm.size(); ++p)
    if (perm[p] == original_index) return p;
  return perm.size();
}

struct HistogramTable {
  double min = 0.0, width = 0.0;
  std::size_t bins = 1;
  double threshold = 0.0;
  std::vector<std::size_t> counts;
  bool degenerate = false;  // all values equal: single bin, nothing flagged

  HistogramTable(std::span<const double> values, double coeff);
  std::size_t bin_of(double x) const {
    const auto b = static_cast<std::size_t>((x - min) / width);
    return b >= bins ? bins - 1 : b;
  }
};

HistogramTable::HistogramTable(std::span<const double> values, double coeff) {
  const std::size_t n = values.size();
  auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
  min = *lo_it;
  const double max = *hi_it;
  if (min == max) {
    degenerate = true;
    width = 1.0;
    counts.assign(1, n);
    return;
  }
  bins = histogram_bin_count(n);
  width = (max - min) / static_cast<double>(bins);
  threshold = coeff * static_cast<double>(n);
  counts.assign(bins, 0);
  for (double x : values) ++counts[bin_of(x)];
}

}  // namespace

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Grubbs: return "grubbs";
    case DetectorKind::Lof: return "lof";
    case DetectorKind::Histogram: return "histogram";
  }
  return "?";
}

DetectorKind detector_kind_from_string(const std::string& name) {
  if (name == "grubbs") return DetectorKind::Grubbs;
  if (name == "lof") return DetectorKind::Lof;
  if (name == "histogram") return DetectorKind::Histogram;
  throw ConfigError("unknown detector '" + name + "' (expected grubbs|lof|histogram)");
}

int DetectorSpec::effective_min_population() const {
  int floor = 3;
  if (kind == DetectorKind::Lof) floor = std::max(floor, lof_k + 1);
  return std::max(floor, min_population);
}

void DetectorSpec::validate() const {
  if (!(grubbs_alpha > 0.0 && grubbs_alpha < 1.0))
    throw ConfigError("grubbs_alpha must be in (0, 1)");
  if (lof_k < 1) throw ConfigError("lof_k must be >= 1");
  if (!(lof_threshold > 0.0)) throw ConfigError("lof_threshold must be positive");
  if (!(hist_freq_coeff > 0.0)) throw ConfigError("hist_freq_coeff must be positive");
}

std::string DetectorSpec::to_string() const {
  std::ostringstream os;
  os << pcor::to_string(kind);
  switch (kind) {
    case DetectorKind::Grubbs:
      os << "(alpha=" << grubbs_alpha;
      break;
    case DetectorKind::Lof:
      os << "(k=" << lof_k << ",threshold=" << lof_threshold;
      break;
    case DetectorKind::Histogram:
      os << "(coeff=" << hist_freq_coeff;
      break;
  }
  os << ",min_population=" << effective_min_population() << ")";
  return os.str();
}

double grubbs_statistic(std::span<const double> values, double target_value) {
  const MomentStats st = moments(values);
  if (st.stddev == 0.0) return 0.0;
  return std::abs(target_value - st.mean) / st.stddev;
}

double grubbs_critical_value(std::size_t n, double alpha) {
  if (n < 3) return kInf;
  const boost::math::students_t dist(static_cast<double>(n - 2));
  const double t = boost::math::quantile(dist, 1.0 - alpha / (2.0 * static_cast<double>(n)));
  const double t2 = t * t;
  const double nn = static_cast<double>(n);
  return (nn - 1.0) / std::sqrt(nn) * std::sqrt(t2 / (nn - 2.0 + t2));
}

double lof_score(std::span<const double> values, double target_value, int k) {
  if (k < 1) throw ConfigError("lof_score: k must be >= 1");
  if (values.size() < static_cast<std::size_t>(k) + 1)
    throw ConfigError("lof_score: need at least k+1 values");
  const auto it = std::find(values.begin(), values.end(), target_value);
  if (it == values.end()) throw ConfigError("lof_score: target value not in the population");
  const LofTable table(values, k);
  return table.score[table.position_of_index(
      static_cast<std::size_t>(it - values.begin()))];
}

std::size_t histogram_bin_count(std::size_t population_size) {
  const auto bins = static_cast<std::size_t>(
      std::llround(std::sqrt(static_cast<double>(population_size))));
  return bins > 0 ? bins : 1;
}

Verdict histogram_verdict(std::span<const double> values, double target_value, double coeff) {
  if (values.size() < 2) return {};
  const HistogramTable table(values, coeff);
  if (table.degenerate) return {false, static_cast<double>(values.size())};
  const double count = static_cast<double>(table.counts[table.bin_of(target_value)]);
  return {count < table.threshold, count};
}

Verdict verify_at(std::span<const double> values, std::size_t target_index,
                  const DetectorSpec& spec) {
  if (values.size() < static_cast<std::size_t>(spec.effective_min_population())) return {};
  switch (spec.kind) {
    case DetectorKind::Grubbs: {
      const MomentStats st = moments(values);
      if (st.stddev == 0.0) return {false, 0.0};
      const double dev = std::abs(values[target_index] - st.mean);
      const double stat = dev / st.stddev;
      // single-outlier Grubbs: only the extreme point can be flagged
      const bool extreme = dev == st.max_dev;
      const bool fires = extreme && stat > grubbs_critical_value(values.size(), spec.grubbs_alpha);
      return {fires, stat};
    }
    case DetectorKind::Lof: {
      const LofTable table(values, spec.lof_k);
      const double s = table.score[table.position_of_index(target_index)];
      return {s > spec.lof_threshold, s};
    }
    case DetectorKind::Histogram:
      return histogram_verdict(values, values[target_index], spec.hist_freq_coeff);
  }
  return {};
}

Verdict verify(const Population& population, const Record& target, const DetectorSpec& spec) {
  for (std::size_t i = 0; i < population.member_ids.size(); ++i) {
    if (population.member_ids[i] == target.id)
      return verify_at(population.metric_values, i, spec);
  }
  return {};  // target not in the population
}

std::vector<std::size_t> detect_all(std::span<const double> values, const DetectorSpec& spec) {
  std::vector<std::size_t> out;
  if (values.size() < static_cast<std::size_t>(spec.effective_min_population())) return out;
  switch (spec.kind) {
    case DetectorKind::Grubbs: {
      const MomentStats st = moments(values);
      if (st.stddev == 0.0) return out;
      if (st.max_dev / st.stddev <= grubbs_critical_value(values.size(), spec.grubbs_alpha))
        return out;
      for (std::size_t i = 0; i < values.size(); ++i)
        if (std::abs(values[i] - st.mean) == st.max_dev) out.push_back(i);
      return out;
    }
    case DetectorKind::Lof: {
      const LofTable table(values, spec.lof_k);
      for (std::size_t p = 0; p < values.size(); ++p)
        if (table.score[p] > spec.lof_threshold) out.push_back(table.perm[p]);
      std::sort(out.begin(), out.end());
      return out;
    }
    case DetectorKind::Histogram: {
      const HistogramTable table(values, spec.hist_freq_coeff);
      if (table.degenerate) return out;
      for (std::size_t i = 0; i < values.size(); ++i)
        if (static_cast<double>(table.counts[table.bin_of(values[i])]) < table.threshold)
          out.push_back(i);
      return out;
    }
  }
  return out;
}

VerifyFn make_verifier(const DetectorSpec& spec) {
  spec.validate();
  return [spec](const Population& population, const Record& target) {
    return verify(population, target, spec);
  };
}

}  // namespace pcor
