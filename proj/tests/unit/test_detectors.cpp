#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "fixtures.hpp"
#include "pcor/detectors.hpp"
#include "pcor/errors.hpp"
#include "pcor/rng.hpp"

using namespace pcor;

namespace {

std::vector<double> grubbs_fixture() {
  std::vector<double> vals;
  for (int i = 101; i <= 110; ++i) vals.push_back(i);
  vals.push_back(500.0);
  return vals;
}

Population make_population(const std::vector<double>& values) {
  Population pop;
  for (std::size_t i = 0; i < values.size(); ++i) {
    pop.member_ids.push_back(static_cast<std::int64_t>(i + 1));
    pop.metric_values.push_back(values[i]);
    pop.member_rows.push_back(static_cast<std::uint32_t>(i));
  }
  return pop;
}

Record record_with(std::int64_t id, double metric) { return Record{id, {}, metric}; }

}  // namespace

TEST_SUITE_BEGIN("detectors");

TEST_CASE("grubbs statistic on fixed points") {
  const std::vector<double> flat{1, 1, 1, 1, 1};
  CHECK(grubbs_statistic(flat, 1.0) == 0.0);

  const std::vector<double> spread{0, 0, 0, 0, 10};
  // |10 - 2| / sqrt(20), evaluated independently
  CHECK(grubbs_statistic(spread, 10.0) == doctest::Approx(1.7888543819998317).epsilon(1e-12));
}

TEST_CASE("grubbs statistic is translation and scale invariant") {
  Rng rng(17);
  std::vector<double> vals;
  for (int i = 0; i < 30; ++i) vals.push_back(rng.next_gaussian() * 10.0);
  const double base = grubbs_statistic(vals, vals[3]);
  for (double shift : {13.5, -220.0}) {
    std::vector<double> shifted = vals;
    for (double& x : shifted) x += shift;
    CHECK(grubbs_statistic(shifted, vals[3] + shift) == doctest::Approx(base).epsilon(1e-9));
  }
  std::vector<double> scaled = vals;
  for (double& x : scaled) x = 3.5 * x + 7.0;
  CHECK(grubbs_statistic(scaled, 3.5 * vals[3] + 7.0) == doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("grubbs flags the planted salary") {
  const auto vals = grubbs_fixture();
  // independent evaluation of the test statistic and critical value
  double mean = 0;
  for (double v : vals) mean += v;
  mean /= vals.size();
  double ss = 0;
  for (double v : vals) ss += (v - mean) * (v - mean);
  const double s = std::sqrt(ss / (vals.size() - 1));
  const double expected_stat = std::abs(500.0 - mean) / s;
  CHECK(expected_stat == doctest::Approx(3.01423475433063).epsilon(1e-12));
  CHECK(grubbs_critical_value(11, 0.05) == doctest::Approx(2.35473005156554).epsilon(1e-9));

  DetectorSpec spec;
  spec.kind = DetectorKind::Grubbs;
  const Verdict v = verify_at(vals, 10, spec);
  CHECK(v.is_outlier);
  CHECK(v.score == doctest::Approx(expected_stat).epsilon(1e-12));

  SUBCASE("a non-extreme member is never flagged") {
    CHECK_FALSE(verify_at(vals, 0, spec).is_outlier);
  }
}

TEST_CASE("grubbs critical value agrees with the t-distribution formula") {
  for (std::size_t n : {4u, 11u, 30u, 100u}) {
    const boost::math::students_t dist(static_cast<double>(n - 2));
    const double t = boost::math::quantile(dist, 1.0 - 0.05 / (2.0 * n));
    const double expected =
        (n - 1.0) / std::sqrt(static_cast<double>(n)) * std::sqrt(t * t / (n - 2.0 + t * t));
    CHECK(grubbs_critical_value(n, 0.05) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("lof score on the four-point fixture is exactly 51.625") {
  const std::vector<double> vals{1.0, 1.1, 1.2, 10.0};
  CHECK(lof_score(vals, 10.0, 2) == doctest::Approx(51.625).epsilon(1e-9));

  DetectorSpec spec;
  spec.kind = DetectorKind::Lof;
  spec.lof_k = 2;
  const Verdict v = verify_at(vals, 3, spec);
  CHECK(v.is_outlier);
  CHECK(v.score == doctest::Approx(51.625).epsilon(1e-9));
}

TEST_CASE("lof of an interior point of an even grid is near 1") {
  std::vector<double> vals;
  for (int i = 0; i <= 20; ++i) vals.push_back(i);
  CHECK(lof_score(vals, 10.0, 3) == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("lof of a duplicated value inside a tight cluster is near 1") {
  const std::vector<double> identical{2.0, 2.0, 2.0, 2.0, 2.0};
  CHECK(lof_score(identical, 2.0, 2) == 1.0);

  const std::vector<double> cluster{1.00, 1.01, 1.00, 0.99, 1.02, 1.00};
  CHECK(lof_score(cluster, 1.00, 2) == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("lof input guards") {
  const std::vector<double> vals{1.0, 2.0};
  CHECK_THROWS_AS(lof_score(vals, 1.0, 2), ConfigError);
  CHECK_THROWS_AS(lof_score(std::vector<double>{1, 2, 3, 4}, 99.0, 2), ConfigError);
}

TEST_CASE("histogram bin count and threshold follow the sqrt rule") {
  CHECK(histogram_bin_count(10000) == 100);
  CHECK(histogram_bin_count(1) == 1);

  // 10000 uniform values plus one far point: the far bin holds 1 < 25
  Rng rng(23);
  std::vector<double> vals;
  for (int i = 0; i < 10000; ++i) vals.push_back(rng.next_double() * 100.0);
  vals.push_back(1e6);
  const Verdict v = histogram_verdict(vals, 1e6, 2.5e-3);
  CHECK(v.is_outlier);
  CHECK(v.score == 1.0);  // bin count of the target

  SUBCASE("independent recount of the target bin") {
    const auto [lo, hi] = std::minmax_element(vals.begin(), vals.end());
    const std::size_t bins = histogram_bin_count(vals.size());
    const double width = (*hi - *lo) / static_cast<double>(bins);
    std::size_t count = 0;
    for (double x : vals) {
      auto b = static_cast<std::size_t>((x - *lo) / width);
      if (b >= bins) b = bins - 1;
      if (b == bins - 1) ++count;
    }
    CHECK(count == 1);
  }
}

TEST_CASE("histogram threshold below 1 can never flag an occupied bin") {
  // |D_C| = 100: threshold 0.25, every occupied bin survives
  Rng rng(29);
  std::vector<double> vals;
  for (int i = 0; i < 100; ++i) vals.push_back(rng.next_double() * 100.0);
  for (double x : vals) {
    CHECK_FALSE(histogram_verdict(vals, x, 2.5e-3).is_outlier);
  }
}

TEST_CASE("histogram with all values equal is a single quiet bin") {
  const std::vector<double> same(50, 7.0);
  CHECK_FALSE(histogram_verdict(same, 7.0, 2.5e-3).is_outlier);
}

TEST_CASE("verify is false for absent targets and degenerate populations") {
  DetectorSpec spec;
  for (DetectorKind kind : {DetectorKind::Grubbs, DetectorKind::Lof, DetectorKind::Histogram}) {
    spec.kind = kind;
    const Population pop = make_population({10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 400});
    CHECK_FALSE(verify(pop, record_with(999, 400.0), spec).is_outlier);  // absent id

    const Population identical = make_population(std::vector<double>(20, 5.0));
    CHECK_FALSE(verify(identical, record_with(3, 5.0), spec).is_outlier);

    const Population tiny = make_population({1.0, 100.0});
    CHECK_FALSE(verify(tiny, record_with(2, 100.0), spec).is_outlier);
  }
}

TEST_CASE("verdicts are permutation invariant") {
  Rng rng(31);
  DetectorSpec spec;
  spec.lof_k = 4;
  std::vector<double> vals;
  for (int i = 0; i < 40; ++i) vals.push_back(rng.next_gaussian());
  vals.push_back(8.0);
  for (DetectorKind kind : {DetectorKind::Grubbs, DetectorKind::Lof, DetectorKind::Histogram}) {
    spec.kind = kind;
    const std::size_t target = vals.size() - 1;
    const Verdict base = verify_at(vals, target, spec);
    for (int shuffle = 0; shuffle < 5; ++shuffle) {
      std::vector<std::size_t> perm(vals.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      for (std::size_t i = perm.size(); i > 1; --i)
        std::swap(perm[i - 1], perm[rng.below(i)]);
      std::vector<double> shuffled(vals.size());
      std::size_t new_target = 0;
      for (std::size_t i = 0; i < perm.size(); ++i) {
        shuffled[i] = vals[perm[i]];
        if (perm[i] == target) new_target = i;
      }
      const Verdict v = verify_at(shuffled, new_target, spec);
      CHECK(v.is_outlier == base.is_outlier);
      CHECK(v.score == doctest::Approx(base.score).epsilon(1e-9));
    }
  }
}

TEST_CASE("detect_all agrees with per-member verification") {
  Rng rng(37);
  DetectorSpec spec;
  spec.lof_k = 3;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> vals;
    const int n = 15 + static_cast<int>(rng.below(30));
    for (int i = 0; i < n; ++i) vals.push_back(rng.next_gaussian() * 5.0);
    if (rng.bernoulli(0.7)) vals.push_back(50.0 + rng.next_double());
    for (DetectorKind kind :
         {DetectorKind::Grubbs, DetectorKind::Lof, DetectorKind::Histogram}) {
      spec.kind = kind;
      const std::vector<std::size_t> flagged = detect_all(vals, spec);
      CHECK(std::is_sorted(flagged.begin(), flagged.end()));
      for (std::size_t i = 0; i < vals.size(); ++i) {
        const bool in_list = std::binary_search(flagged.begin(), flagged.end(), i);
        CHECK(in_list == verify_at(vals, i, spec).is_outlier);
      }
    }
  }
}

TEST_CASE("spec validation") {
  DetectorSpec spec;
  spec.grubbs_alpha = 1.5;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = DetectorSpec{};
  spec.lof_k = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec = DetectorSpec{};
  CHECK(spec.effective_min_population() == 3);
  spec.kind = DetectorKind::Lof;
  CHECK(spec.effective_min_population() == 11);
  spec.min_population = 40;
  CHECK(spec.effective_min_population() == 40);
}

TEST_SUITE_END();
