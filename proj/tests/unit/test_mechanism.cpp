#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "pcor/errors.hpp"
#include "pcor/mechanism.hpp"

using namespace pcor;

namespace {

std::vector<UtilityValue> finite(std::initializer_list<double> xs) {
  std::vector<UtilityValue> out;
  for (double x : xs) out.push_back(UtilityValue::finite(x));
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("mechanism");

TEST_CASE("fixed probability vectors") {
  SUBCASE("equal utilities split evenly") {
    const auto p = exact_probabilities(finite({3.0, 3.0}), 0.7);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-14));
    const auto q = exact_probabilities(finite({1, 1, 1, 1, 1}), 2.0);
    for (double x : q) CHECK(x == doctest::Approx(0.2).epsilon(1e-14));
  }
  SUBCASE("utilities (0, ln 3) at epsilon 1 give (0.25, 0.75)") {
    const auto p = exact_probabilities(finite({0.0, std::log(3.0)}), 1.0);
    CHECK(p[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("utilities (5, 4) at epsilon 0.1") {
    const auto p = exact_probabilities(finite({5.0, 4.0}), 0.1);
    CHECK(p[0] == doctest::Approx(0.52497918747894).epsilon(1e-11));
    CHECK(p[1] == doctest::Approx(0.47502081252106).epsilon(1e-11));
  }
}

TEST_CASE("shift invariance and normalization") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.below(40);
    std::vector<UtilityValue> u, shifted;
    const double c = (rng.next_double() - 0.5) * 2000.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double x = rng.next_double() * 100.0;
      u.push_back(UtilityValue::finite(x));
      shifted.push_back(UtilityValue::finite(x + c));
    }
    const double eps1 = rng.next_double();
    const auto p = exact_probabilities(u, eps1);
    const auto q = exact_probabilities(shifted, eps1);
    CHECK(std::abs(std::accumulate(p.begin(), p.end(), 0.0) - 1.0) <= 1e-12);
    for (std::size_t i = 0; i < k; ++i) CHECK(std::abs(p[i] - q[i]) <= 1e-12);
  }
}

TEST_CASE("monotonicity: higher utility never has lower probability") {
  Rng rng(47);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<UtilityValue> u;
    const std::size_t k = 3 + rng.below(20);
    for (std::size_t i = 0; i < k; ++i)
      u.push_back(UtilityValue::finite(rng.next_double() * 50.0));
    const auto p = exact_probabilities(u, 0.3);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (u[i].value() > u[j].value()) CHECK(p[i] >= p[j]);
  }
}

TEST_CASE("markers get probability exactly zero") {
  std::vector<UtilityValue> u{UtilityValue::neg_infinity(), UtilityValue::finite(1.0),
                              UtilityValue::neg_infinity()};
  const auto p = exact_probabilities(u, 0.5);
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 1.0);
  CHECK(p[2] == 0.0);

  Rng rng(53);
  for (int i = 0; i < 50; ++i)
    CHECK(exp_mechanism_index(std::span<const UtilityValue>(u), 0.5, rng) == 1);
}

TEST_CASE("error cases") {
  Rng rng(59);
  std::vector<UtilityValue> empty;
  CHECK_THROWS_AS(exact_probabilities(empty, 1.0), MechanismError);
  std::vector<UtilityValue> all_marker{UtilityValue::neg_infinity(),
                                       UtilityValue::neg_infinity()};
  CHECK_THROWS_AS(exact_probabilities(all_marker, 1.0), MechanismError);
  CHECK_THROWS_AS(exact_probabilities(finite({1.0}), -0.1), ConfigError);
}

TEST_CASE("epsilon 0 degenerates to the uniform distribution over finite candidates") {
  std::vector<UtilityValue> u{UtilityValue::finite(100.0), UtilityValue::neg_infinity(),
                              UtilityValue::finite(-50.0), UtilityValue::finite(3.0)};
  const auto p = exact_probabilities(u, 0.0);
  CHECK(p[0] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(p[1] == 0.0);
  CHECK(p[2] == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(p[3] == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("huge utilities do not overflow thanks to the max shift") {
  const auto p = exact_probabilities(finite({100000.0, 99999.0}), 1.0);
  CHECK(std::isfinite(p[0]));
  CHECK(p[0] > p[1]);
  CHECK(std::abs(p[0] + p[1] - 1.0) <= 1e-12);
}

TEST_CASE("privacy ratio: perturbing utilities by at most 1 bounds the odds by e^{2 eps1}") {
  Rng rng(61);
  for (double eps1 : {0.01, 0.1, 1.0}) {
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t k = 2 + rng.below(30);
      std::vector<UtilityValue> u1, u2;
      for (std::size_t i = 0; i < k; ++i) {
        const double x = rng.next_double() * 200.0;
        u1.push_back(UtilityValue::finite(x));
        u2.push_back(UtilityValue::finite(x + (rng.next_double() * 2.0 - 1.0)));
      }
      const auto p = exact_probabilities(u1, eps1);
      const auto q = exact_probabilities(u2, eps1);
      const double bound = std::exp(2.0 * eps1) + 1e-9;
      for (std::size_t i = 0; i < k; ++i) {
        CHECK(p[i] / q[i] <= bound);
        CHECK(q[i] / p[i] <= bound);
      }
    }
  }
}

TEST_CASE("empirical draw frequencies match the exact distribution") {
  const auto utilities = finite({0.0, std::log(3.0)});
  const auto p = exact_probabilities(utilities, 1.0);
  const int draws = 20000;
  Rng rng(67);
  std::vector<int> counts(2, 0);
  for (int i = 0; i < draws; ++i)
    ++counts[exp_mechanism_index(std::span<const UtilityValue>(utilities), 1.0, rng)];
  for (std::size_t i = 0; i < 2; ++i) {
    const double sigma = std::sqrt(draws * p[i] * (1 - p[i]));
    CHECK(std::abs(counts[i] - draws * p[i]) <= 3.0 * sigma);
  }
}

TEST_CASE("draws are deterministic given the seed") {
  const auto utilities = finite({1.0, 2.0, 3.0, 2.5});
  std::vector<std::size_t> a, b;
  {
    Rng rng(71);
    for (int i = 0; i < 200; ++i)
      a.push_back(exp_mechanism_index(std::span<const UtilityValue>(utilities), 0.7, rng));
  }
  {
    Rng rng(71);
    for (int i = 0; i < 200; ++i)
      b.push_back(exp_mechanism_index(std::span<const UtilityValue>(utilities), 0.7, rng));
  }
  CHECK(a == b);
}

TEST_CASE("full-contract draw returns the chosen context and its distribution") {
  std::vector<std::pair<Context, UtilityValue>> candidates{
      {Context::from_string("10"), UtilityValue::finite(1.0)},
      {Context::from_string("01"), UtilityValue::neg_infinity()},
      {Context::from_string("11"), UtilityValue::finite(1.0)},
  };
  Rng rng(73);
  const WeightedDraw draw = exp_mechanism(candidates, 0.4, rng);
  CHECK(draw.probabilities.size() == 3);
  CHECK(draw.probabilities[1] == 0.0);
  CHECK((draw.chosen == candidates[0].first || draw.chosen == candidates[2].first));
  CHECK(draw.chosen == candidates[draw.chosen_index].first);
}

TEST_SUITE_END();
