#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "pcor/errors.hpp"
#include "pcor/oracle.hpp"
#include "pcor/samplers.hpp"

using namespace pcor;
using pcor::testing::accept_members;
using pcor::testing::table1_dataset;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("enumerate_coe basics") {
  const Dataset d = table1_dataset();
  DetectorSpec grubbs;
  const VerifyFn verify = make_verifier(grubbs);

  SUBCASE("a target absent from the dataset has an empty COE") {
    Record ghost{999, {0, 0, 0}, 1.0};
    CHECK(enumerate_coe(d, ghost, verify).contexts.empty());
  }
  SUBCASE("an always-true stub reduces COE to containment") {
    const Record& target = *d.find_record(8);
    const CoeSet coe = enumerate_coe(d, target, accept_members());
    // one free choice per non-target bit: 2^(t-m) contexts contain the target
    CHECK(coe.contexts.size() == 64);
    for (const Context& c : coe.contexts) CHECK(contains(c, target, d.schema()));
  }
  SUBCASE("matches an independent double-loop recomputation") {
    const Record& target = *d.find_record(8);
    const CoeSet coe = enumerate_coe(d, target, verify);
    std::vector<Context> naive;
    for (std::uint64_t k = 0; k < 512; ++k) {
      const Context c = Context::from_index(9, k);
      if (pcor::verify(filter(d, c), target, grubbs).is_outlier) naive.push_back(c);
    }
    CHECK(coe.contexts == naive);
    CHECK(!coe.contexts.empty());
  }
  SUBCASE("the enumeration cap refuses oversized schemas with guidance") {
    try {
      enumerate_coe(d, *d.find_record(1), verify, 8);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("raise the cap") != std::string::npos);
    }
  }
}

TEST_CASE("direct release candidates equal the enumerated COE") {
  const Dataset d = table1_dataset();
  for (DetectorKind kind : {DetectorKind::Grubbs, DetectorKind::Histogram}) {
    DetectorSpec spec;
    spec.kind = kind;
    spec.min_population = 3;
    const VerifyFn verify = make_verifier(spec);
    const Record& target = *d.find_record(8);
    const CoeSet coe = enumerate_coe(d, target, verify);
    Rng rng(199);
    if (coe.contexts.empty()) {
      CHECK_THROWS_AS(direct_release(d, target, verify, UtilitySpec{}, 0.2, rng),
                      SamplingError);
      continue;
    }
    const ReleaseResult r = direct_release(d, target, verify, UtilitySpec{}, 0.2, rng);
    CHECK(r.sample_set.contexts == coe.contexts);
  }
}

TEST_CASE("reference file build, save, load") {
  const Dataset d = table1_dataset();
  DetectorSpec grubbs;
  UtilitySpec popsize;
  const ReferenceFile ref = ReferenceFile::build(d, grubbs, popsize);

  SUBCASE("all 2^t rows in canonical order with consistent content") {
    REQUIRE(ref.rows().size() == 512);
    for (std::uint64_t k : {0ULL, 1ULL, 73ULL, 511ULL}) {
      const ReferenceRow& row = ref.rows()[k];
      CHECK(row.context.to_index() == k);
      CHECK(row.population == d.population_size(row.context));
      CHECK(row.utility == static_cast<double>(row.population));
      // outlier list matches per-record verification
      const Population pop = filter(d, row.context);
      std::vector<std::int64_t> expected;
      for (std::size_t i = 0; i < pop.size(); ++i)
        if (verify_at(pop.metric_values, i, grubbs).is_outlier)
          expected.push_back(pop.member_ids[i]);
      CHECK(row.outlier_ids == expected);
    }
  }
  SUBCASE("round trip is byte-identical") {
    std::stringstream first;
    ref.save(first);
    std::stringstream reload_in(first.str());
    const ReferenceFile reloaded = ReferenceFile::load(reload_in);
    std::stringstream second;
    reloaded.save(second);
    CHECK(first.str() == second.str());
  }
  SUBCASE("max utility equals the brute-force argmax over the COE") {
    const VerifyFn verify = make_verifier(grubbs);
    const Record& target = *d.find_record(8);
    const CoeSet coe = enumerate_coe(d, target, verify);
    REQUIRE(!coe.contexts.empty());
    double best = 0;
    for (const Context& c : coe.contexts)
      best = std::max(best, static_cast<double>(d.population_size(c)));
    CHECK(ref.max_utility(8) == best);

    // matching rows are exactly the COE
    std::vector<Context> from_index;
    for (std::uint32_t r : ref.matching_rows(8)) from_index.push_back(ref.rows()[r].context);
    CHECK(from_index == coe.contexts);
  }
  SUBCASE("an empty-COE record has no max utility") {
    // record 1 is nobody's outlier under Grubbs on this fixture
    if (ref.matching_rows(1).empty()) CHECK_THROWS_AS(ref.max_utility(1), SamplingError);
  }
  SUBCASE("fingerprints separate configurations") {
    DetectorSpec lof;
    lof.kind = DetectorKind::Lof;
    CHECK(ReferenceFile::fingerprint_of(d.schema(), grubbs, popsize) == ref.fingerprint());
    CHECK(ReferenceFile::fingerprint_of(d.schema(), lof, popsize) != ref.fingerprint());
    UtilitySpec overlap{UtilityKind::Overlap, Context::all_ones(9)};
    CHECK(ReferenceFile::fingerprint_of(d.schema(), grubbs, overlap) != ref.fingerprint());
  }
}

TEST_CASE("reference file for the overlap utility stores intersection sizes") {
  const Dataset d = table1_dataset();
  DetectorSpec grubbs;
  const Context cv = Context::from_string("001011100");  // records {2,4,7}
  UtilitySpec overlap{UtilityKind::Overlap, cv};
  const ReferenceFile ref = ReferenceFile::build(d, grubbs, overlap);
  const ReferenceRow& row = ref.row_of(Context::from_string("001001100"));  // {2,4}
  CHECK(row.population == 2);
  CHECK(row.utility == 2.0);
  CHECK(ref.row_of(cv).utility == 3.0);
}

TEST_SUITE_END();
