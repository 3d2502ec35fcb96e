#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "pcor/dataset.hpp"
#include "pcor/errors.hpp"
#include "pcor/io.hpp"
#include "pcor/rng.hpp"

using namespace pcor;
using pcor::testing::table1_csv;
using pcor::testing::table1_dataset;
using pcor::testing::table1_schema;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("encode_context reproduces the paper's running example") {
  const Schema schema = table1_schema();
  const Context c = encode_context({{"Jobtitle", "CEO"},
                                    {"Jobtitle", "Lawyer"},
                                    {"City", "Toronto"},
                                    {"District", "Historic"}},
                                   schema);
  CHECK(c.to_string() == "101001010");

  SUBCASE("all pairs give the all-ones vector") {
    std::vector<std::pair<std::string, std::string>> all;
    for (const auto& attr : schema.attributes())
      for (const auto& v : attr.domain) all.emplace_back(attr.name, v);
    CHECK(encode_context(all, schema) == Context::all_ones(9));
  }
  SUBCASE("empty predicate list gives the all-zeros vector") {
    CHECK(encode_context({}, schema) == Context(9));
  }
  SUBCASE("unknown attribute or value is a schema error") {
    CHECK_THROWS_AS(encode_context({{"Country", "CA"}}, schema), SchemaError);
    CHECK_THROWS_AS(encode_context({{"City", "Paris"}}, schema), SchemaError);
  }
}

TEST_CASE("contains selects records whose value bits are all set") {
  const Dataset d = table1_dataset();
  const Context lawyer_toronto_business = Context::from_string("001001100");
  CHECK(contains(lawyer_toronto_business, d.records()[1], d.schema()));  // record 2
  for (const Record& r : d.records()) {
    CHECK(contains(Context::all_ones(9), r, d.schema()));
    CHECK_FALSE(contains(Context(9), r, d.schema()));
  }
}

TEST_CASE("filter on the income example") {
  const Dataset d = table1_dataset();
  SUBCASE("Lawyer and Toronto and Business selects records 2 and 4") {
    const Population pop = filter(d, Context::from_string("001001100"));
    CHECK(pop.member_ids == std::vector<std::int64_t>{2, 4});
  }
  SUBCASE("CEO-or-Lawyer, Toronto, Historic selects nobody") {
    CHECK(filter(d, Context::from_string("101001010")).size() == 0);
  }
  SUBCASE("the full context selects all 10 records") {
    CHECK(filter(d, Context::all_ones(9)).size() == 10);
  }
}

TEST_CASE("filter size equals the sum of contains over records") {
  const Dataset d = table1_dataset();
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const Context c = Context::from_index(9, rng.below(512));
    std::size_t by_contains = 0;
    for (const Record& r : d.records())
      by_contains += contains(c, r, d.schema()) ? 1 : 0;
    CHECK(filter(d, c).size() == by_contains);
    CHECK(d.population_size(c) == by_contains);
  }
}

TEST_CASE("filter is monotone in the predicate set") {
  const Dataset d = table1_dataset();
  Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    Context small = Context::from_index(9, rng.below(512));
    Context big = small;
    for (std::uint32_t i = 0; i < 9; ++i)
      if (!big.test(i) && rng.bernoulli(0.5)) big.set(i, true);
    const auto a = filter(d, small).member_ids;
    const auto b = filter(d, big).member_ids;
    CHECK(std::includes(b.begin(), b.end(), a.begin(), a.end()));
  }
}

TEST_CASE("an all-zero attribute group filters to the empty population") {
  const Dataset d = table1_dataset();
  Context c = Context::all_ones(9);
  for (std::uint32_t i = 3; i < 6; ++i) c.set(i, false);  // clear the City group
  CHECK(filter(d, c).size() == 0);
}

TEST_CASE("duplicate record ids are rejected") {
  const Schema schema = table1_schema();
  std::vector<Record> records(2);
  records[0] = {7, {0, 0, 0}, 1.0};
  records[1] = {7, {1, 1, 1}, 2.0};
  CHECK_THROWS_AS(Dataset(schema, records), SchemaError);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("io");

TEST_CASE("schema file round trip is canonical") {
  const Schema schema = table1_schema();
  std::stringstream ss;
  write_schema(ss, schema);
  const Schema reloaded = load_schema(ss);
  CHECK(reloaded.canonical_text() == schema.canonical_text());
  CHECK(reloaded.total_bits() == 9);
  CHECK(reloaded.attribute_count() == 3);
  CHECK(reloaded.metric_name() == "Salary");
}

TEST_CASE("schema file errors") {
  std::stringstream no_metric("a: x, y\n");
  CHECK_THROWS_AS(load_schema(no_metric), SchemaError);
  std::stringstream dup("a: x, x\nmetric: m\n");
  CHECK_THROWS_AS(load_schema(dup), SchemaError);
  std::stringstream empty_domain("a: \nmetric: m\n");
  CHECK_THROWS_AS(load_schema(empty_domain), SchemaError);
}

TEST_CASE("loading the income example CSV") {
  std::stringstream data(table1_csv());
  const Dataset d = load_dataset(data, table1_schema());
  REQUIRE(d.size() == 10);
  CHECK(d.records()[7].metric == 500.0);
  CHECK(d.records()[0].metric == 101.0);
  CHECK(d.find_record(8) != nullptr);
}

TEST_CASE("empty CSV body with a valid header loads zero records") {
  std::stringstream data("id,Jobtitle,City,District,Salary\n");
  CHECK(load_dataset(data, table1_schema()).size() == 0);
}

TEST_CASE("out-of-domain value names the row and column") {
  std::stringstream data("id,Jobtitle,City,District,Salary\n1,CEO,Paris,Business,10\n");
  try {
    load_dataset(data, table1_schema());
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("City") != std::string::npos);
    CHECK(msg.find("Paris") != std::string::npos);
  }
}

TEST_CASE("non-numeric metric is an ingestion error") {
  std::stringstream data("id,Jobtitle,City,District,Salary\n1,CEO,Ottawa,Business,lots\n");
  CHECK_THROWS_AS(load_dataset(data, table1_schema()), IngestError);
}

TEST_CASE("RFC-4180 quoting") {
  Schema schema({{"name", {"a,b", "c\"d", "plain"}}}, "m");
  std::stringstream data("name,m\n\"a,b\",1\n\"c\"\"d\",2\nplain,3\n");
  const Dataset d = load_dataset(data, schema);
  REQUIRE(d.size() == 3);
  CHECK(d.records()[0].values[0] == 0);
  CHECK(d.records()[1].values[0] == 1);

  std::stringstream out;
  write_dataset_csv(out, d);
  std::stringstream back(out.str());
  CHECK(load_dataset(back, schema).size() == 3);
}

TEST_CASE("dataset CSV writer round-trips the income example") {
  const Dataset d = table1_dataset();
  std::stringstream out;
  write_dataset_csv(out, d);
  std::stringstream in(out.str());
  const Dataset back = load_dataset(in, d.schema());
  REQUIRE(back.size() == d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(back.records()[i].id == d.records()[i].id);
    CHECK(back.records()[i].values == d.records()[i].values);
    CHECK(back.records()[i].metric == d.records()[i].metric);
  }
}

TEST_SUITE_END();
