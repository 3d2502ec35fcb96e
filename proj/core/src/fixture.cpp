#include "pcor/fixture.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcor/errors.hpp"
#include "pcor/io.hpp"
#include "pcor/rng.hpp"

namespace pcor {

namespace {

const char* kAttributeNames[3] = {"group", "region", "segment"};
const char kValuePrefix[3] = {'g', 'r', 's'};

}  // namespace

std::string FixtureSpec::to_string() const {
  std::ostringstream os;
  os << "fixture(domains=";
  for (std::size_t i = 0; i < domain_sizes.size(); ++i)
    os << (i ? "," : "") << domain_sizes[i];
  os << ";records=" << records << ";seed=" << seed << ";outliers=" << planted_outliers << ")";
  return os.str();
}

Fixture generate_fixture(const FixtureSpec& spec) {
  if (spec.domain_sizes.size() != 3)
    throw ConfigError("fixture generator uses exactly 3 categorical attributes");
  for (int d : spec.domain_sizes)
    if (d < 2) throw ConfigError("fixture domains need at least 2 values each");
  if (spec.records < 10) throw ConfigError("fixture needs at least 10 records");
  if (spec.planted_outliers < 0 || spec.planted_outliers > spec.records / 10)
    throw ConfigError("planted outlier count out of range");

  std::vector<Schema::Attribute> attrs(3);
  for (int a = 0; a < 3; ++a) {
    attrs[a].name = kAttributeNames[a];
    for (int v = 0; v < spec.domain_sizes[a]; ++v)
      attrs[a].domain.push_back(std::string(1, kValuePrefix[a]) + std::to_string(v));
  }
  Schema schema(std::move(attrs), "salary");

  Rng rng(spec.seed);
  std::vector<Record> records;
  records.reserve(spec.records);
  for (int i = 0; i < spec.records; ++i) {
    Record r;
    r.id = i + 1;
    r.values.resize(3);
    for (int a = 0; a < 3; ++a)
      r.values[a] = static_cast<std::uint32_t>(rng.below(spec.domain_sizes[a]));
    r.metric = spec.base_salary + spec.cluster_spacing * r.values[0] +
               spec.sigma * rng.next_gaussian();
    records.push_back(std::move(r));
  }

  Fixture fixture{spec, Dataset(schema, {}), {}};
  // plant hidden outliers: members of group 0 whose salary lands inside the
  // bulk of group 1's cluster. A small per-plant jitter keeps the planted
  // values distinct from each other.
  for (int k = 0; k < spec.planted_outliers; ++k) {
    const auto row = static_cast<std::size_t>(rng.below(records.size()));
    Record& r = records[row];
    r.values[0] = 0;
    r.metric = spec.base_salary + spec.plant_offset + 0.01 * spec.sigma * k;
    fixture.planted_ids.push_back(r.id);
  }
  std::sort(fixture.planted_ids.begin(), fixture.planted_ids.end());
  fixture.planted_ids.erase(
      std::unique(fixture.planted_ids.begin(), fixture.planted_ids.end()),
      fixture.planted_ids.end());

  fixture.dataset = Dataset(schema, std::move(records));
  return fixture;
}

void write_fixture(const std::filesystem::path& dir, const Fixture& fixture) {
  std::filesystem::create_directories(dir);
  write_schema_file(dir / "schema.txt", fixture.dataset.schema());
  write_dataset_csv_file(dir / "data.csv", fixture.dataset);

  nlohmann::json meta{{"generator", "pcor gen-fixture"},
                      {"domains", fixture.spec.domain_sizes},
                      {"records", fixture.spec.records},
                      {"seed", fixture.spec.seed},
                      {"planted_outliers", fixture.spec.planted_outliers},
                      {"base_salary", fixture.spec.base_salary},
                      {"cluster_spacing", fixture.spec.cluster_spacing},
                      {"sigma", fixture.spec.sigma},
                      {"plant_offset", fixture.spec.plant_offset},
                      {"planted_ids", fixture.planted_ids}};
  std::ofstream out(dir / "meta.json", std::ios::binary);
  if (!out) throw IoError("cannot write fixture metadata: " + (dir / "meta.json").string());
  out << meta.dump(2) << '\n';
}

}  // namespace pcor
