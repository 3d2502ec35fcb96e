#ifndef PCOR_FIXTURE_HPP
#define PCOR_FIXTURE_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pcor/dataset.hpp"

namespace pcor {

/// Synthetic desk-scale dataset: three categorical attributes whose first
/// ("group") drives the salary level, so each group forms its own salary
/// cluster. Hidden outliers are planted inside one group with a salary that
/// sits in the bulk of the next group's cluster: normal in the full dataset,
/// far from its own subgroup.
struct FixtureSpec {
  std::vector<int> domain_sizes{3, 3, 3};  // group, region, segment
  int records = 2000;
  std::uint64_t seed = 1;
  int planted_outliers = 1;
  double base_salary = 100000.0;
  double cluster_spacing = 15000.0;  // salary gap between consecutive groups
  double sigma = 2000.0;             // within-group standard deviation
  double plant_offset = 15000.0;     // planted salary = group-0 mean + offset

  std::string to_string() const;
};

struct Fixture {
  FixtureSpec spec;
  Dataset dataset;
  std::vector<std::int64_t> planted_ids;
};

Fixture generate_fixture(const FixtureSpec& spec);

/// Write data.csv, schema.txt and meta.json (generator parameters, seed and
/// planted ids) into the directory.
void write_fixture(const std::filesystem::path& dir, const Fixture& fixture);

}  // namespace pcor

#endif  // PCOR_FIXTURE_HPP
