#ifndef PCOR_TESTS_FIXTURES_HPP
#define PCOR_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"

namespace pcor::testing {

/// The running income example: 3 categorical attributes with 3 values each
/// (t = 9), 10 records. Salaries are 100+i except record 8, which earns 500.
inline Schema table1_schema() {
  return Schema({{"Jobtitle", {"CEO", "Medical Doctor", "Lawyer"}},
                 {"City", {"Montreal", "Ottawa", "Toronto"}},
                 {"District", {"Business", "Historic", "Diplomatic"}}},
                "Salary");
}

inline Dataset table1_dataset() {
  const Schema schema = table1_schema();
  struct RowSpec {
    std::int64_t id;
    const char* job;
    const char* city;
    const char* district;
  };
  const RowSpec rows[] = {
      {1, "Medical Doctor", "Montreal", "Business"}, {2, "Lawyer", "Toronto", "Business"},
      {3, "CEO", "Ottawa", "Diplomatic"},            {4, "Lawyer", "Toronto", "Business"},
      {5, "Lawyer", "Ottawa", "Diplomatic"},         {6, "Medical Doctor", "Toronto", "Historic"},
      {7, "Lawyer", "Ottawa", "Business"},           {8, "Lawyer", "Ottawa", "Diplomatic"},
      {9, "CEO", "Montreal", "Historic"},            {10, "Medical Doctor", "Toronto", "Diplomatic"},
  };
  std::vector<Record> records;
  for (const RowSpec& r : rows) {
    Record rec;
    rec.id = r.id;
    rec.values = {*schema.value_index(0, r.job), *schema.value_index(1, r.city),
                  *schema.value_index(2, r.district)};
    rec.metric = r.id == 8 ? 500.0 : 100.0 + static_cast<double>(r.id);
    records.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(records));
}

inline std::string table1_csv() {
  std::string out = "id,Jobtitle,City,District,Salary\n";
  const Dataset d = table1_dataset();
  for (const Record& r : d.records()) {
    out += std::to_string(r.id) + ',' + d.schema().attributes()[0].domain[r.values[0]] + ',' +
           d.schema().attributes()[1].domain[r.values[1]] + ',' +
           d.schema().attributes()[2].domain[r.values[2]] + ',' +
           std::to_string(static_cast<int>(r.metric)) + "\n";
  }
  return out;
}

/// Verifier stub that ignores the data: every context "matches" as long as
/// the target is a population member.
inline VerifyFn accept_members() {
  return [](const Population& pop, const Record& target) {
    for (std::int64_t id : pop.member_ids)
      if (id == target.id) return Verdict{true, 0.0};
    return Verdict{false, 0.0};
  };
}

}  // namespace pcor::testing

#endif  // PCOR_TESTS_FIXTURES_HPP
