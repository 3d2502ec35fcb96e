#ifndef PCOR_DATASET_HPP
#define PCOR_DATASET_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcor/context.hpp"

namespace pcor {

/// Relational schema: ordered categorical attributes (each with an ordered,
/// duplicate-free domain) plus the name of the single numeric metric
/// attribute. Declaration order is the canonical bit order for contexts, so
/// the schema file is the single source of ordering truth. Domains may contain
/// values that never occur in a loaded dataset; release algorithms must
/// enumerate over the full domain, not just observed values.
class Schema {
 public:
  struct Attribute {
    std::string name;
    std::vector<std::string> domain;
  };

  Schema(std::vector<Attribute> attributes, std::string metric_name);

  const std::vector<Attribute>& attributes() const { return attributes_; }
  const std::string& metric_name() const { return metric_name_; }

  /// m: number of categorical attributes.
  std::uint32_t attribute_count() const { return static_cast<std::uint32_t>(attributes_.size()); }

  /// t: total number of domain values = context bit length.
  std::uint32_t total_bits() const { return total_bits_; }

  std::uint32_t bit_offset(std::uint32_t attr) const { return offsets_[attr]; }
  std::uint32_t bit_index(std::uint32_t attr, std::uint32_t value) const {
    return offsets_[attr] + value;
  }

  std::optional<std::uint32_t> attribute_index(std::string_view name) const;
  std::optional<std::uint32_t> value_index(std::uint32_t attr, std::string_view value) const;

  /// Canonical schema-file text; also the schema part of file fingerprints.
  std::string canonical_text() const;

 private:
  std::vector<Attribute> attributes_;
  std::string metric_name_;
  std::vector<std::uint32_t> offsets_;
  std::uint32_t total_bits_ = 0;
  std::unordered_map<std::string, std::uint32_t> attr_index_;
  std::vector<std::unordered_map<std::string, std::uint32_t>> value_index_;
};

/// One tuple: a categorical value (stored as domain index) per attribute plus
/// the numeric metric.
struct Record {
  std::int64_t id = 0;
  std::vector<std::uint32_t> values;  // domain index per attribute, schema order
  double metric = 0.0;
};

/// Population selected by a context: the filtered record ids with their metric
/// values. member_rows are the dataset row indices (ascending), kept so that
/// detectors and overlap counts can work positionally.
struct Population {
  Context context;
  std::vector<std::int64_t> member_ids;
  std::vector<double> metric_values;
  std::vector<std::uint32_t> member_rows;

  std::size_t size() const { return member_ids.size(); }
};

/// Immutable dataset: schema plus records with unique ids. Safe to share
/// across parallel workers; all operations are pure.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<Record> records);

  const Schema& schema() const { return schema_; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  const Record* find_record(std::int64_t id) const;
  std::optional<std::uint32_t> row_of(std::int64_t id) const;

  /// True iff the context selects the record at `row`: for every attribute,
  /// the bit of the record's value is set.
  bool contains(const Context& context, std::uint32_t row) const {
    const std::uint32_t m = schema_.attribute_count();
    const std::uint32_t* bits = &bits_[static_cast<std::size_t>(row) * m];
    for (std::uint32_t i = 0; i < m; ++i)
      if (!context.test(bits[i])) return false;
    return true;
  }

  Population filter(const Context& context) const;
  std::uint32_t population_size(const Context& context) const;

  /// Copy with the given rows removed (record ids and order preserved).
  Dataset without_rows(const std::vector<std::uint32_t>& rows) const;

 private:
  Schema schema_;
  std::vector<Record> records_;
  std::vector<std::uint32_t> bits_;  // m global bit indices per record
  std::unordered_map<std::int64_t, std::uint32_t> row_by_id_;
};

/// Build a context from (attribute name, value) predicate pairs.
Context encode_context(const std::vector<std::pair<std::string, std::string>>& predicates,
                       const Schema& schema);

/// Membership test for a free-standing record (not necessarily in a dataset).
bool contains(const Context& context, const Record& record, const Schema& schema);

Population filter(const Dataset& dataset, const Context& context);

std::vector<Context> neighbors(const Context& context);

}  // namespace pcor

#endif  // PCOR_DATASET_HPP
