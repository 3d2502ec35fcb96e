#include "pcor/dataset.hpp"

#include <algorithm>
#include <unordered_set>

#include "pcor/errors.hpp"

namespace pcor {

Schema::Schema(std::vector<Attribute> attributes, std::string metric_name)
    : attributes_(std::move(attributes)), metric_name_(std::move(metric_name)) {
  if (attributes_.empty()) throw SchemaError("schema needs at least one categorical attribute");
  if (metric_name_.empty()) throw SchemaError("schema needs a metric attribute name");

  offsets_.reserve(attributes_.size());
  value_index_.reserve(attributes_.size());
  for (std::uint32_t a = 0; a < attributes_.size(); ++a) {
    const Attribute& attr = attributes_[a];
    if (attr.name.empty()) throw SchemaError("attribute name must be non-empty");
    if (attr.name == metric_name_)
      throw SchemaError("attribute '" + attr.name + "' collides with the metric name");
    if (!attr_index_.emplace(attr.name, a).second)
      throw SchemaError("duplicate attribute '" + attr.name + "'");
    if (attr.domain.empty())
      throw SchemaError("attribute '" + attr.name + "' has an empty domain");

    offsets_.push_back(total_bits_);
    std::unordered_map<std::string, std::uint32_t> vmap;
    for (std::uint32_t v = 0; v < attr.domain.size(); ++v) {
      if (!vmap.emplace(attr.domain[v], v).second)
        throw SchemaError("attribute '" + attr.name + "' has duplicate value '" +
                          attr.domain[v] + "'");
    }
    value_index_.push_back(std::move(vmap));
    total_bits_ += static_cast<std::uint32_t>(attr.domain.size());
  }
}

std::optional<std::uint32_t> Schema::attribute_index(std::string_view name) const {
  auto it = attr_index_.find(std::string(name));
  if (it == attr_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Schema::value_index(std::uint32_t attr, std::string_view value) const {
  const auto& vmap = value_index_[attr];
  auto it = vmap.find(std::string(value));
  if (it == vmap.end()) return std::nullopt;
  return it->second;
}

std::string Schema::canonical_text() const {
  std::string out;
  for (const Attribute& attr : attributes_) {
    out += attr.name;
    out += ": ";
    for (std::size_t v = 0; v < attr.domain.size(); ++v) {
      if (v) out += ", ";
      out += attr.domain[v];
    }
    out += '\n';
  }
  out += "metric: ";
  out += metric_name_;
  out += '\n';
  return out;
}

Dataset::Dataset(Schema schema, std::vector<Record> records)
    : schema_(std::move(schema)), records_(std::move(records)) {
  const std::uint32_t m = schema_.attribute_count();
  bits_.reserve(records_.size() * m);
  row_by_id_.reserve(records_.size());
  for (std::uint32_t row = 0; row < records_.size(); ++row) {
    const Record& r = records_[row];
    if (r.values.size() != m)
      throw SchemaError("record id " + std::to_string(r.id) + " has " +
                        std::to_string(r.values.size()) + " values, schema has " +
                        std::to_string(m) + " attributes");
    for (std::uint32_t a = 0; a < m; ++a) {
      if (r.values[a] >= schema_.attributes()[a].domain.size())
        throw SchemaError("record id " + std::to_string(r.id) +
                          " has out-of-domain value for attribute '" +
                          schema_.attributes()[a].name + "'");
      bits_.push_back(schema_.bit_index(a, r.values[a]));
    }
    if (!row_by_id_.emplace(r.id, row).second)
      throw SchemaError("duplicate record id " + std::to_string(r.id));
  }
}

const Record* Dataset::find_record(std::int64_t id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return nullptr;
  return &records_[it->second];
}

std::optional<std::uint32_t> Dataset::row_of(std::int64_t id) const {
  auto it = row_by_id_.find(id);
  if (it == row_by_id_.end()) return std::nullopt;
  return it->second;
}

Population Dataset::filter(const Context& context) const {
  Population pop;
  pop.context = context;
  for (std::uint32_t row = 0; row < records_.size(); ++row) {
    if (contains(context, row)) {
      pop.member_ids.push_back(records_[row].id);
      pop.metric_values.push_back(records_[row].metric);
      pop.member_rows.push_back(row);
    }
  }
  return pop;
}

std::uint32_t Dataset::population_size(const Context& context) const {
  std::uint32_t n = 0;
  for (std::uint32_t row = 0; row < records_.size(); ++row)
    if (contains(context, row)) ++n;
  return n;
}

Dataset Dataset::without_rows(const std::vector<std::uint32_t>& rows) const {
  std::unordered_set<std::uint32_t> drop(rows.begin(), rows.end());
  std::vector<Record> kept;
  kept.reserve(records_.size() - drop.size());
  for (std::uint32_t row = 0; row < records_.size(); ++row)
    if (!drop.contains(row)) kept.push_back(records_[row]);
  return Dataset(schema_, std::move(kept));
}

Context encode_context(const std::vector<std::pair<std::string, std::string>>& predicates,
                       const Schema& schema) {
  Context c(schema.total_bits());
  for (const auto& [attr_name, value] : predicates) {
    auto attr = schema.attribute_index(attr_name);
    if (!attr) throw SchemaError("unknown attribute '" + attr_name + "'");
    auto v = schema.value_index(*attr, value);
    if (!v)
      throw SchemaError("unknown value '" + value + "' for attribute '" + attr_name + "'");
    c.set(schema.bit_index(*attr, *v), true);
  }
  return c;
}

bool contains(const Context& context, const Record& record, const Schema& schema) {
  for (std::uint32_t a = 0; a < schema.attribute_count(); ++a)
    if (!context.test(schema.bit_index(a, record.values[a]))) return false;
  return true;
}

Population filter(const Dataset& dataset, const Context& context) {
  return dataset.filter(context);
}

std::vector<Context> neighbors(const Context& context) { return context.neighbors(); }

}  // namespace pcor
