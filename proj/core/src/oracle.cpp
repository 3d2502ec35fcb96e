#include "pcor/oracle.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcor/errors.hpp"
#include "pcor/hash.hpp"
#include "pcor/io.hpp"
#include "pcor/parallel.hpp"

namespace pcor {

namespace {

void check_cap(std::uint32_t t, std::uint32_t cap) {
  if (t > cap)
    throw ConfigError("schema has t=" + std::to_string(t) +
                      " domain values; exhaustive enumeration is capped at " +
                      std::to_string(cap) + " — raise the cap explicitly to proceed");
  if (t > 63) throw ConfigError("enumeration supports at most 63 bits");
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view s, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw IngestError(std::string("reference file: bad ") + what + " value '" +
                      std::string(s) + "'");
  return v;
}

}  // namespace

bool CoeSet::contains(const Context& c) const {
  return std::binary_search(contexts.begin(), contexts.end(), c);
}

CoeSet enumerate_coe(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                     std::uint32_t cap) {
  const std::uint32_t t = dataset.schema().total_bits();
  check_cap(t, cap);
  CoeSet coe;
  coe.target_id = target.id;
  const auto target_row = dataset.row_of(target.id);
  for (std::uint64_t k = 0; k < (1ULL << t); ++k) {
    const Context c = Context::from_index(t, k);
    if (target_row && !dataset.contains(c, *target_row)) continue;
    if (verify(dataset.filter(c), target).is_outlier) coe.contexts.push_back(c);
  }
  return coe;
}

std::string ReferenceFile::fingerprint_of(const Schema& schema, const DetectorSpec& detector,
                                          const UtilitySpec& utility) {
  return fnv1a64_hex(fnv1a64_hex(schema.canonical_text()) + "|" + detector.to_string() + "|" +
                     utility.to_string());
}

ReferenceFile ReferenceFile::build(const Dataset& dataset, const DetectorSpec& detector,
                                   const UtilitySpec& utility, std::uint32_t cap, int jobs) {
  detector.validate();
  utility.validate();
  const std::uint32_t t = dataset.schema().total_bits();
  check_cap(t, cap);

  std::vector<char> in_start;
  if (utility.kind == UtilityKind::Overlap) {
    in_start.assign(dataset.size(), 0);
    for (std::uint32_t row : dataset.filter(*utility.starting_context).member_rows)
      in_start[row] = 1;
  }

  ReferenceFile ref;
  ref.t_ = t;
  ref.record_count_ = dataset.size();
  ref.detector_text_ = detector.to_string();
  ref.utility_text_ = utility.to_string();
  ref.schema_hash_ = fnv1a64_hex(dataset.schema().canonical_text());
  ref.fingerprint_ = fingerprint_of(dataset.schema(), detector, utility);
  ref.rows_.resize(1ULL << t);

  parallel_for(1ULL << t, jobs, [&](std::size_t k) {
    ReferenceRow& row = ref.rows_[k];
    row.context = Context::from_index(t, static_cast<std::uint64_t>(k));
    const Population pop = dataset.filter(row.context);
    row.population = static_cast<std::uint32_t>(pop.size());
    if (utility.kind == UtilityKind::PopulationSize) {
      row.utility = static_cast<double>(pop.size());
    } else {
      std::size_t overlap = 0;
      for (std::uint32_t r : pop.member_rows)
        if (in_start[r]) ++overlap;
      row.utility = static_cast<double>(overlap);
    }
    for (std::size_t i : detect_all(pop.metric_values, detector))
      row.outlier_ids.push_back(pop.member_ids[i]);
  });

  ref.rebuild_index();
  return ref;
}

void ReferenceFile::rebuild_index() {
  index_.clear();
  for (std::uint32_t r = 0; r < rows_.size(); ++r)
    for (std::int64_t id : rows_[r].outlier_ids) index_[id].push_back(r);
}

const ReferenceRow& ReferenceFile::row_of(const Context& context) const {
  return rows_.at(context.to_index());
}

const std::vector<std::uint32_t>& ReferenceFile::matching_rows(std::int64_t target_id) const {
  static const std::vector<std::uint32_t> empty;
  auto it = index_.find(target_id);
  return it == index_.end() ? empty : it->second;
}

double ReferenceFile::max_utility(std::int64_t target_id) const {
  const auto& rows = matching_rows(target_id);
  if (rows.empty())
    throw SamplingError("no valid context: record " + std::to_string(target_id) +
                        " has an empty COE in the reference file");
  double best = rows_[rows.front()].utility;
  for (std::uint32_t r : rows) best = std::max(best, rows_[r].utility);
  return best;
}

void ReferenceFile::save(std::ostream& out) const {
  nlohmann::json header{{"pcor_reference", 1},
                        {"fingerprint", fingerprint_},
                        {"schema_hash", schema_hash_},
                        {"detector", detector_text_},
                        {"utility", utility_text_},
                        {"t", t_},
                        {"records", record_count_},
                        {"rows", rows_.size()}};
  out << header.dump() << '\n';
  out << "context,population,utility,outliers\n";
  for (const ReferenceRow& row : rows_) {
    out << row.context.to_string() << ',' << row.population << ','
        << format_double(row.utility) << ',';
    for (std::size_t i = 0; i < row.outlier_ids.size(); ++i) {
      if (i) out << ';';
      out << row.outlier_ids[i];
    }
    out << '\n';
  }
}

void ReferenceFile::save_file(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write reference file: " + path.string());
  save(out);
}

ReferenceFile ReferenceFile::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IngestError("reference file: missing JSON header line");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.contains("pcor_reference"))
    throw IngestError("reference file: first line is not a pcor reference header");

  ReferenceFile ref;
  ref.t_ = header.at("t").get<std::uint32_t>();
  ref.record_count_ = header.at("records").get<std::uint64_t>();
  ref.fingerprint_ = header.at("fingerprint").get<std::string>();
  ref.schema_hash_ = header.at("schema_hash").get<std::string>();
  ref.detector_text_ = header.at("detector").get<std::string>();
  ref.utility_text_ = header.at("utility").get<std::string>();
  const auto expected_rows = header.at("rows").get<std::uint64_t>();
  if (expected_rows != (1ULL << ref.t_))
    throw IngestError("reference file: row count does not equal 2^t");

  if (!std::getline(in, line) || line != "context,population,utility,outliers")
    throw IngestError("reference file: bad column header");

  ref.rows_.reserve(expected_rows);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string context_s, population_s, utility_s, outliers_s;
    std::getline(ss, context_s, ',');
    std::getline(ss, population_s, ',');
    std::getline(ss, utility_s, ',');
    std::getline(ss, outliers_s);
    ReferenceRow row;
    row.context = Context::from_string(context_s);
    row.population = static_cast<std::uint32_t>(parse_double(population_s, "population"));
    row.utility = parse_double(utility_s, "utility");
    if (!outliers_s.empty()) {
      std::stringstream os(outliers_s);
      std::string id;
      while (std::getline(os, id, ';'))
        row.outlier_ids.push_back(static_cast<std::int64_t>(parse_double(id, "outlier id")));
    }
    if (row.context.to_index() != ref.rows_.size())
      throw IngestError("reference file: rows out of canonical order");
    ref.rows_.push_back(std::move(row));
  }
  if (ref.rows_.size() != expected_rows)
    throw IngestError("reference file: expected " + std::to_string(expected_rows) +
                      " rows, found " + std::to_string(ref.rows_.size()));
  ref.rebuild_index();
  return ref;
}

ReferenceFile ReferenceFile::load_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open reference file: " + path.string());
  return load(in);
}

}  // namespace pcor
