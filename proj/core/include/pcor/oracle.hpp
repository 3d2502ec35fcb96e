#ifndef PCOR_ORACLE_HPP
#define PCOR_ORACLE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"
#include "pcor/utility.hpp"

namespace pcor {

constexpr std::uint32_t kDefaultEnumerationCap = 24;

/// Brute-force ground truth: every matching context of one target.
struct CoeSet {
  std::int64_t target_id = 0;
  std::vector<Context> contexts;  // ascending integer interpretation

  bool contains(const Context& c) const;
};

/// Exact COE_M(D, V) by iterating all 2^t bit patterns. Refuses t above the
/// cap; raise it explicitly for bigger schemas (cost doubles per extra bit).
CoeSet enumerate_coe(const Dataset& dataset, const Record& target, const VerifyFn& verify,
                     std::uint32_t cap = kDefaultEnumerationCap);

struct ReferenceRow {
  Context context;
  std::uint32_t population = 0;
  double utility = 0.0;
  std::vector<std::int64_t> outlier_ids;
};

/// The oracle output: one row per context (ascending integer order, so row k
/// is the context with index k) holding its population size, its utility
/// under the configured utility function, and every record the configured
/// detector flags in that population. A record's matching contexts are
/// exactly the rows listing it as an outlier; ground truth for utility
/// ratios.
///
/// Serialized as a CSV with a JSON header line carrying the config
/// fingerprint (schema hash, detector spec, utility kind), so mixing files
/// across configs is detected at load/use time.
class ReferenceFile {
 public:
  static ReferenceFile build(const Dataset& dataset, const DetectorSpec& detector,
                             const UtilitySpec& utility,
                             std::uint32_t cap = kDefaultEnumerationCap, int jobs = 1);

  void save(std::ostream& out) const;
  void save_file(const std::filesystem::path& path) const;
  static ReferenceFile load(std::istream& in);
  static ReferenceFile load_file(const std::filesystem::path& path);

  const std::vector<ReferenceRow>& rows() const { return rows_; }
  std::uint32_t total_bits() const { return t_; }
  const std::string& fingerprint() const { return fingerprint_; }

  /// Row of a specific context (O(1): rows are index-addressed).
  const ReferenceRow& row_of(const Context& context) const;

  /// Matching-context rows of one record, ascending.
  const std::vector<std::uint32_t>& matching_rows(std::int64_t target_id) const;

  /// Maximum utility over the target's matching contexts. Throws
  /// SamplingError when the target has an empty COE.
  double max_utility(std::int64_t target_id) const;

  /// Fingerprint a (schema, detector, utility) configuration.
  static std::string fingerprint_of(const Schema& schema, const DetectorSpec& detector,
                                    const UtilitySpec& utility);

 private:
  std::uint32_t t_ = 0;
  std::uint64_t record_count_ = 0;
  std::string fingerprint_;
  std::string detector_text_;
  std::string utility_text_;
  std::string schema_hash_;
  std::vector<ReferenceRow> rows_;
  std::unordered_map<std::int64_t, std::vector<std::uint32_t>> index_;

  void rebuild_index();
};

}  // namespace pcor

#endif  // PCOR_ORACLE_HPP
