#ifndef PCOR_EXPERIMENTS_HPP
#define PCOR_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcor/dataset.hpp"
#include "pcor/detectors.hpp"
#include "pcor/oracle.hpp"
#include "pcor/samplers.hpp"
#include "pcor/utility.hpp"

namespace pcor {

struct TargetSelection {
  std::vector<std::int64_t> ids;  // explicit targets
  int random_count = 0;           // or: this many randomly chosen matching records
};

struct RunConfig {
  std::filesystem::path data_path;
  std::filesystem::path schema_path;
  DetectorSpec detector;
  UtilitySpec utility;
  SamplerSpec sampler;
  int repetitions = 200;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> reference_path;
  TargetSelection targets;
  int jobs = 1;
  bool timing = true;  // off: outputs carry no wall-clock fields (byte-stable)
  std::string label;

  std::string canonical_text() const;
  std::string config_hash() const;
};

struct RepetitionRow {
  std::int64_t target_id = 0;
  int repetition = 0;
  bool ok = false;
  std::string error;
  Context released;
  double utility = 0.0;
  double utility_ratio = 0.0;  // meaningful only when the summary has_ratio
  std::int64_t wall_ns = 0;
  double epsilon1 = 0.0;
  std::uint64_t mechanism_invocations = 0;
  std::uint64_t contexts_examined = 0;
  std::uint64_t sample_attempts = 0;
};

struct WallStats {
  std::int64_t min_ns = 0;
  std::int64_t max_ns = 0;
  double mean_ns = 0.0;
};

struct RunSummary {
  std::string label;
  std::string config_hash;
  std::uint64_t seed = 0;
  bool timing = true;
  std::size_t repetitions = 0;  // rows attempted (targets x reps)
  std::size_t errors = 0;       // rows excluded from the means
  bool has_ratio = false;
  double mean_ratio = 0.0;  // over ok rows; requires a reference file
  double ratio_ci_lo = 0.0;
  double ratio_ci_hi = 0.0;
  double mean_utility = 0.0;
  WallStats wall;  // release time only; reference loading is excluded
  std::vector<RepetitionRow> rows;
};

/// Run `repetitions` independent releases per target with split seeds and
/// summarize. Wall times measure the release call only. Error repetitions
/// (e.g. uniform-sampling exhaustion) are recorded per row, counted, and
/// excluded from the means; they are never retried.
RunSummary run_experiment(const RunConfig& config);
RunSummary run_experiment(const Dataset& dataset, const RunConfig& config,
                          const ReferenceFile* reference);

enum class SweepAxis { Epsilon, N, Sampler, Detector, Utility };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

/// One summary per axis value; per-value seeds derive from the shared base
/// seed. An empty value list yields an empty summary list.
std::vector<RunSummary> sweep(const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values);
std::vector<RunSummary> sweep(const Dataset& dataset, const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values,
                              const ReferenceFile* reference);

enum class StatsFormat { Csv, Json };

/// Machine-readable histograms per config: utility ratios in 20 bins over
/// [0,1] plus release-time bins, suitable for external plotting.
void emit_stats(std::span<const RunSummary> summaries, StatsFormat format, std::ostream& out);
void emit_stats_file(std::span<const RunSummary> summaries, StatsFormat format,
                     const std::filesystem::path& path);

/// Full run output: metadata header (version, seed, config hash), summary and
/// one JSON record per repetition. With config.timing off, no wall-clock
/// field is written, so equal seeds give byte-identical files.
void write_run_output(std::ostream& out, const RunConfig& config, const RunSummary& summary);
void write_run_output_file(const std::filesystem::path& path, const RunConfig& config,
                           const RunSummary& summary);

/// Parse a run output file back (enough to recompute statistics).
RunSummary read_run_output(std::istream& in);
RunSummary read_run_output_file(const std::filesystem::path& path);

}  // namespace pcor

#endif  // PCOR_EXPERIMENTS_HPP
