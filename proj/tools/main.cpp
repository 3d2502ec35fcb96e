// pcor: private contextual outlier release toolkit.
//
// Subcommands: gen-fixture, oracle, run, sweep, coe-match, privacy-check,
// stats. All randomized commands take --seed and are deterministic given it;
// pass --no-timing to strip wall-clock fields from outputs when byte-stable
// files are needed (e.g. for diffing runs).

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcor/errors.hpp"
#include "pcor/experiments.hpp"
#include "pcor/fixture.hpp"
#include "pcor/hash.hpp"
#include "pcor/io.hpp"
#include "pcor/oracle.hpp"
#include "pcor/privacy_audit.hpp"
#include "pcor/samplers.hpp"
#include "pcor/version.hpp"

namespace {

using pcor::Context;
using pcor::Dataset;
using pcor::DetectorSpec;
using pcor::Rng;
using pcor::RunConfig;
using pcor::SamplerSpec;
using pcor::UtilitySpec;

struct DataFlags {
  std::string data;
  std::string schema;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", data, "CSV data file")->required();
    cmd->add_option("--schema", schema, "schema file (canonical attribute order)")->required();
  }

  Dataset load() const {
    return pcor::load_dataset_file(data, pcor::load_schema_file(schema));
  }
};

struct DetectorFlags {
  std::string name = "grubbs";
  DetectorSpec spec;

  void attach(CLI::App* cmd) {
    cmd->add_option("--detector", name, "outlier detector: grubbs|lof|histogram")
        ->default_val("grubbs");
    cmd->add_option("--grubbs-alpha", spec.grubbs_alpha, "Grubbs significance level")
        ->default_val(0.05);
    cmd->add_option("--lof-k", spec.lof_k, "LOF neighbor count")->default_val(10);
    cmd->add_option("--lof-threshold", spec.lof_threshold, "LOF score cutoff")->default_val(1.5);
    cmd->add_option("--hist-coeff", spec.hist_freq_coeff, "histogram frequency coefficient")
        ->default_val(2.5e-3);
    cmd->add_option("--min-population", spec.min_population,
                    "minimum population size to attempt detection");
  }

  DetectorSpec build() const {
    DetectorSpec out = spec;
    out.kind = pcor::detector_kind_from_string(name);
    out.validate();
    return out;
  }
};

struct UtilityFlags {
  std::string name = "popsize";
  std::string starting_bits;

  void attach(CLI::App* cmd) {
    cmd->add_option("--utility", name, "utility function: popsize|overlap")
        ->default_val("popsize");
    cmd->add_option("--starting-context", starting_bits,
                    "starting context C_V as a 0/1 string (required for overlap; used by "
                    "rwalk/dfs/bfs, otherwise found automatically)");
  }

  UtilitySpec build() const {
    UtilitySpec out;
    out.kind = pcor::utility_kind_from_string(name);
    if (!starting_bits.empty()) out.starting_context = Context::from_string(starting_bits);
    out.validate();
    return out;
  }
};

std::vector<std::string> split_csv_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const std::string& item : split_csv_list(s)) out.push_back(std::stoi(item));
  return out;
}

/// Random targets for the audit commands: records for which a matching
/// starting context exists (probed with a bounded search).
std::vector<std::int64_t> probe_targets(const Dataset& dataset, const pcor::VerifyFn& verify,
                                        int count, std::uint64_t seed) {
  std::vector<std::uint32_t> rows(dataset.size());
  for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
  Rng rng(Rng::derive_seed(seed, 0x7A96E7));
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
    std::swap(rows[i], rows[j]);
  }
  std::vector<std::int64_t> out;
  for (std::uint32_t row : rows) {
    if (static_cast<int>(out.size()) == count) break;
    const pcor::Record& r = dataset.records()[row];
    try {
      Rng probe(Rng::derive_seed(seed, 0xF1BD, r.id));
      pcor::find_starting_context(dataset, r, verify, probe, 4096);
      out.push_back(r.id);
    } catch (const pcor::SamplingError&) {
    }
  }
  if (static_cast<int>(out.size()) < count)
    throw pcor::ConfigError("found only " + std::to_string(out.size()) +
                            " records with a matching context; asked for " +
                            std::to_string(count));
  return out;
}

nlohmann::json metadata_json(std::uint64_t seed, const std::string& config_text) {
  return nlohmann::json{{"pcor_version", pcor::kVersion},
                        {"seed", seed},
                        {"config_hash", pcor::fnv1a64_hex(config_text)}};
}

void add_gen_fixture(CLI::App& app) {
  auto* cmd = app.add_subcommand("gen-fixture", "generate a synthetic desk-scale dataset");
  auto spec = std::make_shared<pcor::FixtureSpec>();
  auto domains = std::make_shared<std::string>("3,3,3");
  auto out_dir = std::make_shared<std::string>();
  cmd->add_option("--out-dir", *out_dir, "output directory")->required();
  cmd->add_option("--domains", *domains, "domain sizes, e.g. 5,5,4")->default_val("3,3,3");
  cmd->add_option("--records", spec->records, "record count")->default_val(2000);
  cmd->add_option("--seed", spec->seed, "generator seed")->default_val(1);
  cmd->add_option("--outliers", spec->planted_outliers, "planted hidden outliers")
      ->default_val(1);
  cmd->add_option("--base-salary", spec->base_salary)->default_val(100000.0);
  cmd->add_option("--spacing", spec->cluster_spacing, "salary gap between groups")
      ->default_val(15000.0);
  cmd->add_option("--sigma", spec->sigma, "within-group standard deviation")
      ->default_val(2000.0);
  cmd->add_option("--plant-offset", spec->plant_offset,
                  "planted salary offset above the group-0 mean")
      ->default_val(15000.0);
  cmd->callback([spec, domains, out_dir] {
    spec->domain_sizes.clear();
    for (int d : parse_int_list(*domains)) spec->domain_sizes.push_back(d);
    const pcor::Fixture fixture = pcor::generate_fixture(*spec);
    pcor::write_fixture(*out_dir, fixture);
    std::cout << "wrote " << fixture.dataset.size() << " records, t="
              << fixture.dataset.schema().total_bits() << ", planted targets:";
    for (auto id : fixture.planted_ids) std::cout << ' ' << id;
    std::cout << '\n';
  });
}

void add_oracle(CLI::App& app) {
  auto* cmd = app.add_subcommand("oracle", "build the brute-force reference file");
  auto data = std::make_shared<DataFlags>();
  auto detector = std::make_shared<DetectorFlags>();
  auto utility = std::make_shared<UtilityFlags>();
  auto out = std::make_shared<std::string>();
  auto cap = std::make_shared<std::uint32_t>(pcor::kDefaultEnumerationCap);
  auto jobs = std::make_shared<int>(1);
  data->attach(cmd);
  detector->attach(cmd);
  utility->attach(cmd);
  cmd->add_option("--out", *out, "reference file path")->required();
  cmd->add_option("--cap", *cap, "exhaustive enumeration cap on t");
  cmd->add_option("--jobs", *jobs, "worker threads");
  cmd->callback([data, detector, utility, out, cap, jobs] {
    const Dataset dataset = data->load();
    const pcor::ReferenceFile ref = pcor::ReferenceFile::build(
        dataset, detector->build(), utility->build(), *cap, *jobs);
    ref.save_file(*out);
    std::cout << "wrote " << ref.rows().size() << " rows (t=" << ref.total_bits()
              << ") fingerprint " << ref.fingerprint() << '\n';
  });
}

struct RunFlags {
  DataFlags data;
  DetectorFlags detector;
  UtilityFlags utility;
  std::string sampler_name = "bfs";
  SamplerSpec sampler;
  std::vector<std::int64_t> target_ids;
  int random_targets = 0;
  int reps = 200;
  std::uint64_t seed = 0;
  std::string ref;
  std::string out;
  int jobs = 1;
  bool timing = true;

  void attach(CLI::App* cmd) {
    data.attach(cmd);
    detector.attach(cmd);
    utility.attach(cmd);
    cmd->add_option("--sampler", sampler_name, "direct|uniform|rwalk|dfs|bfs")
        ->default_val("bfs");
    cmd->add_option("--n", sampler.n, "sample count")->default_val(50);
    cmd->add_option("--epsilon", sampler.total_epsilon, "total privacy budget")
        ->default_val(0.2);
    cmd->add_option("--max-attempts", sampler.max_attempts, "uniform sampling attempt cap");
    cmd->add_option("--target-id", target_ids, "target record id (repeatable)");
    cmd->add_option("--random-targets", random_targets, "pick this many matching records");
    cmd->add_option("--reps", reps, "repetitions per target")->default_val(200);
    cmd->add_option("--seed", seed, "base seed")->default_val(0);
    cmd->add_option("--ref", ref, "reference file for utility ratios");
    cmd->add_option("--out", out, "output JSON path");
    cmd->add_option("--jobs", jobs, "worker threads");
    cmd->add_flag("--timing,!--no-timing", timing,
                  "include wall-clock fields in outputs (default on)");
  }

  RunConfig build() const {
    RunConfig config;
    config.data_path = data.data;
    config.schema_path = data.schema;
    config.detector = detector.build();
    config.utility = utility.build();
    config.sampler = sampler;
    config.sampler.kind = pcor::sampler_kind_from_string(sampler_name);
    if (!utility.starting_bits.empty())
      config.sampler.starting_context = Context::from_string(utility.starting_bits);
    config.targets.ids = target_ids;
    config.targets.random_count = random_targets;
    config.repetitions = reps;
    config.seed = seed;
    if (!ref.empty()) config.reference_path = ref;
    config.jobs = jobs;
    config.timing = timing;
    return config;
  }
};

void print_summary_line(const pcor::RunSummary& summary) {
  std::cout << summary.label << ": reps=" << summary.repetitions
            << " errors=" << summary.errors;
  if (summary.has_ratio) {
    std::cout << " mean_ratio=" << summary.mean_ratio << " ci90=[" << summary.ratio_ci_lo
              << "," << summary.ratio_ci_hi << "]";
  } else {
    std::cout << " mean_utility=" << summary.mean_utility;
  }
  if (summary.timing)
    std::cout << " wall_ms(mean)=" << summary.wall.mean_ns / 1e6;
  std::cout << '\n';
}

void add_run(CLI::App& app) {
  auto* cmd = app.add_subcommand("run", "release experiments for one configuration");
  auto flags = std::make_shared<RunFlags>();
  flags->attach(cmd);
  cmd->callback([flags] {
    const RunConfig config = flags->build();
    const pcor::RunSummary summary = pcor::run_experiment(config);
    if (!flags->out.empty()) pcor::write_run_output_file(flags->out, config, summary);
    print_summary_line(summary);
  });
}

void add_sweep(CLI::App& app) {
  auto* cmd = app.add_subcommand("sweep", "run one configuration across an axis of values");
  auto flags = std::make_shared<RunFlags>();
  auto axis = std::make_shared<std::string>();
  auto values = std::make_shared<std::string>();
  auto stats_out = std::make_shared<std::string>();
  auto stats_format = std::make_shared<std::string>("csv");
  flags->attach(cmd);
  cmd->add_option("--axis", *axis, "epsilon|n|sampler|detector|utility")->required();
  cmd->add_option("--values", *values, "comma-separated axis values")->required();
  cmd->add_option("--stats-out", *stats_out, "also emit histogram stats to this path");
  cmd->add_option("--stats-format", *stats_format, "csv|json")->default_val("csv");
  cmd->callback([flags, axis, values, stats_out, stats_format] {
    const RunConfig base = flags->build();
    const std::vector<pcor::RunSummary> summaries =
        pcor::sweep(base, pcor::sweep_axis_from_string(*axis), split_csv_list(*values));
    for (const auto& s : summaries) print_summary_line(s);
    if (!flags->out.empty()) {
      nlohmann::json doc;
      doc["metadata"] = metadata_json(base.seed, base.canonical_text() + "|axis=" + *axis +
                                                     "|values=" + *values);
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : summaries) {
        nlohmann::json entry{{"config", s.label},
                             {"repetitions", s.repetitions},
                             {"errors", s.errors},
                             {"mean_utility", s.mean_utility}};
        if (s.has_ratio) {
          entry["mean_utility_ratio"] = s.mean_ratio;
          entry["ratio_ci90"] = {s.ratio_ci_lo, s.ratio_ci_hi};
        }
        if (s.timing)
          entry["wall_ns"] = {{"min", s.wall.min_ns},
                              {"max", s.wall.max_ns},
                              {"mean", s.wall.mean_ns}};
        arr.push_back(std::move(entry));
      }
      doc["summaries"] = std::move(arr);
      std::ofstream out(flags->out, std::ios::binary);
      if (!out) throw pcor::IoError("cannot write sweep output: " + flags->out);
      out << doc.dump(2) << '\n';
    }
    if (!stats_out->empty()) {
      const auto format = *stats_format == "json" ? pcor::StatsFormat::Json
                                                  : pcor::StatsFormat::Csv;
      pcor::emit_stats_file(summaries, format, *stats_out);
    }
  });
}

void add_coe_match(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "coe-match", "COE similarity between a dataset and random neighboring datasets");
  auto data = std::make_shared<DataFlags>();
  auto detector = std::make_shared<DetectorFlags>();
  auto detectors = std::make_shared<std::string>("grubbs,lof,histogram");
  auto deltas = std::make_shared<std::string>("1,5,10,25");
  auto trials = std::make_shared<int>(50);
  auto targets = std::make_shared<int>(100);
  auto target_ids = std::make_shared<std::vector<std::int64_t>>();
  auto seed = std::make_shared<std::uint64_t>(0);
  auto cap = std::make_shared<std::uint32_t>(pcor::kDefaultEnumerationCap);
  auto out = std::make_shared<std::string>();
  data->attach(cmd);
  detector->attach(cmd);
  cmd->add_option("--detectors", *detectors, "detectors to audit (comma list)")
      ->default_val("grubbs,lof,histogram");
  cmd->add_option("--deltas", *deltas, "neighbor sizes, e.g. 1,5,10,25")
      ->default_val("1,5,10,25");
  cmd->add_option("--trials", *trials, "neighbors per (target, delta)")->default_val(50);
  cmd->add_option("--targets", *targets, "random target count")->default_val(100);
  cmd->add_option("--target-id", *target_ids, "explicit target id (repeatable)");
  cmd->add_option("--seed", *seed, "base seed")->default_val(0);
  cmd->add_option("--cap", *cap, "exhaustive enumeration cap on t");
  cmd->add_option("--out", *out, "output CSV path");
  cmd->callback([data, detector, detectors, deltas, trials, targets, target_ids, seed, cap,
                 out] {
    const Dataset dataset = data->load();
    std::vector<DetectorSpec> specs;
    for (const std::string& name : split_csv_list(*detectors)) {
      DetectorSpec spec = detector->spec;
      spec.kind = pcor::detector_kind_from_string(name);
      spec.validate();
      specs.push_back(spec);
    }
    std::vector<std::int64_t> ids = *target_ids;
    if (ids.empty())
      ids = probe_targets(dataset, pcor::make_verifier(specs.front()), *targets, *seed);
    const std::vector<int> delta_list = parse_int_list(*deltas);
    const pcor::MatchReport report =
        pcor::coe_match_experiment(dataset, specs, delta_list, *trials, ids, *seed, *cap);

    std::ostringstream text;
    nlohmann::json meta = metadata_json(*seed, *detectors + "|" + *deltas + "|" +
                                                   std::to_string(*trials));
    meta["metric"] = "jaccard";
    meta["targets"] = ids.size();
    meta["trials"] = *trials;
    text << meta.dump() << '\n';
    text << "detector";
    for (int d : delta_list) text << ",delta_" << d;
    text << '\n';
    for (const DetectorSpec& spec : specs) {
      text << pcor::to_string(spec.kind);
      for (int d : delta_list) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.3f", report.cell(spec.kind, d).mean_percentage);
        text << ',' << buf;
      }
      text << '\n';
    }
    std::cout << text.str();
    if (!out->empty()) {
      std::ofstream f(*out, std::ios::binary);
      if (!f) throw pcor::IoError("cannot write coe-match output: " + *out);
      f << text.str();
    }
  });
}

void add_privacy_check(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "privacy-check", "exact direct-mechanism probability ratios vs e^epsilon over neighbors");
  auto data = std::make_shared<DataFlags>();
  auto detector = std::make_shared<DetectorFlags>();
  auto utility = std::make_shared<UtilityFlags>();
  auto epsilon = std::make_shared<double>(0.2);
  auto delta = std::make_shared<int>(1);
  auto trials = std::make_shared<int>(10);
  auto targets = std::make_shared<int>(20);
  auto target_ids = std::make_shared<std::vector<std::int64_t>>();
  auto seed = std::make_shared<std::uint64_t>(0);
  auto cap = std::make_shared<std::uint32_t>(pcor::kDefaultEnumerationCap);
  auto out = std::make_shared<std::string>();
  data->attach(cmd);
  detector->attach(cmd);
  utility->attach(cmd);
  cmd->add_option("--epsilon", *epsilon, "privacy budget to audit against")->default_val(0.2);
  cmd->add_option("--delta", *delta, "records removed per neighbor")->default_val(1);
  cmd->add_option("--trials", *trials, "neighbors per target")->default_val(10);
  cmd->add_option("--targets", *targets, "random target count")->default_val(20);
  cmd->add_option("--target-id", *target_ids, "explicit target id (repeatable)");
  cmd->add_option("--seed", *seed, "base seed")->default_val(0);
  cmd->add_option("--cap", *cap, "exhaustive enumeration cap on t");
  cmd->add_option("--out", *out, "output CSV path");
  cmd->callback([data, detector, utility, epsilon, delta, trials, targets, target_ids, seed,
                 cap, out] {
    const Dataset dataset = data->load();
    const DetectorSpec det = detector->build();
    const UtilitySpec util = utility->build();
    std::vector<std::int64_t> ids = *target_ids;
    if (ids.empty())
      ids = probe_targets(dataset, pcor::make_verifier(det), *targets, *seed);
    const pcor::RatioSummary summary = pcor::ratio_audit_experiment(
        dataset, det, util, *epsilon, ids, *trials, *delta, *seed, *cap);

    std::ostringstream text;
    nlohmann::json meta =
        metadata_json(*seed, det.to_string() + "|" + util.to_string() + "|eps=" +
                                 std::to_string(*epsilon) + "|delta=" + std::to_string(*delta));
    meta["pairs"] = summary.pairs;
    meta["equal_coe_pairs"] = summary.equal_pairs;
    meta["equal_coe_pass_fraction"] = summary.equal_pass_fraction();
    meta["unequal_coe_pairs"] = summary.unequal_pairs;
    meta["unequal_coe_pass_fraction"] = summary.unequal_pass_fraction();
    meta["skipped_empty_intersection"] = summary.skipped;
    text << meta.dump() << '\n';
    text << "target,max_ratio,bound,pass,equal_coe,empty_intersection,intersection_size\n";
    char buf[64];
    for (const pcor::RatioReport& r : summary.reports) {
      std::snprintf(buf, sizeof(buf), "%.9f,%.9f", r.max_ratio, r.bound);
      text << r.target_id << ',' << buf << ',' << (r.pass ? 1 : 0) << ','
           << (r.equal_coe ? 1 : 0) << ',' << (r.empty_intersection ? 1 : 0) << ','
           << r.intersection_size << '\n';
    }
    std::cout << text.str();
    if (!out->empty()) {
      std::ofstream f(*out, std::ios::binary);
      if (!f) throw pcor::IoError("cannot write privacy-check output: " + *out);
      f << text.str();
    }
  });
}

void add_stats(CLI::App& app) {
  auto* cmd = app.add_subcommand("stats", "histogram statistics from run output files");
  auto inputs = std::make_shared<std::vector<std::string>>();
  auto format = std::make_shared<std::string>("csv");
  auto out = std::make_shared<std::string>();
  cmd->add_option("--in", *inputs, "run output JSON file (repeatable)")->required();
  cmd->add_option("--format", *format, "csv|json")->default_val("csv");
  cmd->add_option("--out", *out, "output path")->required();
  cmd->callback([inputs, format, out] {
    std::vector<pcor::RunSummary> summaries;
    for (const std::string& path : *inputs)
      summaries.push_back(pcor::read_run_output_file(path));
    const auto f = *format == "json" ? pcor::StatsFormat::Json : pcor::StatsFormat::Csv;
    pcor::emit_stats_file(summaries, f, *out);
    std::cout << "wrote stats for " << summaries.size() << " run(s) to " << *out << '\n';
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"private contextual outlier release"};
  app.set_version_flag("--version", pcor::kVersion);
  app.set_config("--config", "", "read options from an INI-style key=value file");
  app.require_subcommand(1);

  add_gen_fixture(app);
  add_oracle(app);
  add_run(app);
  add_sweep(app);
  add_coe_match(app);
  add_privacy_check(app);
  add_stats(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const pcor::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
