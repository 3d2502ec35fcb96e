#include "pcor/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pcor/errors.hpp"
#include "pcor/hash.hpp"
#include "pcor/io.hpp"
#include "pcor/parallel.hpp"
#include "pcor/version.hpp"

namespace pcor {

namespace {

constexpr double kZ90 = 1.6448536269514722;  // two-sided 90% normal quantile

struct MeanCi {
  double mean = 0.0, lo = 0.0, hi = 0.0;
};

MeanCi mean_ci(const std::vector<double>& xs) {
  MeanCi out;
  if (xs.empty()) return out;
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double sd = xs.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  const double half = kZ90 * sd / std::sqrt(n);
  out.lo = out.mean - half;
  out.hi = out.mean + half;
  return out;
}

struct ResolvedTarget {
  std::int64_t id = 0;
  std::optional<Context> starting;
  std::string starting_error;  // non-empty when no starting context was found
};

bool needs_starting(SamplerKind kind) {
  return kind == SamplerKind::RandomWalk || kind == SamplerKind::Dfs ||
         kind == SamplerKind::Bfs;
}

std::vector<ResolvedTarget> resolve_targets(const Dataset& dataset, const RunConfig& config,
                                            const ReferenceFile* reference,
                                            const VerifyFn& verify) {
  std::vector<std::int64_t> ids = config.targets.ids;
  if (ids.empty() && config.targets.random_count > 0) {
    const int want = config.targets.random_count;
    Rng rng(Rng::derive_seed(config.seed, 0x7A96E75));
    if (reference) {
      std::vector<std::int64_t> candidates;
      for (const Record& r : dataset.records())
        if (!reference->matching_rows(r.id).empty()) candidates.push_back(r.id);
      if (static_cast<int>(candidates.size()) < want)
        throw ConfigError("only " + std::to_string(candidates.size()) +
                          " records have a non-empty COE; cannot pick " + std::to_string(want));
      for (int i = 0; i < want; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(candidates.size() - i));
        std::swap(candidates[i], candidates[j]);
      }
      ids.assign(candidates.begin(), candidates.begin() + want);
    } else {
      // no oracle: probe random records for a matching starting context
      std::vector<std::uint32_t> rows(dataset.size());
      for (std::uint32_t i = 0; i < rows.size(); ++i) rows[i] = i;
      for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(rows.size() - i));
        std::swap(rows[i], rows[j]);
      }
      for (std::uint32_t row : rows) {
        if (static_cast<int>(ids.size()) == want) break;
        const Record& r = dataset.records()[row];
        try {
          Rng probe(Rng::derive_seed(config.seed, 0xF1BD, r.id));
          find_starting_context(dataset, r, verify, probe, 4096);
          ids.push_back(r.id);
        } catch (const SamplingError&) {
        }
      }
      if (static_cast<int>(ids.size()) < want)
        throw ConfigError("found only " + std::to_string(ids.size()) +
                          " records with a matching context; cannot pick " +
                          std::to_string(want));
    }
  }
  if (ids.empty()) throw ConfigError("no targets selected");

  std::vector<ResolvedTarget> out;
  out.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ResolvedTarget rt;
    rt.id = ids[i];
    const Record* record = dataset.find_record(rt.id);
    if (!record)
      throw ConfigError("target id " + std::to_string(rt.id) + " is not in the dataset");
    if (needs_starting(config.sampler.kind)) {
      if (config.sampler.starting_context) {
        rt.starting = config.sampler.starting_context;
      } else {
        try {
          Rng rng(Rng::derive_seed(config.seed, 0x57A27, i));
          rt.starting = find_starting_context(dataset, *record, verify, rng,
                                              config.sampler.max_attempts);
        } catch (const SamplingError& e) {
          rt.starting_error = e.what();
        }
      }
    }
    out.push_back(std::move(rt));
  }
  return out;
}

std::string format_double(double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void histogram_csv_rows(std::ostream& out, const std::string& label, const char* kind,
                        std::span<const double> edges, std::span<const std::size_t> counts) {
  for (std::size_t i = 0; i < counts.size(); ++i)
    out << csv_escape(label) << ',' << kind << ',' << i << ',' << format_double(edges[i]) << ','
        << format_double(edges[i + 1]) << ',' << counts[i] << '\n';
}

struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
};

Histogram ratio_histogram(const RunSummary& summary) {
  Histogram h;
  const std::size_t bins = 20;
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = static_cast<double>(i) / bins;
  h.counts.assign(bins, 0);
  if (!summary.has_ratio) return h;
  for (const RepetitionRow& row : summary.rows) {
    if (!row.ok) continue;
    auto bin = static_cast<std::size_t>(row.utility_ratio * bins);
    if (bin >= bins) bin = bins - 1;  // ratio 1.0 lands in the top bin
    ++h.counts[bin];
  }
  return h;
}

Histogram runtime_histogram(const RunSummary& summary) {
  Histogram h;
  const std::size_t bins = 20;
  std::vector<double> times;
  for (const RepetitionRow& row : summary.rows)
    if (row.ok) times.push_back(static_cast<double>(row.wall_ns));
  double lo = 0.0, hi = 1.0;
  if (!times.empty()) {
    lo = *std::min_element(times.begin(), times.end());
    hi = *std::max_element(times.begin(), times.end());
    if (hi <= lo) hi = lo + 1.0;
  }
  h.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / bins;
  h.counts.assign(bins, 0);
  for (double x : times) {
    auto bin = static_cast<std::size_t>((x - lo) / (hi - lo) * bins);
    if (bin >= bins) bin = bins - 1;
    ++h.counts[bin];
  }
  return h;
}

nlohmann::json row_to_json(const RepetitionRow& row, bool has_ratio, bool timing) {
  nlohmann::json j{{"target", row.target_id},
                   {"rep", row.repetition},
                   {"ok", row.ok}};
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  j["context"] = row.released.to_string();
  j["utility"] = row.utility;
  if (has_ratio) j["utility_ratio"] = row.utility_ratio;
  j["epsilon1"] = row.epsilon1;
  j["mechanism_invocations"] = row.mechanism_invocations;
  j["contexts_examined"] = row.contexts_examined;
  j["sample_attempts"] = row.sample_attempts;
  if (timing) j["wall_ns"] = row.wall_ns;
  return j;
}

}  // namespace

std::string RunConfig::canonical_text() const {
  std::ostringstream os;
  os << "data=" << data_path.string() << ";schema=" << schema_path.string()
     << ";detector=" << detector.to_string() << ";utility=" << utility.to_string()
     << ";sampler=" << sampler.to_string() << ";reps=" << repetitions << ";seed=" << seed
     << ";targets=";
  for (std::size_t i = 0; i < targets.ids.size(); ++i) os << (i ? "," : "") << targets.ids[i];
  if (targets.random_count) os << "random:" << targets.random_count;
  return os.str();
}

std::string RunConfig::config_hash() const { return fnv1a64_hex(canonical_text()); }

RunSummary run_experiment(const RunConfig& config) {
  const Schema schema = load_schema_file(config.schema_path);
  const Dataset dataset = load_dataset_file(config.data_path, schema);
  std::optional<ReferenceFile> reference;
  if (config.reference_path)
    reference = ReferenceFile::load_file(*config.reference_path);
  return run_experiment(dataset, config, reference ? &*reference : nullptr);
}

RunSummary run_experiment(const Dataset& dataset, const RunConfig& config,
                          const ReferenceFile* reference) {
  config.detector.validate();
  config.utility.validate();
  config.sampler.validate();
  if (config.repetitions < 1) throw ConfigError("repetitions must be >= 1");
  if (reference) {
    const std::string expected =
        ReferenceFile::fingerprint_of(dataset.schema(), config.detector, config.utility);
    if (reference->fingerprint() != expected)
      throw ConfigError(
          "reference file fingerprint does not match this configuration "
          "(different schema, detector, or utility)");
  }

  const VerifyFn verify = make_verifier(config.detector);
  const std::vector<ResolvedTarget> targets =
      resolve_targets(dataset, config, reference, verify);

  RunSummary summary;
  summary.label = config.label.empty() ? config.sampler.to_string() : config.label;
  summary.config_hash = config.config_hash();
  summary.seed = config.seed;
  summary.timing = config.timing;
  summary.has_ratio = reference != nullptr;

  std::vector<double> max_utility(targets.size(), 0.0);
  std::vector<std::string> target_error(targets.size());
  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    target_error[ti] = targets[ti].starting_error;
    if (reference && target_error[ti].empty()) {
      try {
        max_utility[ti] = reference->max_utility(targets[ti].id);
      } catch (const Error& e) {
        target_error[ti] = e.what();
      }
    }
  }

  const std::size_t total = targets.size() * static_cast<std::size_t>(config.repetitions);
  summary.rows.resize(total);
  parallel_for(total, config.jobs, [&](std::size_t flat) {
    const std::size_t ti = flat / static_cast<std::size_t>(config.repetitions);
    const int rep = static_cast<int>(flat % static_cast<std::size_t>(config.repetitions));
    RepetitionRow& row = summary.rows[flat];
    row.target_id = targets[ti].id;
    row.repetition = rep;
    if (!target_error[ti].empty()) {
      row.error = target_error[ti];
      return;
    }
    const Record& record = *dataset.find_record(targets[ti].id);
    SamplerSpec spec = config.sampler;
    spec.starting_context = targets[ti].starting;
    Rng rng(Rng::derive_seed(config.seed, ti, static_cast<std::uint64_t>(rep)));
    try {
      const ReleaseResult result = release(dataset, record, verify, config.utility, spec, rng);
      row.ok = true;
      row.released = result.private_context;
      const UtilityEvaluator evaluator(dataset, record, verify, config.utility);
      row.utility = evaluator.value_of_population(dataset.filter(result.private_context));
      if (reference && max_utility[ti] > 0.0)
        row.utility_ratio = row.utility / max_utility[ti];
      row.wall_ns = result.wall_time.count();
      row.epsilon1 = result.epsilon1_used;
      row.mechanism_invocations = result.mechanism_invocations;
      row.contexts_examined = result.contexts_examined;
      row.sample_attempts = result.sample_attempts;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });

  summary.repetitions = total;
  std::vector<double> ratios, utilities;
  std::int64_t min_ns = 0, max_ns = 0;
  double sum_ns = 0.0;
  std::size_t ok_count = 0;
  for (const RepetitionRow& row : summary.rows) {
    if (!row.ok) {
      ++summary.errors;
      continue;
    }
    utilities.push_back(row.utility);
    if (summary.has_ratio) ratios.push_back(row.utility_ratio);
    if (ok_count == 0 || row.wall_ns < min_ns) min_ns = row.wall_ns;
    if (ok_count == 0 || row.wall_ns > max_ns) max_ns = row.wall_ns;
    sum_ns += static_cast<double>(row.wall_ns);
    ++ok_count;
  }
  const MeanCi u = mean_ci(utilities);
  summary.mean_utility = u.mean;
  if (summary.has_ratio) {
    const MeanCi r = mean_ci(ratios);
    summary.mean_ratio = r.mean;
    summary.ratio_ci_lo = r.lo;
    summary.ratio_ci_hi = r.hi;
  }
  if (ok_count) {
    summary.wall.min_ns = min_ns;
    summary.wall.max_ns = max_ns;
    summary.wall.mean_ns = sum_ns / static_cast<double>(ok_count);
  }
  return summary;
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Epsilon: return "epsilon";
    case SweepAxis::N: return "n";
    case SweepAxis::Sampler: return "sampler";
    case SweepAxis::Detector: return "detector";
    case SweepAxis::Utility: return "utility";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "epsilon") return SweepAxis::Epsilon;
  if (name == "n") return SweepAxis::N;
  if (name == "sampler") return SweepAxis::Sampler;
  if (name == "detector") return SweepAxis::Detector;
  if (name == "utility") return SweepAxis::Utility;
  throw ConfigError("unknown sweep axis '" + name +
                    "' (expected epsilon|n|sampler|detector|utility)");
}

namespace {

RunConfig apply_axis(const RunConfig& base, SweepAxis axis, const std::string& value,
                     std::size_t index) {
  RunConfig config = base;
  switch (axis) {
    case SweepAxis::Epsilon: {
      config.sampler.total_epsilon = std::stod(value);
      break;
    }
    case SweepAxis::N: {
      config.sampler.n = std::stoi(value);
      break;
    }
    case SweepAxis::Sampler:
      config.sampler.kind = sampler_kind_from_string(value);
      break;
    case SweepAxis::Detector:
      config.detector.kind = detector_kind_from_string(value);
      break;
    case SweepAxis::Utility:
      config.utility.kind = utility_kind_from_string(value);
      break;
  }
  config.seed = Rng::derive_seed(base.seed, 0x53EE9, index);
  config.label = to_string(axis) + "=" + value;
  return config;
}

}  // namespace

std::vector<RunSummary> sweep(const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values) {
  if (values.empty()) return {};
  const Schema schema = load_schema_file(base.schema_path);
  const Dataset dataset = load_dataset_file(base.data_path, schema);
  std::optional<ReferenceFile> reference;
  if (base.reference_path) reference = ReferenceFile::load_file(*base.reference_path);
  return sweep(dataset, base, axis, values, reference ? &*reference : nullptr);
}

std::vector<RunSummary> sweep(const Dataset& dataset, const RunConfig& base, SweepAxis axis,
                              const std::vector<std::string>& values,
                              const ReferenceFile* reference) {
  std::vector<RunSummary> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out.push_back(run_experiment(dataset, apply_axis(base, axis, values[i], i), reference));
  return out;
}

void emit_stats(std::span<const RunSummary> summaries, StatsFormat format, std::ostream& out) {
  if (format == StatsFormat::Csv) {
    out << "config,kind,bin,lo,hi,count\n";
    for (const RunSummary& s : summaries) {
      const Histogram ratios = ratio_histogram(s);
      histogram_csv_rows(out, s.label, "utility_ratio", ratios.edges, ratios.counts);
      if (s.timing) {
        const Histogram times = runtime_histogram(s);
        histogram_csv_rows(out, s.label, "wall_ns", times.edges, times.counts);
      }
    }
    return;
  }
  nlohmann::json doc = nlohmann::json::array();
  for (const RunSummary& s : summaries) {
    const Histogram ratios = ratio_histogram(s);
    nlohmann::json entry{{"config", s.label},
                         {"repetitions", s.repetitions},
                         {"errors", s.errors},
                         {"ratio_edges", ratios.edges},
                         {"ratio_counts", ratios.counts}};
    if (s.has_ratio) entry["mean_ratio"] = s.mean_ratio;
    if (s.timing) {
      const Histogram times = runtime_histogram(s);
      entry["wall_ns_edges"] = times.edges;
      entry["wall_ns_counts"] = times.counts;
    }
    doc.push_back(std::move(entry));
  }
  out << doc.dump(2) << '\n';
}

void emit_stats_file(std::span<const RunSummary> summaries, StatsFormat format,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write stats file: " + path.string());
  emit_stats(summaries, format, out);
}

void write_run_output(std::ostream& out, const RunConfig& config, const RunSummary& summary) {
  nlohmann::json doc;
  doc["pcor_version"] = kVersion;
  doc["config_hash"] = summary.config_hash;
  doc["seed"] = summary.seed;
  doc["label"] = summary.label;
  doc["config"] = {{"data", config.data_path.string()},
                   {"schema", config.schema_path.string()},
                   {"detector", config.detector.to_string()},
                   {"utility", config.utility.to_string()},
                   {"sampler", config.sampler.to_string()},
                   {"repetitions", config.repetitions},
                   {"timing", config.timing}};
  nlohmann::json s{{"repetitions", summary.repetitions},
                   {"errors", summary.errors},
                   {"mean_utility", summary.mean_utility}};
  if (summary.has_ratio) {
    s["mean_utility_ratio"] = summary.mean_ratio;
    s["ratio_ci90"] = {summary.ratio_ci_lo, summary.ratio_ci_hi};
  }
  if (summary.timing) {
    s["wall_ns"] = {{"min", summary.wall.min_ns},
                    {"max", summary.wall.max_ns},
                    {"mean", summary.wall.mean_ns}};
  }
  doc["summary"] = std::move(s);
  nlohmann::json rows = nlohmann::json::array();
  for (const RepetitionRow& row : summary.rows)
    rows.push_back(row_to_json(row, summary.has_ratio, summary.timing));
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

void write_run_output_file(const std::filesystem::path& path, const RunConfig& config,
                           const RunSummary& summary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write run output: " + path.string());
  write_run_output(out, config, summary);
}

RunSummary read_run_output(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.contains("rows"))
    throw IngestError("not a pcor run output file");
  RunSummary summary;
  summary.label = doc.value("label", std::string("run"));
  summary.config_hash = doc.value("config_hash", std::string());
  summary.seed = doc.value("seed", std::uint64_t{0});
  summary.timing = doc["config"].value("timing", true);
  for (const auto& jr : doc["rows"]) {
    RepetitionRow row;
    row.target_id = jr.value("target", std::int64_t{0});
    row.repetition = jr.value("rep", 0);
    row.ok = jr.value("ok", false);
    if (row.ok) {
      row.released = Context::from_string(jr.value("context", std::string()));
      row.utility = jr.value("utility", 0.0);
      if (jr.contains("utility_ratio")) {
        summary.has_ratio = true;
        row.utility_ratio = jr["utility_ratio"].get<double>();
      }
      row.wall_ns = jr.value("wall_ns", std::int64_t{0});
      row.epsilon1 = jr.value("epsilon1", 0.0);
      row.mechanism_invocations = jr.value("mechanism_invocations", std::uint64_t{0});
      row.contexts_examined = jr.value("contexts_examined", std::uint64_t{0});
      row.sample_attempts = jr.value("sample_attempts", std::uint64_t{0});
    } else {
      row.error = jr.value("error", std::string());
      ++summary.errors;
    }
    summary.rows.push_back(std::move(row));
  }
  summary.repetitions = summary.rows.size();
  std::vector<double> ratios;
  for (const RepetitionRow& row : summary.rows)
    if (row.ok && summary.has_ratio) ratios.push_back(row.utility_ratio);
  if (!ratios.empty()) {
    const MeanCi r = mean_ci(ratios);
    summary.mean_ratio = r.mean;
    summary.ratio_ci_lo = r.lo;
    summary.ratio_ci_hi = r.hi;
  }
  return summary;
}

RunSummary read_run_output_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open run output: " + path.string());
  return read_run_output(in);
}

}  // namespace pcor
