#include "geocoherence/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "geocoherence/data.hpp"
#include "geocoherence/ensemble.hpp"
#include "geocoherence/error.hpp"
#include "geocoherence/evaluation.hpp"
#include "geocoherence/features.hpp"
#include "geocoherence/report.hpp"
#include "geocoherence/threat.hpp"

namespace geocoherence {

namespace {

// Thrown for a missing input file or unreadable report.
class DataError : public Error {
 public:
  using Error::Error;
};

struct InputOptions {
  std::string path;
  std::string format;  // empty: by extension
  bool strict = false;
};

struct OutputOptions {
  std::string path;
  std::string format;
};

struct ExtractionOptions {
  std::optional<std::size_t> alpha;
  std::string mode = "daily";
  double scale = 10000.0;
  double fill = 0.0;
  bool wrap_hours = false;
};

struct ModelOptions {
  std::string algorithm = "rf";
  std::size_t estimators = 100;
  std::size_t folds = 10;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnvironmentVariable); env != nullptr && *env != '\0') {
    std::string_view text(env);
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      throw ConfigError(std::string(kSeedEnvironmentVariable) + " is not an unsigned integer: " +
                        std::string(text));
    }
    return value;
  }
  return fallback;
}

ParseResult load_input(const InputOptions& in, std::ostream& err) {
  if (!std::filesystem::is_regular_file(in.path)) throw DataError("cannot read " + in.path);
  ParseOptions opts;
  opts.strict = in.strict;
  opts.format = in.format.empty() ? trace_format_for_path(in.path)
                                  : *trace_format_from_name(in.format);
  auto result = parse_trace_file(in.path, opts);
  if (!result.rejected.empty()) {
    err << "warning: " << result.rejected.size() << " rows rejected\n";
    constexpr std::size_t kShown = 5;
    for (std::size_t i = 0; i < std::min(kShown, result.rejected.size()); ++i) {
      const auto& r = result.rejected[i];
      err << "  line " << r.line << " (" << r.field << "): " << r.message << '\n';
    }
    if (result.rejected.size() > kShown) {
      err << "  ... " << result.rejected.size() - kShown << " more\n";
    }
  }
  return result;
}

// Writes to --output when given, else to `out`.
void emit(const OutputOptions& output, std::ostream& out,
          const std::function<void(std::ostream&)>& write) {
  if (output.path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(output.path, std::ios::binary | std::ios::trunc);
  if (!file) throw DataError("cannot write " + output.path);
  write(file);
  file.flush();
  if (!file) throw DataError("failed writing " + output.path);
}

void emit_json(const OutputOptions& output, std::ostream& out, const nlohmann::ordered_json& doc) {
  emit(output, out, [&](std::ostream& s) { s << doc.dump(2) << '\n'; });
}

ExtractionConfig extraction_config(const ExtractionOptions& opts, std::size_t default_alpha,
                                   unsigned threads) {
  ExtractionConfig cfg;
  cfg.alpha = opts.alpha.value_or(default_alpha);
  cfg.mode = *coherence_mode_from_name(opts.mode);
  cfg.scale = opts.scale;
  cfg.fill_value = opts.fill;
  cfg.wrap_hours = opts.wrap_hours;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

void warn_small_classes(const std::vector<int>& small, std::size_t k, std::ostream& err) {
  if (small.empty()) return;
  err << "warning: " << small.size() << " users have fewer than " << k
      << " samples; some folds will not contain them\n";
}

void warn_filled(std::size_t filled, std::ostream& err) {
  if (filled > 0) err << "note: " << filled << " coherence cells used the fill value\n";
}

// ---------------------------------------------------------------------------
// Option groups

void add_input(CLI::App* cmd, InputOptions& in) {
  cmd->add_option("input", in.path, "Trace file (CSV with header user_id,timestamp,latitude,longitude, or JSONL)")
      ->required();
  cmd->add_option("--input-format", in.format, "Trace format; by default jsonl for *.jsonl/*.ndjson, else csv")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  cmd->add_flag("--strict", in.strict, "Fail on the first malformed row instead of skipping it");
}

void add_output(CLI::App* cmd, OutputOptions& output, std::vector<std::string> formats,
                std::string default_format) {
  output.format = std::move(default_format);
  cmd->add_option("-o,--output", output.path, "Write the result to this file instead of stdout");
  cmd->add_option("--format", output.format, "Output format")
      ->check(CLI::IsMember(std::move(formats)))
      ->capture_default_str();
}

void add_extraction(CLI::App* cmd, ExtractionOptions& ext, const std::string& alpha_help) {
  cmd->add_option("--alpha", ext.alpha, alpha_help)->check(CLI::Range(0, 23));
  cmd->add_option("--mode", ext.mode, "Coherence window: daily ignores dates, weekly also matches the weekday")
      ->check(CLI::IsMember({"daily", "weekly"}))
      ->capture_default_str();
  cmd->add_option("--scale", ext.scale, "Multiplier applied to coherence columns")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--fill", ext.fill, "Coherence value for samples with an empty window")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_flag("--wrap-hours", ext.wrap_hours, "Measure hour distance around midnight (23 and 0 are 1 apart)");
}

void add_seed(CLI::App* cmd, ModelOptions& model) {
  cmd->add_option("--seed", model.seed,
                  std::string("Random seed (default: $") + kSeedEnvironmentVariable + ", else 0)");
}

void add_threads(CLI::App* cmd, ModelOptions& model) {
  cmd->add_option("--threads", model.threads, "Worker threads, 0 = all cores; results do not depend on it")
      ->capture_default_str();
}

void add_model(CLI::App* cmd, ModelOptions& model) {
  cmd->add_option("--estimators", model.estimators, "Trees per ensemble")
      ->check(CLI::Range(std::size_t{1}, std::size_t{100000}))
      ->capture_default_str();
  cmd->add_option("--folds", model.folds, "Cross-validation folds (k >= 2)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1000000}))
      ->capture_default_str();
  add_seed(cmd, model);
  add_threads(cmd, model);
}

const std::vector<std::string> kAlgorithmChoices = {"rf", "et", "extratrees", "bagging"};

Algorithm parse_algorithm(const std::string& name) {
  if (auto a = algorithm_from_name(name)) return *a;
  throw ConfigError("unknown algorithm: " + name);
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_ingest(const InputOptions& in, const OutputOptions& output, std::ostream& out,
                std::ostream& err) {
  const auto parsed = load_input(in, err);
  const auto summary = dataset_summary(parsed.dataset);
  if (output.format == "json") {
    emit_json(output, out, summary_json(summary, parsed.rejected.size()));
  } else {
    emit(output, out, [&](std::ostream& s) { write_summary_text(s, summary, parsed.rejected.size()); });
  }
}

void cmd_extract(const InputOptions& in, const ExtractionOptions& ext, unsigned threads,
                 const OutputOptions& output, std::ostream& out, std::ostream& err) {
  const auto parsed = load_input(in, err);
  const auto cfg = extraction_config(ext, 6, threads);
  const auto matrix = extract_feature_matrix(parsed.dataset, cfg);
  emit(output, out, [&](std::ostream& s) { write_feature_csv(s, matrix); });
  err << "filled cells: " << matrix.filled_cells << '\n';
}

void cmd_stats(const InputOptions& in, const ExtractionOptions& ext, unsigned threads,
               const OutputOptions& output, std::ostream& out, std::ostream& err) {
  const auto parsed = load_input(in, err);
  const auto cfg = extraction_config(ext, 6, threads);
  const auto matrix = extract_feature_matrix(parsed.dataset, cfg);
  warn_filled(matrix.filled_cells, err);
  const auto stats = feature_distribution(matrix);
  if (output.format == "json") {
    emit_json(output, out, stats_json(stats));
  } else if (output.format == "csv") {
    emit(output, out, [&](std::ostream& s) { write_stats_csv(s, stats); });
  } else {
    emit(output, out, [&](std::ostream& s) { write_stats_text(s, stats); });
  }
}

EnsembleConfig ensemble_config(Algorithm algorithm, const ModelOptions& model, std::uint64_t seed) {
  EnsembleConfig cfg;
  cfg.algorithm = algorithm;
  cfg.n_estimators = model.estimators;
  cfg.seed = seed;
  cfg.threads = model.threads;
  cfg.validate();
  return cfg;
}

void cmd_evaluate(const InputOptions& in, const ExtractionOptions& ext, const ModelOptions& model,
                  bool baseline, const OutputOptions& output, std::ostream& out, std::ostream& err) {
  const auto algorithm = parse_algorithm(model.algorithm);
  const auto seed = resolve_seed(model.seed, 0);
  const auto extraction = extraction_config(ext, default_alpha(algorithm), model.threads);
  const auto ensemble = ensemble_config(algorithm, model, seed);
  const auto parsed = load_input(in, err);
  const auto& dataset = parsed.dataset;
  if (dataset.user_count() < 2) throw TrainingError("evaluation needs at least two users");

  const auto result = cross_validate(dataset, extraction, ensemble, model.folds, seed);
  warn_small_classes(result.folds.small_classes, model.folds, err);
  warn_filled(result.filled_cells, err);

  std::optional<CrossValidationResult> base;
  if (baseline) {
    auto base_extraction = extraction;
    base_extraction.alpha = 0;
    base = cross_validate(dataset, base_extraction, ensemble, model.folds, seed);
  }

  EvaluationSettings settings{algorithm, extraction, model.estimators, model.folds, seed};
  if (output.format == "json") {
    auto doc = evaluation_json(settings, result, dataset.size(), dataset.user_count());
    if (base) {
      doc["baseline"] = metrics_json(base->metrics);
      doc["delta"] = metrics_json(difference(result.metrics, base->metrics));
    }
    emit_json(output, out, doc);
  } else {
    emit(output, out, [&](std::ostream& s) {
      write_evaluation_text(s, settings, result, dataset.size(), dataset.user_count());
      if (base) {
        const auto delta = metric_values(difference(result.metrics, base->metrics));
        const auto nodc = metric_values(base->metrics);
        s << "\nMeasure       NoDC   Delta\n";
        for (std::size_t i = 0; i < delta.size(); ++i) {
          char line[64];
          std::snprintf(line, sizeof line, "%-10s%8s%8s\n", kMetricNames[i], percent2(nodc[i]).c_str(),
                        signed_percent2(delta[i]).c_str());
          s << line;
        }
      }
    });
  }
}

std::vector<Algorithm> parse_algorithm_list(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) {
    const auto a = parse_algorithm(n);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

void cmd_sweep(const InputOptions& in, const ExtractionOptions& ext, const ModelOptions& model,
               const std::vector<std::string>& algorithm_names, std::size_t alpha_min,
               std::size_t alpha_max, bool best, const OutputOptions& output, std::ostream& out,
               std::ostream& err) {
  if (alpha_min > alpha_max) throw ConfigError("--alpha-min must not exceed --alpha-max");
  const auto algorithms = parse_algorithm_list(algorithm_names);
  const auto seed = resolve_seed(model.seed, 0);
  const auto parsed = load_input(in, err);
  const auto& dataset = parsed.dataset;
  if (dataset.user_count() < 2) throw TrainingError("evaluation needs at least two users");

  ExperimentConfig base;
  base.extraction = extraction_config(ext, 0, model.threads);
  base.model = ensemble_config(algorithms.front(), model, seed);
  base.k = model.folds;
  base.fold_seed = seed;

  // One experiment per algorithm so that --best can give each its own alpha.
  ExperimentTable table;
  for (const auto a : algorithms) {
    ExperimentConfig cfg = base;
    cfg.algorithms = {a};
    cfg.alphas.clear();
    if (best) {
      cfg.alphas.push_back(default_alpha(a));
    } else {
      for (std::size_t z = alpha_min; z <= alpha_max; ++z) cfg.alphas.push_back(z);
    }
    auto part = run_experiment(dataset, cfg);
    table.rows = part.rows;
    table.classes = part.classes;
    table.small_classes = part.small_classes;
    table.cells.insert(table.cells.end(), part.cells.begin(), part.cells.end());
  }
  table.config = base;
  table.config.algorithms = algorithms;
  warn_small_classes(table.small_classes, model.folds, err);

  if (output.format == "json") {
    emit_json(output, out, experiment_json(table));
  } else if (output.format == "csv") {
    emit(output, out, [&](std::ostream& s) { write_sweep_csv(s, table); });
  } else {
    emit(output, out, [&](std::ostream& s) {
      s << settings_line(base.k, base.model.n_estimators, base.extraction.scale) << '\n';
      if (!best) {
        write_alpha_table(s, table);
        s << '\n';
      }
      write_comparison_table(s, table);
    });
  }
}

// Precedence: flags, then the config file, then $GEOCOHERENCE_SEED for the seed.
void cmd_synth(const std::string& config_path, const std::optional<std::uint64_t>& seed,
               const std::map<std::string, std::function<void(SynthConfig&)>>& overrides,
               const std::string& trace_format, const OutputOptions& output, std::ostream& out,
               std::ostream& err) {
  SynthConfig base;
  base.seed = resolve_seed(std::nullopt, base.seed);
  if (!config_path.empty()) {
    std::ifstream file(config_path);
    if (!file) throw DataError("cannot read " + config_path);
    base = parse_synth_config(file, base);
  }
  for (const auto& [name, apply] : overrides) apply(base);
  if (seed) base.seed = *seed;
  base.validate();
  const auto dataset = generate_dataset(base);
  const auto format = trace_format.empty()
                          ? (output.path.empty() ? TraceFormat::kCsv : trace_format_for_path(output.path))
                          : *trace_format_from_name(trace_format);
  emit(output, out, [&](std::ostream& s) { write_trace(s, dataset, format); });
  if (!output.path.empty()) {
    err << "wrote " << dataset.size() << " samples for " << dataset.user_count() << " users to "
        << output.path << '\n';
  }
}

void cmd_threat(ThreatParams params, bool forge_given, const std::string& report_path,
                const OutputOptions& output, std::ostream& out) {
  std::string forge_source = forge_given ? "flag" : "default";
  if (!report_path.empty()) {
    std::ifstream file(report_path);
    if (!file) throw DataError("cannot read " + report_path);
    const auto doc = nlohmann::json::parse(file, nullptr, false);
    if (doc.is_discarded() || !doc.contains("metrics") || !doc["metrics"].contains("fnr") ||
        !doc["metrics"]["fnr"].is_number()) {
      throw DataError(report_path + " is not an evaluation report with metrics.fnr");
    }
    params.pr_forge = doc["metrics"]["fnr"].get<double>();
    forge_source = "report";
  }
  const double adversary = adversary_probability(params);
  const double post = post_compromise_probability(params);
  const auto space = pin_space(params.symbols, params.digits);
  if (output.format == "json") {
    nlohmann::ordered_json doc;
    doc["pr_forge"] = params.pr_forge;
    doc["pr_forge_source"] = forge_source;
    doc["tries"] = params.tries;
    doc["symbols"] = params.symbols;
    doc["digits"] = params.digits;
    doc["pin_space"] = space;
    doc["adversary_probability"] = adversary;
    doc["adversary_scientific"] = format_scientific(adversary);
    doc["adversary_percent"] = format_percent(adversary);
    doc["post_compromise_probability"] = post;
    doc["post_compromise_scientific"] = format_scientific(post);
    doc["post_compromise_percent"] = format_percent(post);
    emit_json(output, out, doc);
  } else {
    emit(output, out, [&](std::ostream& s) {
      s << "pr_forge " << format_scientific(params.pr_forge) << " (" << forge_source << "), "
        << params.tries << " tries, " << space << " PIN codes\n";
      s << "adversary success:        " << format_scientific(adversary) << "  ("
        << format_percent(adversary) << ")\n";
      s << "with known PIN:           " << format_scientific(post) << "  (" << format_percent(post)
        << ")\n";
    });
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"GPS distance-coherence authentication experiments"};
  app.name("geocoherence");
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  InputOptions in;
  OutputOptions ingest_out, extract_out, stats_out, evaluate_out, sweep_out, synth_out, threat_out;
  ExtractionOptions ext;
  ModelOptions model;
  bool baseline = false;
  bool best = false;
  std::vector<std::string> sweep_algorithms = {"rf", "et", "bagging"};
  std::size_t alpha_min = 1;
  std::size_t alpha_max = 6;

  auto* ingest = app.add_subcommand("ingest", "Parse a trace file and summarise it");
  add_input(ingest, in);
  add_output(ingest, ingest_out, {"table", "json"}, "table");

  auto* extract = app.add_subcommand("extract", "Write the feature table as CSV");
  add_input(extract, in);
  add_extraction(extract, ext, "Coherence columns dc_1..dc_alpha appended to the 7 base features [default: 6]");
  add_output(extract, extract_out, {"csv"}, "csv");
  add_threads(extract, model);

  auto* stats = app.add_subcommand("stats", "Per-feature distribution (mean, SE, median, SD, kurtosis, skewness, min, max)");
  add_input(stats, in);
  add_extraction(stats, ext, "Coherence columns to include [default: 6]");
  add_output(stats, stats_out, {"table", "csv", "json"}, "table");
  add_threads(stats, model);

  auto* evaluate = app.add_subcommand("evaluate", "Stratified k-fold evaluation of one ensemble");
  add_input(evaluate, in);
  add_extraction(evaluate, ext,
                 "Coherence columns [default: 3 for rf, 4 for extratrees, 5 for bagging; 0 = NoDC]");
  evaluate->add_option("--algorithm", model.algorithm, "rf | et (extratrees) | bagging")
      ->check(CLI::IsMember(kAlgorithmChoices))
      ->capture_default_str();
  add_model(evaluate, model);
  evaluate->add_flag("--baseline", baseline, "Also evaluate NoDC and report the difference");
  add_output(evaluate, evaluate_out, {"table", "json"}, "table");

  auto* sweep = app.add_subcommand("sweep", "Evaluate NoDC and a range of alpha values per algorithm");
  add_input(sweep, in);
  add_extraction(sweep, ext, "Ignored; use --alpha-min/--alpha-max or --best");
  sweep->add_option("--algorithms", sweep_algorithms, "Algorithms to run (rf, et, bagging)")
      ->delimiter(',')
      ->check(CLI::IsMember(kAlgorithmChoices))
      ->capture_default_str();
  sweep->add_option("--alpha-min", alpha_min, "Smallest alpha")->check(CLI::Range(1, 23))->capture_default_str();
  sweep->add_option("--alpha-max", alpha_max, "Largest alpha")->check(CLI::Range(1, 23))->capture_default_str();
  sweep->add_flag("--best", best, "Only each algorithm's default alpha (3 rf, 4 extratrees, 5 bagging)");
  add_model(sweep, model);
  add_output(sweep, sweep_out, {"csv", "table", "json"}, "csv");

  SynthConfig synth_cfg;
  std::string synth_config_path;
  std::string synth_format;
  std::map<std::string, std::function<void(SynthConfig&)>> synth_overrides;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic habit dataset");
  synth->add_option("--config", synth_config_path, "key=value file; flags override its values");
  const SynthConfig defaults;
  auto synth_flag = [&](const std::string& flag, auto SynthConfig::*field, const std::string& help) {
    auto* opt = synth->add_option(flag, synth_cfg.*field, help);
    opt->default_str(CLI::detail::to_string(defaults.*field));
    synth_overrides.emplace(flag, [&synth_cfg, field, opt](SynthConfig& c) {
      if (opt->count() > 0) c.*field = synth_cfg.*field;
    });
    return opt;
  };
  synth_flag("--users", &SynthConfig::n_users, "Number of users");
  synth_flag("--samples", &SynthConfig::samples_per_user, "Samples per user");
  synth_flag("--anchors", &SynthConfig::anchors_per_user, "Habitual places per user");
  synth_flag("--spread", &SynthConfig::anchor_spread_deg, "Side of the shared anchor region (degrees)");
  synth_flag("--noise", &SynthConfig::noise_sigma_deg, "Gaussian GPS noise sigma (degrees)");
  synth_flag("--center-lat", &SynthConfig::center_latitude, "Region centre latitude");
  synth_flag("--center-lon", &SynthConfig::center_longitude, "Region centre longitude");
  synth_flag("--stride", &SynthConfig::stride_minutes, "Minutes between samples, 0 = spread over the range");
  std::string start_text;
  std::string end_text;
  synth->add_option("--start", start_text, "First date (YYYY-MM-DD)")->default_str("2017-01-11");
  synth->add_option("--end", end_text, "Last date (YYYY-MM-DD)")->default_str("2017-04-26");
  std::optional<std::uint64_t> synth_seed;
  synth->add_option("--seed", synth_seed,
                    std::string("Random seed (default: $") + kSeedEnvironmentVariable + ", else 42)");
  synth->add_option("--output-format", synth_format, "csv | jsonl (default: by --output extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));
  synth->add_option("-o,--output", synth_out.path, "Write the trace to this file instead of stdout");

  ThreatParams threat_params;
  std::string threat_report;
  auto* threat = app.add_subcommand("threat", "Success probability of a PIN-guessing, behaviour-forging adversary");
  auto* forge_opt = threat->add_option("--forge", threat_params.pr_forge,
                                       "Probability of forging the behaviour (the classifier FNR)")
                        ->check(CLI::Range(0.0, 1.0))
                        ->capture_default_str();
  threat->add_option("--report", threat_report, "Take --forge from metrics.fnr of an 'evaluate --format json' report")
      ->excludes(forge_opt);
  threat->add_option("--tries", threat_params.tries, "PIN attempts before lock-out")->capture_default_str();
  threat->add_option("--digits", threat_params.digits, "PIN length")->capture_default_str();
  threat->add_option("--symbols", threat_params.symbols, "Symbols per PIN digit")->capture_default_str();
  add_output(threat, threat_out, {"table", "json"}, "table");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (ingest->parsed()) {
      cmd_ingest(in, ingest_out, out, err);
    } else if (extract->parsed()) {
      cmd_extract(in, ext, model.threads, extract_out, out, err);
    } else if (stats->parsed()) {
      cmd_stats(in, ext, model.threads, stats_out, out, err);
    } else if (evaluate->parsed()) {
      cmd_evaluate(in, ext, model, baseline, evaluate_out, out, err);
    } else if (sweep->parsed()) {
      cmd_sweep(in, ext, model, sweep_algorithms, alpha_min, alpha_max, best, sweep_out, out, err);
    } else if (synth->parsed()) {
      if (!start_text.empty()) {
        const auto d = parse_date(start_text);
        if (!d) throw ConfigError("bad --start date: " + start_text);
        synth_overrides.emplace("--start", [d](SynthConfig& c) { c.start = *d; });
      }
      if (!end_text.empty()) {
        const auto d = parse_date(end_text);
        if (!d) throw ConfigError("bad --end date: " + end_text);
        synth_overrides.emplace("--end", [d](SynthConfig& c) { c.end = *d; });
      }
      cmd_synth(synth_config_path, synth_seed, synth_overrides, synth_format, synth_out, out, err);
    } else if (threat->parsed()) {
      cmd_threat(threat_params, forge_opt->count() > 0, threat_report, threat_out, out);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const OverflowError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const TrainingError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitSuccess;
}

}  // namespace geocoherence
