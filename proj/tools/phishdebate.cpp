#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phishdebate/config.hpp"
#include "phishdebate/debate.hpp"
#include "phishdebate/evaluation.hpp"
#include "phishdebate/sample.hpp"

namespace {

using namespace phishdebate;

constexpr int kExitSampleError = 2;
constexpr int kExitConfigError = 64;  // EX_USAGE
constexpr int kExitIoError = 66;      // EX_NOINPUT

struct CommonArgs {
  std::string config_file;
  CliOverrides overrides;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "Path to phishdebate.json");
  cmd->add_option("--max-rounds", args.overrides.max_rounds, "Maximum debate rounds (1-10)");
  cmd->add_option("--tau", args.overrides.tau, "Consensus confidence threshold in [0,1]");
  cmd->add_option("--max-inflight", args.overrides.max_inflight,
                  "Global ceiling on in-flight backend requests");
  cmd->add_option("--out", args.overrides.out_dir, "Output directory");
  cmd->add_option("--backend", args.overrides.backend,
                  "Backend selector: live or scripted:<rules-file>");
}

EngineConfig build_config(const CommonArgs& args) {
  EngineConfig config;
  if (!args.config_file.empty()) {
    config = load_engine_config(args.config_file);
  }
  apply_overrides(config, args.overrides);
  return config;
}

std::string bool_name(bool value) { return value ? "true" : "false"; }

Dataset load_dataset_arg(const std::filesystem::path& path) {
  DatasetManifest manifest = std::filesystem::is_regular_file(path)
                                 ? manifest_from_json_file(path)
                                 : manifest_from_directory(path);
  return load_dataset(manifest);
}

int cmd_classify(const CommonArgs& common, const std::string& url_file,
                 const std::string& html_file) {
  EngineConfig config;
  std::shared_ptr<CompletionBackend> backend;
  try {
    config = build_config(common);
    config.debate.templates = resolve_templates(config);
    validate_config(config.debate);
    backend = make_backend(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  LoadOutcome outcome = load_raw_sample(url_file, html_file);
  if (std::holds_alternative<SampleLoadError>(outcome)) {
    std::cerr << "input error: " << std::get<SampleLoadError>(outcome).reason << "\n";
    return kExitIoError;
  }
  if (std::holds_alternative<SampleSkip>(outcome)) {
    std::cerr << "input error: " << std::get<SampleSkip>(outcome).reason << "\n";
    return kExitIoError;
  }
  RawSample raw = std::get<RawSample>(std::move(outcome));
  raw.id = std::filesystem::path(url_file).stem().string();
  ProcessedSample sample = preprocess(raw, std::nullopt);

  try {
    DebateTranscript transcript = run_debate(sample, config.debate, *backend);
    std::cout << "ASSESSMENT=" << assessment_name(transcript.verdict.assessment)
              << " CONFIDENCE=" << format_confidence(transcript.verdict.confidence)
              << " ROUNDS=" << transcript.rounds_used
              << " EARLY_TERMINATION=" << bool_name(transcript.early_termination) << "\n";
    std::cout << transcript_to_json(transcript).dump(2) << "\n";
    return 0;
  } catch (const DebateSampleError& e) {
    std::cerr << "sample error: " << e.what() << "\n";
    return kExitSampleError;
  }
}

int cmd_evaluate(const CommonArgs& common, const std::string& dataset_path,
                 const std::string& method_flag, bool resume) {
  EngineConfig config;
  std::shared_ptr<CompletionBackend> backend;
  BenchmarkOptions options;
  try {
    config = build_config(common);
    auto method = method_from_name(method_flag);
    if (!method) throw ConfigError("--method must be debate, direct or cot");
    options.method = *method;
    options.debate = config.debate;
    options.baseline_model = config.baseline_model;
    options.budget = config.debate.budget;
    options.templates = resolve_templates(config);
    options.out_dir = config.output_dir;
    options.resume = resume;
    options.max_parallel_samples = config.max_inflight;
    options.price_table = config.price_table;
    if (options.method == Method::Debate) validate_config(options.debate);
    backend = make_backend(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  Dataset dataset;
  try {
    dataset = load_dataset_arg(dataset_path);
  } catch (const std::exception& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kExitIoError;
  }

  BenchmarkOutcome outcome = run_benchmark(dataset.samples, options, *backend);
  write_report_files(outcome, options.out_dir);
  std::cout << report_to_text(outcome.report);
  if (!dataset.skipped.empty()) {
    std::cout << "skipped " << dataset.skipped.size() << " sample(s) during load\n";
  }
  return 0;
}

int cmd_scenario(const CommonArgs& common, const std::vector<std::string>& dataset_paths,
                 const std::vector<std::string>& custom_excludes, bool resume) {
  EngineConfig config;
  std::shared_ptr<CompletionBackend> backend;
  BenchmarkOptions options;
  std::vector<ScenarioSetting> settings;
  try {
    config = build_config(common);
    options.method = Method::Debate;
    options.debate = config.debate;
    options.budget = config.debate.budget;
    options.templates = resolve_templates(config);
    options.out_dir = config.output_dir;
    options.resume = resume;
    options.max_parallel_samples = config.max_inflight;
    settings = canonical_scenario_settings();
    for (const std::string& spec : custom_excludes) {
      ScenarioSetting setting;
      setting.name = "W/O " + spec;
      std::size_t start = 0;
      while (start <= spec.size()) {
        std::size_t comma = spec.find(',', start);
        std::string token = spec.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) {
          auto kind = agent_from_flag_name(token);
          if (!kind) throw ConfigError("unknown agent in --exclude: " + token);
          setting.excluded.insert(*kind);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      settings.push_back(std::move(setting));
    }
    // Every setting must validate before any backend traffic.
    for (const ScenarioSetting& setting : settings) {
      DebateConfig candidate = options.debate;
      for (AgentKind kind : setting.excluded) candidate.active_agents.erase(kind);
      validate_config(candidate);
    }
    backend = make_backend(config);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  }

  std::vector<std::vector<ProcessedSample>> datasets;
  try {
    for (const std::string& path : dataset_paths) {
      datasets.push_back(load_dataset_arg(path).samples);
    }
  } catch (const std::exception& e) {
    std::cerr << "dataset error: " << e.what() << "\n";
    return kExitIoError;
  }

  std::vector<ScenarioRow> rows = scenario_analysis(datasets, settings, options, *backend);
  std::filesystem::create_directories(options.out_dir);
  {
    std::ofstream out(options.out_dir / "scenario.json", std::ios::binary | std::ios::trunc);
    out << scenario_rows_to_json(rows).dump(2) << '\n';
  }
  {
    std::ofstream out(options.out_dir / "scenario.txt", std::ios::binary | std::ios::trunc);
    out << scenario_rows_to_text(rows);
  }
  std::cout << scenario_rows_to_text(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PhishDebate: multi-agent debate for phishing website classification"};
  app.require_subcommand(1);

  CommonArgs classify_args;
  std::string url_file, html_file;
  CLI::App* classify = app.add_subcommand(
      "classify", "Classify one website from its URL and HTML files");
  classify->add_option("url_file", url_file, "File holding the URL")->required();
  classify->add_option("html_file", html_file, "File holding the raw HTML")->required();
  add_common_flags(classify, classify_args);
  classify->add_option("--exclude", classify_args.overrides.exclude,
                       "Specialist agents to exclude (url, html, content, brand)")
      ->delimiter(',');

  CommonArgs evaluate_args;
  std::string dataset_path, method_flag = "debate";
  bool evaluate_resume = false;
  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "Run a labeled dataset benchmark and write reports");
  evaluate->add_option("--dataset", dataset_path,
                       "Dataset directory (phishing/, legitimate/) or JSON manifest")
      ->required();
  evaluate->add_option("--method", method_flag, "debate, direct or cot");
  evaluate->add_flag("--resume", evaluate_resume, "Reuse existing per-sample results");
  add_common_flags(evaluate, evaluate_args);
  evaluate->add_option("--exclude", evaluate_args.overrides.exclude,
                       "Specialist agents to exclude (url, html, content, brand)")
      ->delimiter(',');

  CommonArgs scenario_args;
  std::vector<std::string> scenario_datasets;
  std::vector<std::string> scenario_excludes;
  bool scenario_resume = false;
  CLI::App* scenario = app.add_subcommand(
      "scenario", "Agent-exclusion scenario analysis across datasets");
  scenario->add_option("--dataset", scenario_datasets, "Dataset directory or manifest")
      ->required();
  scenario->add_option("--exclude", scenario_excludes,
                       "Additional exclusion setting (comma-separated agents); repeatable");
  scenario->add_flag("--resume", scenario_resume, "Reuse existing per-sample results");
  add_common_flags(scenario, scenario_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  if (classify->parsed()) return cmd_classify(classify_args, url_file, html_file);
  if (evaluate->parsed()) {
    return cmd_evaluate(evaluate_args, dataset_path, method_flag, evaluate_resume);
  }
  if (scenario->parsed()) {
    return cmd_scenario(scenario_args, scenario_datasets, scenario_excludes,
                        scenario_resume);
  }
  return kExitConfigError;
}
