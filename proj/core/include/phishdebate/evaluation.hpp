#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phishdebate/baselines.hpp"
#include "phishdebate/debate.hpp"
#include "phishdebate/sample.hpp"

namespace phishdebate {

/// Exact rational value. Metrics are held as rationals and rounded to four
/// decimals (half-even) only at serialization.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;  // always > 0, fraction reduced

  static Ratio of(std::int64_t numerator, std::int64_t denominator);
  Ratio plus(const Ratio& other) const;
  Ratio divided_by(std::int64_t k) const;
  double value() const;
  /// Nearest multiple of 1e-4, ties to even.
  double rounded4() const;
  bool operator==(const Ratio& other) const = default;
};

struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fn + fp + tn; }
  ConfusionMatrix plus(const ConfusionMatrix& other) const {
    return {tp + other.tp, fn + other.fn, fp + other.fp, tn + other.tn};
  }
};

enum class Cell { TP, FN, FP, TN };

std::string_view cell_name(Cell cell);

/// Confusion cell for one scored prediction. Uncertain counts against the
/// gold label: a missed phishing page (FN) or a flagged legitimate one (FP).
Cell score(Assessment prediction, Label gold);

/// Rate metrics as exact rationals; a zero denominator leaves the metric
/// undefined (distinct from zero).
struct MetricsReport {
  std::optional<Ratio> tpr, tnr, fpr, fnr;
  std::optional<Ratio> precision, recall, accuracy, f1;
  double avg_time_seconds = 0.0;
  int n_uncertain = 0;
};

/// Computes the eight metrics from the matrix. Throws std::invalid_argument
/// on an empty matrix. avg_time = total_time / total samples scored.
MetricsReport compute_metrics(const ConfusionMatrix& matrix, double total_time_seconds);

enum class Method { Debate, Direct, CoT };

std::string_view method_name(Method method);  // "debate" / "direct" / "cot"
std::optional<Method> method_from_name(std::string_view name);

struct BenchmarkOptions {
  Method method = Method::Debate;
  DebateConfig debate;            // used when method == Debate
  BaselineModel baseline_model;   // used for Direct / CoT
  TokenBudget budget;             // baseline truncation budget
  PromptTemplates templates = default_templates();
  std::filesystem::path out_dir;  // empty: keep results in memory only
  bool resume = false;            // reuse existing per-sample result files
  int max_parallel_samples = 1;
  PriceTable price_table;
};

struct BenchmarkReport {
  Method method = Method::Debate;
  ConfusionMatrix matrix;
  MetricsReport metrics;
  int n_samples = 0;
  int n_scored = 0;
  int n_errors = 0;
  int n_skipped_unlabeled = 0;
  double total_time_seconds = 0.0;
  std::optional<CostSummary> cost;
};

struct SampleFailure {
  std::string sample_id;
  std::string error;
};

struct BenchmarkOutcome {
  BenchmarkReport report;
  std::vector<nlohmann::json> lines;  // per-sample envelopes in id order
  std::vector<SampleFailure> errors;
};

/// Runs the method over every sample in deterministic id order, scores the
/// predictions and aggregates. Per-sample errors are quarantined. With an
/// out_dir, per-sample result files under samples/ make the run resumable:
/// existing files are reused when resume is set.
BenchmarkOutcome run_benchmark(const std::vector<ProcessedSample>& samples,
                               const BenchmarkOptions& options,
                               CompletionBackend& backend);

/// Rebuilds the report from persisted envelope lines alone. Used to verify
/// the report carries no hidden state.
BenchmarkReport recompute_report(const std::vector<nlohmann::json>& lines, Method method);

nlohmann::json report_to_json(const BenchmarkReport& report);

/// Plain-text table mirroring the benchmark report columns
/// (TPR TNR FPR FNR Recall Precision Accuracy F1 Time).
std::string report_to_text(const BenchmarkReport& report);

/// Writes report.json, report.txt, transcripts.jsonl and errors.json.
void write_report_files(const BenchmarkOutcome& outcome,
                        const std::filesystem::path& out_dir);

struct ScenarioSetting {
  std::string name;
  std::set<AgentKind> excluded;
};

/// The five canonical rows: all agents plus each single-agent exclusion.
std::vector<ScenarioSetting> canonical_scenario_settings();

struct ScenarioRow {
  ScenarioSetting setting;
  std::vector<ConfusionMatrix> per_dataset;
  Ratio avg_tp, avg_fn, avg_fp, avg_tn;  // counts averaged across datasets
  MetricsReport metrics_mean;    // mean of per-dataset metric values
  MetricsReport metrics_pooled;  // metrics of the summed (pooled) counts
};

/// Runs every exclusion setting over every dataset. All settings are
/// validated before any backend traffic. Both averaging conventions are
/// reported: the mean of per-dataset metrics and the metrics of the pooled
/// counts (identical to metrics of averaged counts).
std::vector<ScenarioRow> scenario_analysis(
    const std::vector<std::vector<ProcessedSample>>& datasets,
    const std::vector<ScenarioSetting>& settings, const BenchmarkOptions& base,
    CompletionBackend& backend);

nlohmann::json scenario_rows_to_json(const std::vector<ScenarioRow>& rows);
std::string scenario_rows_to_text(const std::vector<ScenarioRow>& rows);

}  // namespace phishdebate
