#include "phishdebate/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace phishdebate {

namespace {

using nlohmann::json;

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    std::int64_t t = a % b;
    a = b;
    b = t;
  }
  return a == 0 ? 1 : a;
}

json optional_metric_json(const std::optional<Ratio>& metric) {
  if (!metric) return nullptr;
  return metric->rounded4();
}

std::string fmt4(const std::optional<Ratio>& metric) {
  if (!metric) return "n/a";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4f", metric->rounded4());
  return buffer;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ratio

Ratio Ratio::of(std::int64_t numerator, std::int64_t denominator) {
  if (denominator == 0) throw std::invalid_argument("ratio with zero denominator");
  if (denominator < 0) {
    numerator = -numerator;
    denominator = -denominator;
  }
  std::int64_t g = gcd64(numerator, denominator);
  return Ratio{numerator / g, denominator / g};
}

Ratio Ratio::plus(const Ratio& other) const {
  __int128 n = static_cast<__int128>(num) * other.den +
               static_cast<__int128>(other.num) * den;
  __int128 d = static_cast<__int128>(den) * other.den;
  // Reduce in 128-bit space before narrowing.
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  n /= a;
  d /= a;
  if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) {
    throw std::overflow_error("ratio addition overflow");
  }
  return Ratio{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

Ratio Ratio::divided_by(std::int64_t k) const {
  if (k == 0) throw std::invalid_argument("division by zero");
  __int128 d = static_cast<__int128>(den) * k;
  __int128 n = num;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  if (a == 0) a = 1;
  n /= a;
  d /= a;
  if (d > INT64_MAX) throw std::overflow_error("ratio division overflow");
  return Ratio{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

double Ratio::value() const { return static_cast<double>(num) / static_cast<double>(den); }

double Ratio::rounded4() const {
  // Half-even rounding done in integer space: round num*10^4 / den.
  __int128 scaled = static_cast<__int128>(num) * 10000;
  bool negative = scaled < 0;
  __int128 magnitude = negative ? -scaled : scaled;
  __int128 q = magnitude / den;
  __int128 r = magnitude % den;
  __int128 twice = r * 2;
  if (twice > den || (twice == den && (q % 2) != 0)) ++q;
  double result = static_cast<double>(q) / 10000.0;
  return negative ? -result : result;
}

// ---------------------------------------------------------------------------
// Scoring and metrics

std::string_view cell_name(Cell cell) {
  switch (cell) {
    case Cell::TP: return "TP";
    case Cell::FN: return "FN";
    case Cell::FP: return "FP";
    case Cell::TN: return "TN";
  }
  return "";
}

Cell score(Assessment prediction, Label gold) {
  if (gold == Label::Phishing) {
    return prediction == Assessment::Phishing ? Cell::TP : Cell::FN;
  }
  return prediction == Assessment::Legitimate ? Cell::TN : Cell::FP;
}

MetricsReport compute_metrics(const ConfusionMatrix& matrix, double total_time_seconds) {
  const std::int64_t n = matrix.total();
  if (n <= 0) throw std::invalid_argument("empty confusion matrix");
  MetricsReport report;
  auto rate = [](std::int64_t num, std::int64_t den) -> std::optional<Ratio> {
    if (den == 0) return std::nullopt;
    return Ratio::of(num, den);
  };
  report.tpr = rate(matrix.tp, matrix.tp + matrix.fn);
  report.fnr = rate(matrix.fn, matrix.tp + matrix.fn);
  report.tnr = rate(matrix.tn, matrix.tn + matrix.fp);
  report.fpr = rate(matrix.fp, matrix.tn + matrix.fp);
  report.precision = rate(matrix.tp, matrix.tp + matrix.fp);
  report.recall = report.tpr;
  report.accuracy = rate(matrix.tp + matrix.tn, n);
  report.f1 = rate(2 * matrix.tp, 2 * matrix.tp + matrix.fp + matrix.fn);
  report.avg_time_seconds = total_time_seconds / static_cast<double>(n);
  return report;
}

// ---------------------------------------------------------------------------
// Benchmark runner

std::string_view method_name(Method method) {
  switch (method) {
    case Method::Debate: return "debate";
    case Method::Direct: return "direct";
    case Method::CoT: return "cot";
  }
  return "";
}

std::optional<Method> method_from_name(std::string_view name) {
  if (name == "debate") return Method::Debate;
  if (name == "direct") return Method::Direct;
  if (name == "cot") return Method::CoT;
  return std::nullopt;
}

namespace {

json baseline_result_to_json(const BaselineResult& result) {
  json doc;
  doc["method"] = std::string(baseline_method_name(result.method));
  doc["classification"] = std::string(assessment_name(result.classification));
  doc["confidence_level"] =
      result.confidence_level
          ? json(std::string(confidence_level_name(*result.confidence_level)))
          : json(nullptr);
  if (result.steps) {
    doc["steps"] = json::array();
    for (const std::string& step : *result.steps) doc["steps"].push_back(step);
  } else {
    doc["steps"] = nullptr;
  }
  doc["reasoning"] = result.reasoning;
  doc["raw_reply"] = result.raw_reply;
  doc["prompt"] = result.prompt;
  doc["model"] = result.model_name;
  if (result.prompt_tokens) doc["prompt_tokens"] = *result.prompt_tokens;
  if (result.completion_tokens) doc["completion_tokens"] = *result.completion_tokens;
  doc["wall_time_seconds"] = result.wall_time_seconds;
  return doc;
}

// Runs one sample through the configured method and builds its JSONL
// envelope. Sample-level failures become an error envelope.
json run_one_sample(const ProcessedSample& sample, const BenchmarkOptions& options,
                    CompletionBackend& backend) {
  json envelope;
  envelope["schema_version"] = 1;
  envelope["method"] = std::string(method_name(options.method));
  envelope["sample_id"] = sample.id;
  envelope["gold_label"] = sample.label ? json(label_name(*sample.label)) : json(nullptr);
  try {
    switch (options.method) {
      case Method::Debate: {
        DebateConfig config = options.debate;
        config.templates = options.templates;
        DebateTranscript transcript = run_debate(sample, config, backend);
        envelope["prediction"] = std::string(assessment_name(transcript.verdict.assessment));
        envelope["confidence"] = transcript.verdict.confidence;
        envelope["wall_time_seconds"] = transcript.wall_time_seconds;
        envelope["record"] = transcript_to_json(transcript);
        break;
      }
      case Method::Direct: {
        BaselineResult result = run_direct(sample, backend, options.budget,
                                           options.baseline_model, options.templates);
        envelope["prediction"] = std::string(assessment_name(result.classification));
        envelope["wall_time_seconds"] = result.wall_time_seconds;
        envelope["record"] = baseline_result_to_json(result);
        break;
      }
      case Method::CoT: {
        BaselineResult result = run_cot(sample, backend, options.budget,
                                        options.baseline_model, options.templates);
        envelope["prediction"] = std::string(assessment_name(result.classification));
        envelope["wall_time_seconds"] = result.wall_time_seconds;
        envelope["record"] = baseline_result_to_json(result);
        break;
      }
    }
  } catch (const std::exception& e) {
    envelope["prediction"] = nullptr;
    envelope["error"] = e.what();
  }
  return envelope;
}

std::filesystem::path sample_result_path(const std::filesystem::path& out_dir,
                                         const std::string& sample_id) {
  return out_dir / "samples" / (sample_id + ".json");
}

std::optional<json> load_existing_result(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json doc = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("sample_id")) {
    return std::nullopt;
  }
  return doc;
}

void fold_envelope(const json& envelope, BenchmarkReport& report,
                   std::vector<SampleFailure>& errors) {
  ++report.n_samples;
  if (envelope.contains("error") && !envelope["error"].is_null()) {
    ++report.n_errors;
    errors.push_back({envelope["sample_id"].get<std::string>(),
                      envelope["error"].get<std::string>()});
    return;
  }
  if (!envelope.contains("gold_label") || envelope["gold_label"].is_null()) {
    ++report.n_skipped_unlabeled;
    return;
  }
  auto gold = label_from_name(envelope["gold_label"].get<std::string>());
  if (!gold) {
    ++report.n_skipped_unlabeled;
    return;
  }
  if (!envelope.contains("prediction") || envelope["prediction"].is_null()) {
    ++report.n_errors;
    errors.push_back({envelope["sample_id"].get<std::string>(), "missing prediction"});
    return;
  }
  std::string prediction_text = envelope["prediction"].get<std::string>();
  Assessment prediction = Assessment::Uncertain;
  if (prediction_text == "PHISHING") prediction = Assessment::Phishing;
  if (prediction_text == "LEGITIMATE") prediction = Assessment::Legitimate;
  if (prediction == Assessment::Uncertain) ++report.metrics.n_uncertain;
  switch (score(prediction, *gold)) {
    case Cell::TP: ++report.matrix.tp; break;
    case Cell::FN: ++report.matrix.fn; break;
    case Cell::FP: ++report.matrix.fp; break;
    case Cell::TN: ++report.matrix.tn; break;
  }
  ++report.n_scored;
  report.total_time_seconds += envelope.value("wall_time_seconds", 0.0);
}

}  // namespace

BenchmarkOutcome run_benchmark(const std::vector<ProcessedSample>& samples,
                               const BenchmarkOptions& options,
                               CompletionBackend& backend) {
  if (options.method == Method::Debate) validate_config(options.debate);

  std::vector<const ProcessedSample*> ordered;
  ordered.reserve(samples.size());
  for (const ProcessedSample& sample : samples) ordered.push_back(&sample);
  std::sort(ordered.begin(), ordered.end(),
            [](const ProcessedSample* a, const ProcessedSample* b) { return a->id < b->id; });

  const bool persist = !options.out_dir.empty();
  if (persist) {
    std::filesystem::create_directories(options.out_dir / "samples");
  }

  std::vector<json> envelopes(ordered.size());
  auto process = [&](std::size_t i) {
    const ProcessedSample& sample = *ordered[i];
    std::filesystem::path path;
    if (persist) {
      path = sample_result_path(options.out_dir, sample.id);
      if (options.resume) {
        if (auto existing = load_existing_result(path)) {
          envelopes[i] = std::move(*existing);
          return;
        }
      }
    }
    envelopes[i] = run_one_sample(sample, options, backend);
    if (persist) {
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << envelopes[i].dump(2) << '\n';
    }
  };

  const int workers = std::max(1, options.max_parallel_samples);
  if (workers == 1 || ordered.size() <= 1) {
    for (std::size_t i = 0; i < ordered.size(); ++i) process(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const std::size_t pool_size =
        std::min<std::size_t>(static_cast<std::size_t>(workers), ordered.size());
    for (std::size_t w = 0; w < pool_size; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i = next.fetch_add(1);
          if (i >= ordered.size()) break;
          process(i);
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }

  BenchmarkOutcome outcome;
  outcome.report.method = options.method;
  for (const json& envelope : envelopes) {
    fold_envelope(envelope, outcome.report, outcome.errors);
    outcome.lines.push_back(envelope);
  }
  if (outcome.report.n_scored > 0) {
    int n_uncertain = outcome.report.metrics.n_uncertain;
    outcome.report.metrics =
        compute_metrics(outcome.report.matrix, outcome.report.total_time_seconds);
    outcome.report.metrics.n_uncertain = n_uncertain;
  }
  if (!options.price_table.empty()) {
    std::vector<ModelReply> replies;
    for (const json& envelope : envelopes) {
      if (!envelope.contains("record")) continue;
      const json& record = envelope["record"];
      if (record.contains("exchanges")) {
        for (const json& exchange : record["exchanges"]) {
          ModelReply reply;
          reply.model_name = exchange.value("model", std::string{});
          if (exchange.contains("prompt_tokens")) {
            reply.prompt_tokens = exchange["prompt_tokens"].get<std::int64_t>();
          }
          if (exchange.contains("completion_tokens")) {
            reply.completion_tokens = exchange["completion_tokens"].get<std::int64_t>();
          }
          replies.push_back(std::move(reply));
        }
      } else if (record.contains("model")) {
        ModelReply reply;
        reply.model_name = record.value("model", std::string{});
        if (record.contains("prompt_tokens")) {
          reply.prompt_tokens = record["prompt_tokens"].get<std::int64_t>();
        }
        if (record.contains("completion_tokens")) {
          reply.completion_tokens = record["completion_tokens"].get<std::int64_t>();
        }
        replies.push_back(std::move(reply));
      }
    }
    outcome.report.cost = usage_summary(replies, options.price_table);
  }
  return outcome;
}

BenchmarkReport recompute_report(const std::vector<nlohmann::json>& lines, Method method) {
  BenchmarkReport report;
  report.method = method;
  std::vector<SampleFailure> errors;
  for (const json& line : lines) fold_envelope(line, report, errors);
  if (report.n_scored > 0) {
    int n_uncertain = report.metrics.n_uncertain;
    report.metrics = compute_metrics(report.matrix, report.total_time_seconds);
    report.metrics.n_uncertain = n_uncertain;
  }
  return report;
}

json report_to_json(const BenchmarkReport& report) {
  json doc;
  doc["method"] = std::string(method_name(report.method));
  doc["n_samples"] = report.n_samples;
  doc["n_scored"] = report.n_scored;
  doc["n_errors"] = report.n_errors;
  doc["n_skipped_unlabeled"] = report.n_skipped_unlabeled;
  doc["n_uncertain"] = report.metrics.n_uncertain;
  doc["matrix"] = {{"tp", report.matrix.tp},
                   {"fn", report.matrix.fn},
                   {"fp", report.matrix.fp},
                   {"tn", report.matrix.tn}};
  doc["metrics"] = {{"tpr", optional_metric_json(report.metrics.tpr)},
                    {"tnr", optional_metric_json(report.metrics.tnr)},
                    {"fpr", optional_metric_json(report.metrics.fpr)},
                    {"fnr", optional_metric_json(report.metrics.fnr)},
                    {"recall", optional_metric_json(report.metrics.recall)},
                    {"precision", optional_metric_json(report.metrics.precision)},
                    {"accuracy", optional_metric_json(report.metrics.accuracy)},
                    {"f1", optional_metric_json(report.metrics.f1)}};
  doc["avg_time_seconds"] = report.metrics.avg_time_seconds;
  if (report.cost) {
    doc["cost"] = {{"total", report.cost->cost}, {"lower_bound", report.cost->lower_bound}};
  }
  return doc;
}

std::string report_to_text(const BenchmarkReport& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-10s %-7s %-7s %-7s %-7s %-7s %-9s %-8s %-8s %-8s\n",
                "Method", "TPR", "TNR", "FPR", "FNR", "Recall", "Precision", "Accuracy",
                "F1", "Time(s)");
  out << line;
  std::snprintf(line, sizeof(line),
                "%-10s %-7s %-7s %-7s %-7s %-7s %-9s %-8s %-8s %-8.2f\n",
                std::string(method_name(report.method)).c_str(),
                fmt4(report.metrics.tpr).c_str(), fmt4(report.metrics.tnr).c_str(),
                fmt4(report.metrics.fpr).c_str(), fmt4(report.metrics.fnr).c_str(),
                fmt4(report.metrics.recall).c_str(), fmt4(report.metrics.precision).c_str(),
                fmt4(report.metrics.accuracy).c_str(), fmt4(report.metrics.f1).c_str(),
                report.metrics.avg_time_seconds);
  out << line;
  out << "scored=" << report.n_scored << " errors=" << report.n_errors
      << " uncertain=" << report.metrics.n_uncertain << "\n";
  return out.str();
}

void write_report_files(const BenchmarkOutcome& outcome,
                        const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir / "report.json", std::ios::binary | std::ios::trunc);
    out << report_to_json(outcome.report).dump(2) << '\n';
  }
  {
    std::ofstream out(out_dir / "report.txt", std::ios::binary | std::ios::trunc);
    out << report_to_text(outcome.report);
  }
  {
    std::ofstream out(out_dir / "transcripts.jsonl", std::ios::binary | std::ios::trunc);
    for (const json& line : outcome.lines) out << line.dump() << '\n';
  }
  {
    json errors = json::array();
    for (const SampleFailure& failure : outcome.errors) {
      errors.push_back({{"sample_id", failure.sample_id}, {"error", failure.error}});
    }
    std::ofstream out(out_dir / "errors.json", std::ios::binary | std::ios::trunc);
    out << errors.dump(2) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Scenario analysis

std::vector<ScenarioSetting> canonical_scenario_settings() {
  return {
      {"All Agents", {}},
      {"W/O URL Agent", {AgentKind::UrlAnalyst}},
      {"W/O HTML Agent", {AgentKind::HtmlStructure}},
      {"W/O Content Agent", {AgentKind::ContentSemantic}},
      {"W/O Brand Agent", {AgentKind::BrandImpersonation}},
  };
}

namespace {

std::string setting_slug(const ScenarioSetting& setting) {
  std::string slug;
  for (char c : setting.name) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!slug.empty() && slug.back() != '_') {
      slug.push_back('_');
    }
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  return slug;
}

std::optional<Ratio> mean_metric(
    const std::vector<std::optional<Ratio>>& values) {
  if (values.empty()) return std::nullopt;
  Ratio sum{0, 1};
  for (const auto& value : values) {
    if (!value) return std::nullopt;  // undefined in any dataset -> undefined mean
    sum = sum.plus(*value);
  }
  return sum.divided_by(static_cast<std::int64_t>(values.size()));
}

}  // namespace

std::vector<ScenarioRow> scenario_analysis(
    const std::vector<std::vector<ProcessedSample>>& datasets,
    const std::vector<ScenarioSetting>& settings, const BenchmarkOptions& base,
    CompletionBackend& backend) {
  if (datasets.empty()) throw std::invalid_argument("scenario analysis needs a dataset");
  // Validate every setting before the first query.
  std::vector<DebateConfig> configs;
  for (const ScenarioSetting& setting : settings) {
    DebateConfig config = base.debate;
    for (AgentKind excluded : setting.excluded) config.active_agents.erase(excluded);
    validate_config(config);
    configs.push_back(std::move(config));
  }

  std::vector<ScenarioRow> rows;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    ScenarioRow row;
    row.setting = settings[s];
    std::vector<std::optional<Ratio>> tpr, tnr, fpr, fnr, precision, recall, accuracy, f1;
    double time_sum = 0.0;
    int uncertain_sum = 0;
    ConfusionMatrix pooled;
    double pooled_time = 0.0;
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      BenchmarkOptions options = base;
      options.method = Method::Debate;
      options.debate = configs[s];
      if (!base.out_dir.empty()) {
        options.out_dir =
            base.out_dir / "scenario" / setting_slug(settings[s]) / std::to_string(d);
      }
      BenchmarkOutcome outcome = run_benchmark(datasets[d], options, backend);
      row.per_dataset.push_back(outcome.report.matrix);
      pooled = pooled.plus(outcome.report.matrix);
      pooled_time += outcome.report.total_time_seconds;
      tpr.push_back(outcome.report.metrics.tpr);
      tnr.push_back(outcome.report.metrics.tnr);
      fpr.push_back(outcome.report.metrics.fpr);
      fnr.push_back(outcome.report.metrics.fnr);
      precision.push_back(outcome.report.metrics.precision);
      recall.push_back(outcome.report.metrics.recall);
      accuracy.push_back(outcome.report.metrics.accuracy);
      f1.push_back(outcome.report.metrics.f1);
      time_sum += outcome.report.metrics.avg_time_seconds;
      uncertain_sum += outcome.report.metrics.n_uncertain;
    }
    const auto k = static_cast<std::int64_t>(datasets.size());
    row.avg_tp = Ratio::of(pooled.tp, k);
    row.avg_fn = Ratio::of(pooled.fn, k);
    row.avg_fp = Ratio::of(pooled.fp, k);
    row.avg_tn = Ratio::of(pooled.tn, k);
    row.metrics_mean.tpr = mean_metric(tpr);
    row.metrics_mean.tnr = mean_metric(tnr);
    row.metrics_mean.fpr = mean_metric(fpr);
    row.metrics_mean.fnr = mean_metric(fnr);
    row.metrics_mean.precision = mean_metric(precision);
    row.metrics_mean.recall = mean_metric(recall);
    row.metrics_mean.accuracy = mean_metric(accuracy);
    row.metrics_mean.f1 = mean_metric(f1);
    row.metrics_mean.avg_time_seconds = time_sum / static_cast<double>(datasets.size());
    row.metrics_mean.n_uncertain = uncertain_sum;
    if (pooled.total() > 0) {
      row.metrics_pooled = compute_metrics(pooled, pooled_time);
      row.metrics_pooled.n_uncertain = uncertain_sum;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json scenario_rows_to_json(const std::vector<ScenarioRow>& rows) {
  json doc = json::array();
  for (const ScenarioRow& row : rows) {
    json r;
    r["setting"] = row.setting.name;
    json excluded = json::array();
    for (AgentKind kind : kAllAgents) {
      if (row.setting.excluded.count(kind)) {
        excluded.push_back(std::string(agent_flag_name(kind)));
      }
    }
    r["excluded"] = excluded;
    r["per_dataset"] = json::array();
    for (const ConfusionMatrix& matrix : row.per_dataset) {
      r["per_dataset"].push_back({{"tp", matrix.tp},
                                  {"fn", matrix.fn},
                                  {"fp", matrix.fp},
                                  {"tn", matrix.tn}});
    }
    r["avg_counts"] = {{"tp", row.avg_tp.value()},
                       {"fn", row.avg_fn.value()},
                       {"fp", row.avg_fp.value()},
                       {"tn", row.avg_tn.value()}};
    auto metrics_json = [](const MetricsReport& metrics) {
      return json{{"tpr", optional_metric_json(metrics.tpr)},
                  {"tnr", optional_metric_json(metrics.tnr)},
                  {"fpr", optional_metric_json(metrics.fpr)},
                  {"fnr", optional_metric_json(metrics.fnr)},
                  {"recall", optional_metric_json(metrics.recall)},
                  {"precision", optional_metric_json(metrics.precision)},
                  {"accuracy", optional_metric_json(metrics.accuracy)},
                  {"f1", optional_metric_json(metrics.f1)}};
    };
    r["metrics_mean"] = metrics_json(row.metrics_mean);
    r["metrics_pooled"] = metrics_json(row.metrics_pooled);
    doc.push_back(std::move(r));
  }
  return doc;
}

std::string scenario_rows_to_text(const std::vector<ScenarioRow>& rows) {
  std::ostringstream out;
  char line[512];
  std::snprintf(line, sizeof(line),
                "%-22s %8s %8s %8s %8s %12s %15s %14s %13s\n", "Setting", "Avg. TP",
                "Avg. FN", "Avg. FP", "Avg. TN", "Avg. Recall", "Avg. Precision",
                "Avg. Accuracy", "Avg. F1 Score");
  out << line;
  auto fmt_count = [](const Ratio& ratio) {
    char buffer[32];
    if (ratio.den == 1) {
      std::snprintf(buffer, sizeof(buffer), "%lld", static_cast<long long>(ratio.num));
    } else {
      std::snprintf(buffer, sizeof(buffer), "%.1f", ratio.value());
    }
    return std::string(buffer);
  };
  for (const ScenarioRow& row : rows) {
    std::snprintf(line, sizeof(line),
                  "%-22s %8s %8s %8s %8s %12s %15s %14s %13s\n", row.setting.name.c_str(),
                  fmt_count(row.avg_tp).c_str(), fmt_count(row.avg_fn).c_str(),
                  fmt_count(row.avg_fp).c_str(), fmt_count(row.avg_tn).c_str(),
                  fmt4(row.metrics_mean.recall).c_str(),
                  fmt4(row.metrics_mean.precision).c_str(),
                  fmt4(row.metrics_mean.accuracy).c_str(),
                  fmt4(row.metrics_mean.f1).c_str());
    out << line;
  }
  return out.str();
}

}  // namespace phishdebate
