#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "phishdebate/agents.hpp"
#include "phishdebate/debate.hpp"
#include "phishdebate/html.hpp"
#include "phishdebate/truncation.hpp"

namespace {

using namespace phishdebate;

// Deterministic synthetic page, heavy on removable elements.
std::string synthetic_page(std::size_t approx_bytes) {
  std::mt19937 rng(12345);
  const char* tags[] = {"div", "p", "span", "li", "td"};
  std::string out = "<html><head><title>bench</title>"
                    "<link rel=\"stylesheet\" href=\"a.css\"><style>body{margin:0}</style>"
                    "</head><body>";
  std::uniform_int_distribution<int> tag_pick(0, 4);
  std::uniform_int_distribution<int> kind(0, 9);
  while (out.size() < approx_bytes) {
    switch (kind(rng)) {
      case 0:
        out += "<script>var a = 1 < 2; function f() { return '</div>'; }</script>";
        break;
      case 1:
        out += "<noscript><p>enable scripts</p></noscript>";
        break;
      case 2:
        out += "<style>.c" + std::to_string(out.size() % 97) + "{color:#333}</style>";
        break;
      default: {
        const char* tag = tags[tag_pick(rng)];
        out += "<";
        out += tag;
        out += " class=\"c\">phishing benchmark text segment ";
        out += std::to_string(out.size());
        out += "</";
        out += tag;
        out += ">";
      }
    }
  }
  out += "</body></html>";
  return out;
}

void BM_clean_html(benchmark::State& state) {
  std::string page = synthetic_page(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(clean_html(page));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(page.size()));
}
BENCHMARK(BM_clean_html)->Arg(8 << 10)->Arg(64 << 10)->Arg(512 << 10);

void BM_extract_visible_text(benchmark::State& state) {
  std::string cleaned = clean_html(synthetic_page(static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_visible_text(cleaned));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(cleaned.size()));
}
BENCHMARK(BM_extract_visible_text)->Arg(8 << 10)->Arg(64 << 10)->Arg(512 << 10);

void BM_truncate_html(benchmark::State& state) {
  std::string cleaned = clean_html(synthetic_page(256 << 10));
  TokenBudget budget;
  budget.html_token_limit = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(truncate_html(cleaned, budget));
  }
}
BENCHMARK(BM_truncate_html)->Arg(1024)->Arg(8192);

void BM_parse_agent_response(benchmark::State& state) {
  std::string reply =
      "- Claim: PHISHING\n- Confidence: 0.87\n- Evidence: digit-substituted domain, "
      "credential form posting to a foreign host,\nhidden iframe overlay";
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        parse_agent_response(reply, AgentKind::UrlAnalyst, 1));
  }
}
BENCHMARK(BM_parse_agent_response);

void BM_scripted_debate(benchmark::State& state) {
  ScriptedBackendRules rules;
  rules.default_reply = "- Claim: PHISHING\n- Confidence: 0.9\n- Evidence: bench";
  ScriptedRule moderator;
  moderator.contains = {"moderator overseeing"};
  moderator.reply =
      R"({"consensus":"Yes","assessment":"PHISHING","reasoning":"r","confidence":0.9,"continue_debate":false})";
  rules.rules.push_back(moderator);
  ScriptedRule judge;
  judge.contains = {"cybersecurity judge"};
  judge.reply =
      R"({"assessment":"PHISHING","confidence":0.9,"reasoning":"r","evidence_summary":"s"})";
  rules.rules.push_back(judge);

  ProcessedSample sample;
  sample.id = "bench";
  sample.url = "https://bench.example/login";
  sample.cleaned_html = clean_html(synthetic_page(32 << 10));
  sample.visible_text = extract_visible_text(sample.cleaned_html);

  DebateConfig config;
  config.max_rounds = 1;
  config.parallel_round_queries = state.range(0) != 0;

  for (auto _ : state) {
    ScriptedBackend backend(rules);
    benchmark::DoNotOptimize(run_debate(sample, config, backend));
  }
}
BENCHMARK(BM_scripted_debate)->Arg(0)->Arg(1);

}  // namespace

BENCHMARK_MAIN();
