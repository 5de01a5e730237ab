#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace phishdebate {

enum class Label { Phishing, Legitimate };

std::string label_name(Label label);                      // "phishing" / "legitimate"
std::optional<Label> label_from_name(std::string_view s); // case-insensitive

/// Raw per-sample file contents before preprocessing.
struct RawSample {
  std::string id;
  std::string url_text;
  std::string raw_html;
};

/// One website instance after the preprocessing pipeline: the URL, the
/// cleaned HTML and the extracted visible text, plus the gold label when
/// the dataset provides one.
struct ProcessedSample {
  std::string id;
  std::string url;
  std::string cleaned_html;
  std::string visible_text;
  std::optional<Label> label;
};

/// A sample that was skipped rather than loaded (empty URL or HTML file).
struct SampleSkip {
  std::string reason;
};

/// A recoverable per-sample load failure, distinct from a skip.
struct SampleLoadError {
  std::string reason;
};

using LoadOutcome = std::variant<RawSample, SampleSkip, SampleLoadError>;

/// Reads the two files, decodes them as UTF-8 with lossy replacement and
/// trims the URL. Either file empty after trimming -> SampleSkip; an
/// unreadable file -> SampleLoadError.
LoadOutcome load_raw_sample(const std::filesystem::path& url_file,
                            const std::filesystem::path& html_file);

/// Runs the preprocessing pipeline over a raw sample.
ProcessedSample preprocess(const RawSample& raw, std::optional<Label> label);

struct ManifestEntry {
  std::string id;
  std::filesystem::path url_file;
  std::filesystem::path html_file;
  std::optional<Label> label;
};

struct DatasetManifest {
  std::filesystem::path root_path;
  std::vector<ManifestEntry> entries;
};

class DatasetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scans `root/<label>/<sample-id>/{url.txt,html.txt}` for the two label
/// directories. Sample directories missing either file are still listed so
/// the loader can report them as skipped. Throws DatasetError when the root
/// does not exist or two samples share an id.
DatasetManifest manifest_from_directory(const std::filesystem::path& root);

/// Loads the JSON manifest format:
///   [{"id": "...", "url_file": "...", "html_file": "...", "label": "phishing"}]
/// Relative file paths resolve against the manifest's directory.
DatasetManifest manifest_from_json_file(const std::filesystem::path& manifest_file);

struct SkipReport {
  std::string id;
  std::string reason;
};

struct Dataset {
  std::vector<ProcessedSample> samples;  // sorted by id
  std::vector<SkipReport> skipped;       // sorted by id
};

/// Preprocesses every loadable manifest entry. Output order is
/// deterministic (sorted by id) regardless of entry order.
Dataset load_dataset(const DatasetManifest& manifest);

/// UTF-8 validation with lossy replacement: invalid sequences become
/// U+FFFD. Valid input passes through byte-identical.
std::string utf8_lossy(std::string_view bytes);

}  // namespace phishdebate
