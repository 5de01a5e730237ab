#include "phishdebate/sample.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phishdebate/html.hpp"

namespace phishdebate {

namespace {

std::string trim(std::string_view s) {
  std::size_t begin = 0, end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
  return std::string(s.substr(begin, end - begin));
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buffer.str();
}

}  // namespace

std::string label_name(Label label) {
  return label == Label::Phishing ? "phishing" : "legitimate";
}

std::optional<Label> label_from_name(std::string_view s) {
  std::string lowered;
  lowered.reserve(s.size());
  for (char c : s) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lowered == "phishing") return Label::Phishing;
  if (lowered == "legitimate") return Label::Legitimate;
  return std::nullopt;
}

std::string utf8_lossy(std::string_view bytes) {
  static constexpr std::string_view kReplacement = "\xEF\xBF\xBD";  // U+FFFD
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char c = static_cast<unsigned char>(bytes[i]);
    std::size_t len;
    if (c < 0x80) {
      len = 1;
    } else if ((c & 0xE0) == 0xC0 && c >= 0xC2) {
      len = 2;
    } else if ((c & 0xF0) == 0xE0) {
      len = 3;
    } else if ((c & 0xF8) == 0xF0 && c <= 0xF4) {
      len = 4;
    } else {
      out.append(kReplacement);
      ++i;
      continue;
    }
    if (i + len > bytes.size()) {
      out.append(kReplacement);
      ++i;
      continue;
    }
    bool valid = true;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(bytes[i + k]) & 0xC0) != 0x80) {
        valid = false;
        break;
      }
    }
    // Overlong / surrogate / out-of-range checks for the 3- and 4-byte forms.
    if (valid && len == 3) {
      unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
      if ((c == 0xE0 && c1 < 0xA0) || (c == 0xED && c1 > 0x9F)) valid = false;
    }
    if (valid && len == 4) {
      unsigned char c1 = static_cast<unsigned char>(bytes[i + 1]);
      if ((c == 0xF0 && c1 < 0x90) || (c == 0xF4 && c1 > 0x8F)) valid = false;
    }
    if (!valid) {
      out.append(kReplacement);
      ++i;
      continue;
    }
    out.append(bytes.substr(i, len));
    i += len;
  }
  return out;
}

LoadOutcome load_raw_sample(const std::filesystem::path& url_file,
                            const std::filesystem::path& html_file) {
  auto url_bytes = read_file(url_file);
  if (!url_bytes) {
    return SampleLoadError{"cannot read URL file: " + url_file.string()};
  }
  auto html_bytes = read_file(html_file);
  if (!html_bytes) {
    return SampleLoadError{"cannot read HTML file: " + html_file.string()};
  }
  std::string url = trim(utf8_lossy(*url_bytes));
  std::string html = utf8_lossy(*html_bytes);
  if (url.empty()) return SampleSkip{"empty URL file"};
  if (trim(html).empty()) return SampleSkip{"empty HTML file"};
  RawSample raw;
  raw.url_text = std::move(url);
  raw.raw_html = std::move(html);
  return raw;
}

ProcessedSample preprocess(const RawSample& raw, std::optional<Label> label) {
  ProcessedSample sample;
  sample.id = raw.id;
  sample.url = raw.url_text;
  sample.cleaned_html = clean_html(raw.raw_html);
  sample.visible_text = extract_visible_text(sample.cleaned_html);
  sample.label = label;
  return sample;
}

DatasetManifest manifest_from_directory(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) {
    throw DatasetError("dataset root does not exist: " + root.string());
  }
  DatasetManifest manifest;
  manifest.root_path = root;
  std::set<std::string> seen;
  for (auto label : {Label::Phishing, Label::Legitimate}) {
    std::filesystem::path label_dir = root / label_name(label);
    if (!std::filesystem::is_directory(label_dir)) continue;
    for (const auto& entry : std::filesystem::directory_iterator(label_dir)) {
      if (!entry.is_directory()) continue;
      std::string id = entry.path().filename().string();
      if (!seen.insert(id).second) {
        throw DatasetError("duplicate sample id in dataset: " + id);
      }
      ManifestEntry m;
      m.id = std::move(id);
      m.url_file = entry.path() / "url.txt";
      m.html_file = entry.path() / "html.txt";
      m.label = label;
      manifest.entries.push_back(std::move(m));
    }
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  return manifest;
}

DatasetManifest manifest_from_json_file(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) throw DatasetError("cannot read manifest: " + manifest_file.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("malformed manifest JSON: " + std::string(e.what()));
  }
  if (!doc.is_array()) throw DatasetError("manifest must be a JSON array");
  DatasetManifest manifest;
  manifest.root_path = manifest_file.parent_path();
  std::set<std::string> seen;
  for (const auto& item : doc) {
    ManifestEntry m;
    m.id = item.at("id").get<std::string>();
    if (!seen.insert(m.id).second) {
      throw DatasetError("duplicate sample id in manifest: " + m.id);
    }
    std::filesystem::path url_file = item.at("url_file").get<std::string>();
    std::filesystem::path html_file = item.at("html_file").get<std::string>();
    m.url_file = url_file.is_absolute() ? url_file : manifest.root_path / url_file;
    m.html_file = html_file.is_absolute() ? html_file : manifest.root_path / html_file;
    if (item.contains("label") && !item.at("label").is_null()) {
      auto label = label_from_name(item.at("label").get<std::string>());
      if (!label) throw DatasetError("unknown label for sample " + m.id);
      m.label = label;
    }
    manifest.entries.push_back(std::move(m));
  }
  std::sort(manifest.entries.begin(), manifest.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  return manifest;
}

Dataset load_dataset(const DatasetManifest& manifest) {
  if (!manifest.root_path.empty() && !std::filesystem::exists(manifest.root_path)) {
    throw DatasetError("dataset root does not exist: " + manifest.root_path.string());
  }
  Dataset dataset;
  for (const auto& entry : manifest.entries) {
    LoadOutcome outcome = load_raw_sample(entry.url_file, entry.html_file);
    if (std::holds_alternative<SampleSkip>(outcome)) {
      dataset.skipped.push_back({entry.id, std::get<SampleSkip>(outcome).reason});
      continue;
    }
    if (std::holds_alternative<SampleLoadError>(outcome)) {
      dataset.skipped.push_back({entry.id, std::get<SampleLoadError>(outcome).reason});
      continue;
    }
    RawSample raw = std::get<RawSample>(std::move(outcome));
    raw.id = entry.id;
    ProcessedSample sample = preprocess(raw, entry.label);
    if (sample.cleaned_html.empty()) {
      // Cleaning stripped everything; the sample cannot feed the agents.
      dataset.skipped.push_back({entry.id, "HTML empty after cleaning"});
      continue;
    }
    dataset.samples.push_back(std::move(sample));
  }
  std::sort(dataset.samples.begin(), dataset.samples.end(),
            [](const ProcessedSample& a, const ProcessedSample& b) { return a.id < b.id; });
  std::sort(dataset.skipped.begin(), dataset.skipped.end(),
            [](const SkipReport& a, const SkipReport& b) { return a.id < b.id; });
  return dataset;
}

}  // namespace phishdebate
