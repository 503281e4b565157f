#include "signcurator/ingest/ingest.hpp"

#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/corpus/record.hpp"
#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace signcurator::ingest {

using detail::ordered_json;

HashtagTable HashtagTable::parse(const std::string& json_text) {
  const ordered_json j = detail::parse_json(json_text, "hashtag table");
  if (!j.is_object()) {
    throw ConfigError("hashtag table must be an object keyed by language code");
  }
  HashtagTable table;
  for (const auto& [language, value] : j.items()) {
    HashtagEntry entry;
    for (const char* kind : {"english", "native"}) {
      const auto& list = detail::require_field(value, kind, language);
      if (!list.is_array()) {
        throw ConfigError("hashtag table '" + language + "." + kind +
                          "' must be a list");
      }
      auto& target = kind == std::string("english") ? entry.english
                                                    : entry.native;
      for (const auto& tag : list) {
        if (!tag.is_string() || tag.get<std::string>().empty()) {
          throw ConfigError("hashtag table '" + language + "." + kind +
                            "' contains a non-string or empty entry");
        }
        target.push_back(tag.get<std::string>());
      }
    }
    table.set(language, std::move(entry));
  }
  return table;
}

void HashtagTable::set(const std::string& iso639_3, HashtagEntry entry) {
  if (entry.english.empty() || entry.native.empty()) {
    throw ConfigError("hashtag table for '" + iso639_3 +
                      "' must list at least one english and one native tag");
  }
  entries_[iso639_3] = std::move(entry);
}

std::optional<HashtagEntry> HashtagTable::find(
    const std::string& iso639_3) const {
  auto it = entries_.find(iso639_3);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::vector<std::string> HashtagTable::languages() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [language, entry] : entries_) {
    out.push_back(language);
  }
  return out;
}

namespace {

std::string ascii_lower(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

CrawlLine crawl_line_from_json(const ordered_json& j, std::size_t line_no) {
  const std::string context = "crawl manifest line " + std::to_string(line_no);
  CrawlLine line;
  line.video_id = detail::require_string(j, "video_id", context);
  if (line.video_id.empty()) {
    throw ParseError(context + ": video_id must be nonempty", line_no);
  }
  line.language = detail::require_string(j, "language", context);
  line.media_locator = detail::require_string(j, "media_locator", context);
  if (j.contains("duration_s") && !j.at("duration_s").is_null()) {
    if (!j.at("duration_s").is_number()) {
      throw ParseError(context + ": duration_s must be a number", line_no);
    }
    line.duration_s = j.at("duration_s").get<double>();
    if (*line.duration_s < 0.0) {
      throw ParseError(context + ": duration_s must be nonnegative", line_no);
    }
  }
  if (j.contains("description_text") && !j.at("description_text").is_null()) {
    if (!j.at("description_text").is_string()) {
      throw ParseError(context + ": description_text must be a string",
                       line_no);
    }
    line.description_text = j.at("description_text").get<std::string>();
  }
  return line;
}

}  // namespace

std::vector<CrawlLine> parse_crawl_manifest(const std::string& text) {
  std::vector<CrawlLine> lines;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') {
      raw.pop_back();
    }
    if (raw.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    ordered_json j;
    try {
      j = detail::parse_json(raw, "crawl manifest line");
    } catch (const ParseError& e) {
      throw ParseError("crawl manifest line " + std::to_string(line_no) +
                       ": " + e.what(), line_no);
    }
    lines.push_back(crawl_line_from_json(j, line_no));
  }
  return lines;
}

std::string hash_user_handle(const std::string& handle) {
  return "sha256:" + sha256_hex(handle);
}

std::vector<CrawlSource> build_queries(const std::string& language,
                                       const HashtagTable& table) {
  const auto entry = table.find(language);
  if (!entry) {
    throw ConfigError("hashtag table has no entry for language '" + language +
                      "'");
  }
  if (entry->english.empty() || entry->native.empty()) {
    throw ConfigError("hashtag table for '" + language +
                      "' must list at least one english and one native tag");
  }
  std::vector<CrawlSource> queries;
  std::set<std::string> seen;
  for (const auto* list : {&entry->english, &entry->native}) {
    for (const auto& tag : *list) {
      if (!seen.insert(ascii_lower(tag)).second) {
        continue;
      }
      queries.push_back(
          {corpus::SourceKind::HashtagQuery, tag, language});
    }
  }
  return queries;
}

FileFetcher::FileFetcher(std::filesystem::path root)
    : root_(std::move(root)) {}

std::vector<CrawlLine> FileFetcher::fetch(const CrawlSource& source) {
  std::filesystem::path path;
  switch (source.kind) {
    case corpus::SourceKind::HashtagQuery:
      path = root_ / "hashtag" / (source.value + ".jsonl");
      break;
    case corpus::SourceKind::UserHandle:
      path = root_ / "user" / (source.value + ".jsonl");
      break;
    case corpus::SourceKind::ManifestFile:
      throw InputError("manifest sources are read directly, not fetched");
  }
  std::string text;
  try {
    text = read_file(path);
  } catch (const IoError& e) {
    throw IngestError(std::string("fetch failed: ") + e.what());
  }
  return parse_crawl_manifest(text);
}

std::vector<corpus::CandidateVideo> load_crawl_source(
    const CrawlSource& source, CandidateFetcher* fetcher,
    Timestamp fetched_at) {
  if (source.value.empty()) {
    throw ConfigError("crawl source value must be nonempty");
  }
  std::vector<CrawlLine> lines;
  if (source.kind == corpus::SourceKind::ManifestFile) {
    lines = parse_crawl_manifest(read_file(source.value));
  } else {
    if (fetcher == nullptr) {
      throw ConfigError("source kind requires a fetcher");
    }
    lines = fetcher->fetch(source);
  }
  corpus::CandidateSource provenance;
  provenance.kind = source.kind;
  provenance.value = source.kind == corpus::SourceKind::UserHandle
                         ? hash_user_handle(source.value)
                         : source.value;
  std::vector<corpus::CandidateVideo> candidates;
  candidates.reserve(lines.size());
  std::size_t line_no = 0;
  for (const auto& line : lines) {
    ++line_no;
    if (line.language != source.language) {
      throw ValidationError(
          "crawl manifest entry " + std::to_string(line_no) + " for video " +
          line.video_id + " is tagged '" + line.language +
          "' but the source expects '" + source.language + "'");
    }
    corpus::CandidateVideo c;
    c.video_id = line.video_id;
    c.source = provenance;
    c.language = line.language;
    c.duration_s = line.duration_s.value_or(0.0);
    c.media_locator = line.media_locator;
    c.description_text = line.description_text;
    c.fetched_at = fetched_at;
    candidates.push_back(std::move(c));
  }
  return candidates;
}

std::vector<corpus::CandidateVideo> dedup_candidates(
    const std::vector<corpus::CandidateVideo>& candidates) {
  std::vector<corpus::CandidateVideo> out;
  std::set<std::string> seen;
  for (const auto& c : candidates) {
    if (seen.insert(c.video_id).second) {
      out.push_back(c);
    }
  }
  return out;
}

std::string candidates_to_jsonl(
    const std::vector<corpus::CandidateVideo>& candidates) {
  std::string out;
  for (const auto& c : candidates) {
    out += corpus::candidate_to_json(c);
    out += '\n';
  }
  return out;
}

std::vector<corpus::CandidateVideo> candidates_from_jsonl(
    const std::string& text) {
  std::vector<corpus::CandidateVideo> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.find_first_not_of(" \t") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(corpus::candidate_from_json(line));
    } catch (const ParseError& e) {
      throw ParseError("candidate list line " + std::to_string(line_no) +
                       ": " + e.what(), line_no);
    }
  }
  return out;
}

}  // namespace signcurator::ingest
