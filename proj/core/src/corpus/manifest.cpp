#include "signcurator/corpus/manifest.hpp"

#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace signcurator::corpus {

using detail::ordered_json;

namespace {

constexpr double kHoursTolerance = 1e-9;

bool is_hex_digest(const std::string& s) {
  if (s.size() != 64) {
    return false;
  }
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
  });
}

void sort_canonically(std::vector<ManifestRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const ManifestRecord& a, const ManifestRecord& b) {
              if (a.language != b.language) {
                return a.language < b.language;
              }
              return a.video_id < b.video_id;
            });
}

std::map<std::string, LanguageTotals> compute_totals(
    const std::vector<ManifestRecord>& records) {
  std::map<std::string, LanguageTotals> totals;
  for (const auto& r : records) {
    auto& t = totals[r.language];
    t.video_count += 1;
    t.total_hours += r.duration_s / 3600.0;
  }
  return totals;
}

void validate_manifest(const DatasetManifest& m) {
  if (m.version < 1) {
    throw ValidationError("manifest version must be a positive integer");
  }
  std::set<std::string> seen_ids;
  for (const auto& r : m.records) {
    if (r.video_id.empty()) {
      throw ValidationError("manifest record with empty video_id");
    }
    if (!seen_ids.insert(r.video_id).second) {
      throw ValidationError("duplicate video_id in manifest: " + r.video_id);
    }
    if (r.language.empty()) {
      throw ValidationError("record " + r.video_id + " has no language");
    }
    if (r.duration_s < 0.0) {
      throw ValidationError("record " + r.video_id +
                            " has negative duration_s");
    }
    if (r.extracted_text.empty()) {
      throw ValidationError("record " + r.video_id +
                            " is accepted but has empty extracted_text");
    }
    if (r.verdict_digests.size() != 4) {
      throw ValidationError("record " + r.video_id +
                            " must carry exactly four verdict digests");
    }
    for (const auto& d : r.verdict_digests) {
      if (!is_hex_digest(d)) {
        throw ValidationError("record " + r.video_id +
                              " has a malformed verdict digest");
      }
    }
  }
  const auto recomputed = compute_totals(m.records);
  for (const auto& [language, totals] : m.per_language_totals) {
    auto it = recomputed.find(language);
    if (it == recomputed.end()) {
      throw ValidationError("per_language_totals lists " + language +
                            " but the manifest has no such records");
    }
    if (totals.video_count != it->second.video_count) {
      throw ValidationError(
          "per_language_totals video_count mismatch for " + language +
          ": stated " + std::to_string(totals.video_count) + ", records say " +
          std::to_string(it->second.video_count));
    }
    if (std::abs(totals.total_hours - it->second.total_hours) >
        kHoursTolerance) {
      throw ValidationError("per_language_totals total_hours mismatch for " +
                            language);
    }
  }
  for (const auto& [language, totals] : recomputed) {
    if (!m.per_language_totals.count(language)) {
      throw ValidationError("per_language_totals missing entry for " +
                            language);
    }
  }
}

}  // namespace

DatasetManifest build_manifest(const std::vector<PipelineRecord>& accepted,
                               const std::string& config_digest,
                               Timestamp created_at) {
  DatasetManifest m;
  m.version = 1;
  m.config_digest = config_digest;
  m.created_at = created_at;
  m.records.reserve(accepted.size());
  for (const auto& r : accepted) {
    if (r.state != RecordState::Accepted) {
      throw ValidationError("manifest can only contain accepted records; " +
                            r.candidate.video_id + " is " +
                            to_string(r.state));
    }
    if (auto violation = validate_record(r)) {
      throw ValidationError("record " + r.candidate.video_id + ": " +
                            *violation);
    }
    ManifestRecord mr;
    mr.video_id = r.candidate.video_id;
    mr.language = r.candidate.language;
    mr.duration_s = r.candidate.duration_s;
    mr.extracted_text = *r.extracted_text;
    for (const auto& v : r.verdicts) {
      mr.verdict_digests.push_back(verdict_digest(v));
    }
    m.records.push_back(std::move(mr));
  }
  sort_canonically(m.records);
  m.per_language_totals = compute_totals(m.records);
  validate_manifest(m);
  return m;
}

std::string manifest_to_json(const DatasetManifest& manifest) {
  DatasetManifest sorted = manifest;
  sort_canonically(sorted.records);
  ordered_json j;
  j["version"] = sorted.version;
  ordered_json records = ordered_json::array();
  for (const auto& r : sorted.records) {
    ordered_json rec;
    rec["video_id"] = r.video_id;
    rec["language"] = r.language;
    rec["state"] = "accepted";
    rec["duration_s"] = r.duration_s;
    rec["extracted_text"] = r.extracted_text;
    rec["verdict_digests"] = r.verdict_digests;
    records.push_back(std::move(rec));
  }
  j["records"] = records;
  ordered_json totals = ordered_json::object();
  for (const auto& [language, t] : sorted.per_language_totals) {
    totals[language] = {{"video_count", t.video_count},
                        {"total_hours", t.total_hours}};
  }
  j["per_language_totals"] = totals;
  j["config_digest"] = sorted.config_digest;
  j["created_at"] = to_rfc3339(sorted.created_at);
  return j.dump(2) + "\n";
}

DatasetManifest parse_manifest(const std::string& json_text) {
  const ordered_json j = detail::parse_json(json_text, "manifest");
  if (!j.is_object()) {
    throw ParseError("manifest must be a JSON object");
  }
  DatasetManifest m;
  const auto& version = detail::require_field(j, "version", "manifest");
  if (!version.is_number_integer()) {
    throw ParseError("manifest version must be an integer");
  }
  m.version = version.get<std::int64_t>();
  const auto& records = detail::require_field(j, "records", "manifest");
  if (!records.is_array()) {
    throw ParseError("manifest records must be an array");
  }
  for (const auto& rec : records) {
    ManifestRecord r;
    r.video_id = detail::require_string(rec, "video_id", "manifest record");
    const std::string context = "record " + r.video_id;
    r.language = detail::require_string(rec, "language", context);
    if (rec.contains("state")) {
      const std::string state = detail::require_string(rec, "state", context);
      if (state != "accepted") {
        throw ValidationError(context + " has state '" + state +
                              "'; manifests may only contain accepted records");
      }
    }
    r.duration_s = detail::require_number(rec, "duration_s", context);
    r.extracted_text = detail::require_string(rec, "extracted_text", context);
    const auto& digests =
        detail::require_field(rec, "verdict_digests", context);
    if (!digests.is_array()) {
      throw ParseError("verdict_digests in " + context + " must be an array");
    }
    for (const auto& d : digests) {
      if (!d.is_string()) {
        throw ParseError("verdict digest in " + context + " must be a string");
      }
      r.verdict_digests.push_back(d.get<std::string>());
    }
    m.records.push_back(std::move(r));
  }
  const auto& totals =
      detail::require_field(j, "per_language_totals", "manifest");
  if (!totals.is_object()) {
    throw ParseError("per_language_totals must be an object");
  }
  for (const auto& [language, t] : totals.items()) {
    const std::string context = "per_language_totals." + language;
    LanguageTotals lt;
    const auto& count = detail::require_field(t, "video_count", context);
    if (!count.is_number_integer()) {
      throw ParseError("video_count in " + context + " must be an integer");
    }
    lt.video_count = count.get<std::int64_t>();
    lt.total_hours = detail::require_number(t, "total_hours", context);
    m.per_language_totals[language] = lt;
  }
  m.config_digest = detail::require_string(j, "config_digest", "manifest");
  m.created_at =
      parse_rfc3339(detail::require_string(j, "created_at", "manifest"));
  sort_canonically(m.records);
  validate_manifest(m);
  return m;
}

std::int64_t hours_rounded(double seconds) {
  return std::llround(seconds / 3600.0);
}

}  // namespace signcurator::corpus
