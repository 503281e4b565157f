#pragma once

#include "signcurator/common/time.hpp"
#include "signcurator/corpus/record.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace signcurator::corpus {

// Accepted-video projection that appears in the published manifest. Carries
// no media locator, no source handle and no description text.
struct ManifestRecord {
  std::string video_id;
  std::string language;
  double duration_s = 0.0;
  std::string extracted_text;
  std::vector<std::string> verdict_digests;
};

struct LanguageTotals {
  std::int64_t video_count = 0;
  double total_hours = 0.0;  // unrounded; whole-hour rounding is display-only
};

// The published dataset artifact.
struct DatasetManifest {
  std::int64_t version = 1;
  std::vector<ManifestRecord> records;
  std::map<std::string, LanguageTotals> per_language_totals;
  std::string config_digest;
  Timestamp created_at{};
};

// Builds a manifest from accepted records. Records arrive in any order and
// are sorted by (language, video_id); totals are recomputed. Non-accepted
// records are rejected with ValidationError naming the video.
DatasetManifest build_manifest(const std::vector<PipelineRecord>& accepted,
                               const std::string& config_digest,
                               Timestamp created_at);

// Canonical serialization: fixed key order, two-space indent, sorted records.
// Equal manifests produce identical bytes.
std::string manifest_to_json(const DatasetManifest& manifest);

// Parses and validates. Malformed JSON raises ParseError with the line and
// column of the failure; coherent JSON with bad content raises
// ValidationError naming the first offending record or language.
DatasetManifest parse_manifest(const std::string& json_text);

// Display helper: whole hours, rounded half away from zero.
std::int64_t hours_rounded(double seconds);

}  // namespace signcurator::corpus
