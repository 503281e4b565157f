#pragma once

#include "signcurator/common/time.hpp"

#include <optional>
#include <string>

namespace signcurator::corpus {

// Where a candidate video was discovered.
enum class SourceKind {
  HashtagQuery,  // value = the hashtag, without '#'
  UserHandle,    // value = "sha256:<hex>" of the handle (never the raw handle)
  ManifestFile,  // value = path of the crawl manifest it was read from
};

std::string to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& text);

struct CandidateSource {
  SourceKind kind = SourceKind::ManifestFile;
  std::string value;
};

// A video proposed for curation, before any pipeline stage has run.
struct CandidateVideo {
  std::string video_id;
  CandidateSource source;
  std::string language;  // ISO 639-3 sign language code
  double duration_s = 0.0;
  std::string media_locator;  // local path or URL; never exported
  std::optional<std::string> description_text;
  Timestamp fetched_at{};
};

}  // namespace signcurator::corpus
