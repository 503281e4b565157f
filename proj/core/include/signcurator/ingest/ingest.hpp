#pragma once

#include "signcurator/common/time.hpp"
#include "signcurator/corpus/types.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace signcurator::ingest {

// Hashtags for one sign language, split by the language they are written in.
struct HashtagEntry {
  std::vector<std::string> english;
  std::vector<std::string> native;
};

// Per-language hashtag lists. Shipped as configuration; the lists are
// operator-editable, not ground truth.
class HashtagTable {
 public:
  // Parses the table document: an object keyed by ISO 639-3 code, each value
  // {"english": [...], "native": [...]}. Every language must list at least
  // one hashtag of each kind; violations raise ConfigError.
  static HashtagTable parse(const std::string& json_text);

  void set(const std::string& iso639_3, HashtagEntry entry);
  std::optional<HashtagEntry> find(const std::string& iso639_3) const;
  std::vector<std::string> languages() const;

 private:
  std::map<std::string, HashtagEntry> entries_;
};

// One retrieval strategy instance to execute against a fetcher.
struct CrawlSource {
  corpus::SourceKind kind = corpus::SourceKind::ManifestFile;
  std::string value;     // hashtag, raw user handle, or manifest path
  std::string language;  // ISO 639-3 sign language code
};

// One line of a crawl manifest, before provenance stamping.
struct CrawlLine {
  std::string video_id;
  std::string language;
  std::string media_locator;
  std::optional<double> duration_s;
  std::optional<std::string> description_text;
};

// Retrieval backend. Live platform crawling is deployment-specific; tests
// and the reference deployment use the file-backed implementation below.
class CandidateFetcher {
 public:
  virtual ~CandidateFetcher() = default;

  // Returns the crawl lines for a HashtagQuery or UserHandle source.
  // Transient failures raise IngestError (retryable by the caller).
  virtual std::vector<CrawlLine> fetch(const CrawlSource& source) = 0;
};

// Reads fixtures from root/hashtag/<tag>.jsonl and root/user/<handle>.jsonl.
class FileFetcher : public CandidateFetcher {
 public:
  explicit FileFetcher(std::filesystem::path root);
  std::vector<CrawlLine> fetch(const CrawlSource& source) override;

 private:
  std::filesystem::path root_;
};

// Parses a crawl manifest document (one JSON object per line). All-or-
// nothing: the first malformed line raises ParseError naming its 1-based
// line number and no lines are returned.
std::vector<CrawlLine> parse_crawl_manifest(const std::string& text);

// "sha256:<hex>" form under which user handles appear in all artifacts.
std::string hash_user_handle(const std::string& handle);

// One HashtagQuery per table hashtag for the language, english list first,
// then native, deduplicated case-insensitively (ASCII folding, first wins).
// Unknown language or an empty list raises ConfigError.
std::vector<CrawlSource> build_queries(const std::string& language,
                                       const HashtagTable& table);

// Resolves one source to candidates. ManifestFile sources read their file
// directly; other kinds go through the fetcher. Every candidate carries the
// source's provenance (user handles hashed) and must match the source's
// language. fetched_at is stamped on every candidate.
std::vector<corpus::CandidateVideo> load_crawl_source(
    const CrawlSource& source, CandidateFetcher* fetcher,
    Timestamp fetched_at);

// First occurrence of each video_id wins; order preserved; idempotent.
std::vector<corpus::CandidateVideo> dedup_candidates(
    const std::vector<corpus::CandidateVideo>& candidates);

// Candidate list persistence (one candidate per line), used by the CLI to
// hand ingestion output to the pipeline.
std::string candidates_to_jsonl(
    const std::vector<corpus::CandidateVideo>& candidates);
std::vector<corpus::CandidateVideo> candidates_from_jsonl(
    const std::string& text);

}  // namespace signcurator::ingest
