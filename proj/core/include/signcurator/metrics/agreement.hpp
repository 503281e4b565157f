#pragma once

#include "signcurator/metrics/text_metrics.hpp"
#include "signcurator/stages/verdicts.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace signcurator::metrics {

struct ExternalScorerConfig {
  std::string base_url;     // e.g. "http://127.0.0.1:9090"
  std::string api_key_ref;  // env var holding the key; empty = no auth header
  double timeout_s = 30.0;
};

// One score per (hypothesis, reference) pair, order preserved, via
// POST /score. An empty pair list returns [] without a request. An
// unreachable, failing, or off-contract scorer raises
// FeatureUnavailableError so reports can omit the column.
std::vector<double> score_external(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const ExternalScorerConfig& scorer);

struct AgreementReport {
  CorpusScore bleu;
  CorpusScore chrf;
  std::optional<CorpusScore> external;  // absent when no scorer or on outage
  std::int64_t n_scored = 0;
  std::int64_t n_excluded = 0;
};

// Caption-agreement scores over pairs where the extraction produced text.
// Extractions without text, and gold ids with no extraction at all, count
// toward n_excluded. Empty gold raises InputError; zero scorable pairs
// raise EmptyReportError. The external column is the mean pair score and is
// omitted when the scorer is unavailable.
AgreementReport agreement_report(
    const std::map<std::string, stages::TextExtraction>& extractions,
    const std::map<std::string, std::string>& gold,
    const ExternalScorerConfig* scorer = nullptr);

}  // namespace signcurator::metrics
