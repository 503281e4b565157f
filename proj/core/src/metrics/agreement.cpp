#include "signcurator/metrics/agreement.hpp"

#include "signcurator/error.hpp"
#include "signcurator/gateway/gateway.hpp"

#include "../internal/json_util.hpp"

#include <httplib.h>

#include <cstdlib>
#include <numeric>

namespace signcurator::metrics {

using detail::ordered_json;

std::vector<double> score_external(
    const std::vector<std::pair<std::string, std::string>>& pairs,
    const ExternalScorerConfig& scorer) {
  if (pairs.empty()) {
    return {};
  }
  if (scorer.base_url.empty()) {
    throw FeatureUnavailableError("external scorer is not configured");
  }

  gateway::ParsedBaseUrl url;
  try {
    url = gateway::parse_base_url(scorer.base_url);
  } catch (const ConfigError& e) {
    throw FeatureUnavailableError(std::string("external scorer URL: ") +
                                  e.what());
  }

  ordered_json body;
  body["pairs"] = ordered_json::array();
  for (const auto& [hypothesis, reference] : pairs) {
    body["pairs"].push_back(
        {{"hypothesis", hypothesis}, {"reference", reference}});
  }

  httplib::Client client(url.origin);
  const auto seconds = static_cast<time_t>(scorer.timeout_s);
  const auto micros = static_cast<time_t>(
      (scorer.timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);
  httplib::Headers headers;
  if (!scorer.api_key_ref.empty()) {
    if (const char* key = std::getenv(scorer.api_key_ref.c_str())) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }

  const auto result = client.Post(url.path_prefix + "/score", headers,
                                  body.dump(), "application/json");
  if (!result) {
    throw FeatureUnavailableError("external scorer unreachable: " +
                                  httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw FeatureUnavailableError("external scorer returned status " +
                                  std::to_string(result->status));
  }

  ordered_json reply =
      ordered_json::parse(result->body, nullptr, /*allow_exceptions=*/false);
  if (reply.is_discarded() || !reply.is_object() ||
      !reply.contains("scores") || !reply["scores"].is_array()) {
    throw FeatureUnavailableError(
        "external scorer reply lacks a scores array");
  }
  std::vector<double> scores;
  scores.reserve(reply["scores"].size());
  for (const auto& s : reply["scores"]) {
    if (!s.is_number()) {
      throw FeatureUnavailableError(
          "external scorer reply holds a non-numeric score");
    }
    scores.push_back(s.get<double>());
  }
  if (scores.size() != pairs.size()) {
    throw FeatureUnavailableError(
        "external scorer returned " + std::to_string(scores.size()) +
        " scores for " + std::to_string(pairs.size()) + " pairs");
  }
  return scores;
}

AgreementReport agreement_report(
    const std::map<std::string, stages::TextExtraction>& extractions,
    const std::map<std::string, std::string>& gold,
    const ExternalScorerConfig* scorer) {
  if (gold.empty()) {
    throw InputError("agreement report requires at least one gold pair");
  }

  std::vector<std::string> hyps;
  std::vector<std::string> refs;
  std::vector<std::pair<std::string, std::string>> pairs;
  std::int64_t excluded = 0;
  for (const auto& [video_id, reference] : gold) {
    const auto it = extractions.find(video_id);
    if (it == extractions.end() || !it->second.text ||
        it->second.text->empty()) {
      ++excluded;  // no extraction, or the stage found no text
      continue;
    }
    hyps.push_back(*it->second.text);
    refs.push_back(reference);
    pairs.emplace_back(*it->second.text, reference);
  }
  if (hyps.empty()) {
    throw EmptyReportError(
        "no scorable pairs: every extraction was empty or missing");
  }

  AgreementReport report;
  report.n_scored = static_cast<std::int64_t>(hyps.size());
  report.n_excluded = excluded;
  report.bleu = bleu_corpus(hyps, refs);
  report.chrf = chrf_corpus(hyps, refs);
  if (scorer != nullptr) {
    try {
      const std::vector<double> scores = score_external(pairs, *scorer);
      CorpusScore external;
      external.metric = CorpusMetric::External;
      external.value =
          std::accumulate(scores.begin(), scores.end(), 0.0) /
          static_cast<double>(scores.size());
      external.signature = "External|url:" + scorer->base_url;
      external.n = static_cast<std::int64_t>(scores.size());
      report.external = external;
    } catch (const FeatureUnavailableError&) {
      // scorer down: the report simply omits the column
    }
  }
  return report;
}

}  // namespace signcurator::metrics
