#include "signcurator/cli/cli.hpp"

#include "signcurator/common/fs.hpp"
#include "signcurator/common/time.hpp"
#include "signcurator/corpus/gold.hpp"
#include "signcurator/corpus/language.hpp"
#include "signcurator/corpus/manifest.hpp"
#include "signcurator/corpus/record.hpp"
#include "signcurator/error.hpp"
#include "signcurator/gateway/gateway.hpp"
#include "signcurator/ingest/ingest.hpp"
#include "signcurator/metrics/agreement.hpp"
#include "signcurator/metrics/confusion.hpp"
#include "signcurator/metrics/stats.hpp"
#include "signcurator/metrics/text_metrics.hpp"
#include "signcurator/pipeline/pipeline.hpp"
#include "signcurator/stages/templates.hpp"
#include "signcurator/stages/verdicts.hpp"

#include "../internal/json_util.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace signcurator::cli {

using detail::ordered_json;

namespace {

constexpr const char* kDefaultCuratorModel = "qwen2.5-vl-7b";
constexpr const char* kDefaultJudgeModel = "phi-4-multimodal-instruct";
constexpr const char* kCacheDirEnv = "SIGNCURATOR_CACHE_DIR";

struct SourceEntry {
  std::string kind;  // hashtag_table | hashtag_query | user_handle | manifest_file
  std::string value;
  std::string language;
};

struct CliConfig {
  pipeline::PipelineConfig pipeline;
  std::filesystem::path templates_dir;
  std::filesystem::path hashtag_table;
  std::filesystem::path manifest_path;
  std::filesystem::path candidates_path;
  std::vector<SourceEntry> sources;
  std::string fetcher_kind;
  std::filesystem::path fetcher_root;
  std::optional<metrics::ExternalScorerConfig> external_scorer;
  corpus::LanguageRegistry languages = corpus::LanguageRegistry::builtin();
};

gateway::EndpointConfig parse_endpoint(const ordered_json& j,
                                       const std::string& context,
                                       const char* default_model) {
  gateway::EndpointConfig ep;
  ep.model_id = default_model;
  if (j.contains("base_url")) {
    ep.base_url = detail::require_string(j, "base_url", context);
  }
  if (j.contains("model_id")) {
    ep.model_id = detail::require_string(j, "model_id", context);
  }
  if (j.contains("api_key_ref")) {
    ep.api_key_ref = detail::require_string(j, "api_key_ref", context);
  }
  if (j.contains("max_frames_per_request")) {
    ep.max_frames_per_request = static_cast<int>(
        detail::require_number(j, "max_frames_per_request", context));
  }
  if (j.contains("timeout_s")) {
    ep.timeout_s = detail::require_number(j, "timeout_s", context);
  }
  return ep;
}

CliConfig parse_cli_config(const std::string& json_text) {
  const ordered_json j = detail::parse_json(json_text, "config");
  if (!j.is_object()) {
    throw ParseError("config document must be a JSON object");
  }
  CliConfig cfg;
  cfg.pipeline.gateway.curator.model_id = kDefaultCuratorModel;
  cfg.pipeline.gateway.judge.model_id = kDefaultJudgeModel;

  if (j.contains("gateway")) {
    const auto& g = j.at("gateway");
    if (g.contains("curator")) {
      cfg.pipeline.gateway.curator =
          parse_endpoint(g.at("curator"), "gateway.curator",
                         kDefaultCuratorModel);
    }
    if (g.contains("judge")) {
      cfg.pipeline.gateway.judge =
          parse_endpoint(g.at("judge"), "gateway.judge", kDefaultJudgeModel);
    }
    if (g.contains("rate_limit_rps")) {
      cfg.pipeline.gateway.rate_limit_rps =
          detail::require_number(g, "rate_limit_rps", "gateway");
    }
    if (g.contains("max_retries")) {
      cfg.pipeline.gateway.max_retries =
          static_cast<int>(detail::require_number(g, "max_retries", "gateway"));
    }
    if (g.contains("backoff_base_ms")) {
      cfg.pipeline.gateway.backoff_base_ms = static_cast<int>(
          detail::require_number(g, "backoff_base_ms", "gateway"));
    }
    if (g.contains("cache_dir")) {
      cfg.pipeline.gateway.cache_dir =
          detail::require_string(g, "cache_dir", "gateway");
    }
  }
  if (j.contains("sampling")) {
    const auto& s = j.at("sampling");
    if (s.contains("rate_hz")) {
      cfg.pipeline.sampling.rate_hz =
          detail::require_number(s, "rate_hz", "sampling");
    }
    if (s.contains("max_frames")) {
      cfg.pipeline.sampling.max_frames =
          static_cast<int>(detail::require_number(s, "max_frames", "sampling"));
    }
  }
  if (j.contains("decoder_command")) {
    cfg.pipeline.decoder_command =
        detail::require_string(j, "decoder_command", "config");
  }
  if (j.contains("templates_dir")) {
    cfg.templates_dir = detail::require_string(j, "templates_dir", "config");
  }
  if (j.contains("workers")) {
    cfg.pipeline.workers =
        static_cast<int>(detail::require_number(j, "workers", "config"));
  }
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    if (p.contains("checkpoint")) {
      cfg.pipeline.checkpoint_path =
          detail::require_string(p, "checkpoint", "paths");
    }
    if (p.contains("audit_log")) {
      cfg.pipeline.audit_path =
          detail::require_string(p, "audit_log", "paths");
    }
    if (p.contains("dataset_manifest")) {
      cfg.manifest_path =
          detail::require_string(p, "dataset_manifest", "paths");
    }
    if (p.contains("candidates")) {
      cfg.candidates_path = detail::require_string(p, "candidates", "paths");
    }
  }
  if (j.contains("hashtag_table")) {
    cfg.hashtag_table = detail::require_string(j, "hashtag_table", "config");
  }
  if (j.contains("sources")) {
    const auto& sources = j.at("sources");
    if (!sources.is_array()) {
      throw ParseError("config sources must be an array");
    }
    for (const auto& s : sources) {
      SourceEntry entry;
      entry.kind = detail::require_string(s, "kind", "source");
      if (s.contains("value")) {
        entry.value = detail::require_string(s, "value", "source");
      }
      entry.language = detail::require_string(s, "language", "source");
      cfg.sources.push_back(std::move(entry));
    }
  }
  if (j.contains("fetcher")) {
    const auto& f = j.at("fetcher");
    cfg.fetcher_kind = detail::require_string(f, "kind", "fetcher");
    if (f.contains("root")) {
      cfg.fetcher_root = detail::require_string(f, "root", "fetcher");
    }
  }
  if (j.contains("external_scorer")) {
    const auto& e = j.at("external_scorer");
    metrics::ExternalScorerConfig scorer;
    scorer.base_url = detail::require_string(e, "base_url", "external_scorer");
    if (e.contains("api_key_ref")) {
      scorer.api_key_ref =
          detail::require_string(e, "api_key_ref", "external_scorer");
    }
    if (e.contains("timeout_s")) {
      scorer.timeout_s =
          detail::require_number(e, "timeout_s", "external_scorer");
    }
    cfg.external_scorer = std::move(scorer);
  }
  if (j.contains("languages")) {
    const auto& languages = j.at("languages");
    if (!languages.is_array()) {
      throw ParseError("config languages must be an array");
    }
    for (const auto& l : languages) {
      corpus::LanguageCode code;
      code.iso639_3 = detail::require_string(l, "iso639_3", "language");
      code.display_name = detail::require_string(l, "display_name", "language");
      code.spoken_language =
          detail::require_string(l, "spoken_language", "language");
      code.spoken_name = detail::require_string(l, "spoken_name", "language");
      cfg.languages.add(std::move(code));
    }
  }
  return cfg;
}

CliConfig load_config_or_default(const std::string& config_path) {
  if (config_path.empty()) {
    CliConfig cfg;
    cfg.pipeline.gateway.curator.model_id = kDefaultCuratorModel;
    cfg.pipeline.gateway.judge.model_id = kDefaultJudgeModel;
    return cfg;
  }
  return parse_cli_config(read_file(config_path));
}

CliConfig require_config(const std::string& config_path, const char* verb) {
  if (config_path.empty()) {
    throw ConfigError(std::string(verb) + " requires --config");
  }
  return parse_cli_config(read_file(config_path));
}

// Precedence: config file < flags < environment.
void apply_overrides(CliConfig& cfg, const std::string& flag_cache_dir,
                     int flag_workers) {
  if (!flag_cache_dir.empty()) {
    cfg.pipeline.gateway.cache_dir = flag_cache_dir;
  }
  if (flag_workers > 0) {
    cfg.pipeline.workers = flag_workers;
  }
  if (const char* env_cache = std::getenv(kCacheDirEnv)) {
    cfg.pipeline.gateway.cache_dir = env_cache;
  }
}

std::vector<corpus::PipelineRecord> load_audit_records(
    const std::filesystem::path& path) {
  std::vector<corpus::PipelineRecord> records;
  std::istringstream lines(read_file(path));
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(lines, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    try {
      records.push_back(corpus::record_from_json(line));
    } catch (const ParseError& e) {
      throw ParseError("audit line " + std::to_string(line_number) + ": " +
                       e.what(), line_number, 0);
    }
  }
  return records;
}

std::optional<stages::TextExtraction> text_extraction_of(
    const corpus::PipelineRecord& record) {
  std::optional<stages::TextExtraction> extraction;
  for (const auto& verdict : record.verdicts) {
    if (verdict.stage == stages::Stage::Text &&
        std::holds_alternative<stages::TextExtraction>(verdict.outcome)) {
      extraction = std::get<stages::TextExtraction>(verdict.outcome);
    }
  }
  return extraction;
}

std::string format_metric(const std::optional<double>& value) {
  if (!value) {
    return "n/a";
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", *value);
  return buf;
}

ordered_json metric_to_json(const std::optional<double>& value) {
  if (!value) {
    return nullptr;
  }
  return *value;
}

ordered_json corpus_score_to_json(const metrics::CorpusScore& score) {
  ordered_json j;
  j["score"] = score.value;
  j["signature"] = score.signature;
  j["n"] = score.n;
  return j;
}

// ---- ingest ----

int cmd_ingest(const std::string& config_path, const std::string& out_flag) {
  CliConfig cfg = require_config(config_path, "ingest");
  if (cfg.sources.empty()) {
    throw ConfigError("ingest requires at least one entry in sources");
  }
  const std::filesystem::path out_path =
      !out_flag.empty() ? std::filesystem::path(out_flag)
                        : cfg.candidates_path;
  if (out_path.empty()) {
    throw ConfigError(
        "ingest needs an output path: pass --out or set paths.candidates");
  }

  std::optional<ingest::HashtagTable> table;
  const auto hashtag_table = [&]() -> const ingest::HashtagTable& {
    if (!table) {
      if (cfg.hashtag_table.empty()) {
        throw ConfigError(
            "hashtag_table path is required for hashtag_table sources");
      }
      table = ingest::HashtagTable::parse(read_file(cfg.hashtag_table));
    }
    return *table;
  };

  std::vector<ingest::CrawlSource> crawl_sources;
  for (const auto& entry : cfg.sources) {
    cfg.languages.require(entry.language);
    if (entry.kind == "hashtag_table") {
      const auto expanded =
          ingest::build_queries(entry.language, hashtag_table());
      crawl_sources.insert(crawl_sources.end(), expanded.begin(),
                           expanded.end());
    } else if (entry.kind == "hashtag_query") {
      crawl_sources.push_back({corpus::SourceKind::HashtagQuery, entry.value,
                               entry.language});
    } else if (entry.kind == "user_handle") {
      crawl_sources.push_back({corpus::SourceKind::UserHandle, entry.value,
                               entry.language});
    } else if (entry.kind == "manifest_file") {
      crawl_sources.push_back({corpus::SourceKind::ManifestFile, entry.value,
                               entry.language});
    } else {
      throw ConfigError("unknown source kind '" + entry.kind + "'");
    }
  }

  std::unique_ptr<ingest::CandidateFetcher> fetcher;
  if (!cfg.fetcher_kind.empty()) {
    if (cfg.fetcher_kind != "file") {
      throw ConfigError("unknown fetcher kind '" + cfg.fetcher_kind + "'");
    }
    if (cfg.fetcher_root.empty()) {
      throw ConfigError("file fetcher requires fetcher.root");
    }
    fetcher = std::make_unique<ingest::FileFetcher>(cfg.fetcher_root);
  }

  const Timestamp fetched_at = std::chrono::system_clock::now();
  std::vector<corpus::CandidateVideo> candidates;
  for (const auto& source : crawl_sources) {
    const auto loaded =
        ingest::load_crawl_source(source, fetcher.get(), fetched_at);
    candidates.insert(candidates.end(), loaded.begin(), loaded.end());
  }
  const auto deduped = ingest::dedup_candidates(candidates);
  write_file_atomic(out_path, ingest::candidates_to_jsonl(deduped));
  std::cout << "ingested " << candidates.size() << " candidates, "
            << deduped.size() << " after dedup\n"
            << "candidates written to " << out_path.string() << "\n";
  return 0;
}

// ---- run / resume ----

int cmd_run(const std::string& config_path, const std::string& candidates_flag,
            const std::string& manifest_flag, const std::string& cache_flag,
            int workers_flag, pipeline::StartMode mode) {
  CliConfig cfg = require_config(
      config_path, mode == pipeline::StartMode::Fresh ? "run" : "resume");
  apply_overrides(cfg, cache_flag, workers_flag);

  const std::filesystem::path candidates_path =
      !candidates_flag.empty() ? std::filesystem::path(candidates_flag)
                               : cfg.candidates_path;
  if (candidates_path.empty()) {
    throw ConfigError(
        "no candidate list: pass --candidates or set paths.candidates");
  }
  const std::filesystem::path manifest_path =
      !manifest_flag.empty() ? std::filesystem::path(manifest_flag)
                             : cfg.manifest_path;
  if (manifest_path.empty()) {
    throw ConfigError(
        "no manifest output: pass --manifest or set paths.dataset_manifest");
  }

  if (!cfg.templates_dir.empty()) {
    cfg.pipeline.templates = stages::TemplateSet::load(cfg.templates_dir);
  }
  pipeline::validate_pipeline_config(cfg.pipeline);

  const auto candidates =
      ingest::candidates_from_jsonl(read_file(candidates_path));
  gateway::Gateway gw(cfg.pipeline.gateway);
  const pipeline::PipelineResult result =
      pipeline::run_pipeline(candidates, cfg.pipeline, gw, cfg.languages, mode);
  write_file_atomic(manifest_path,
                    corpus::manifest_to_json(result.manifest));
  std::cout << "accepted " << result.accepted << " rejected "
            << result.rejected << " reused " << result.reused << "\n"
            << "network calls " << gw.network_calls() << "\n"
            << "manifest written to " << manifest_path.string() << "\n";
  return 0;
}

// ---- eval ----

struct EvalBlock {
  metrics::ConfusionMatrix matrix;
  metrics::ClassificationReport report;
};

void print_eval_block(const std::string& label, const EvalBlock& block) {
  std::cout << label << " accuracy " << format_metric(block.report.accuracy)
            << " precision " << format_metric(block.report.precision)
            << " recall " << format_metric(block.report.recall) << "\n";
}

ordered_json eval_block_to_json(const EvalBlock& block) {
  ordered_json j;
  j["confusion_matrix"] = {{"tp", block.matrix.tp},
                           {"fp", block.matrix.fp},
                           {"fn", block.matrix.fn},
                           {"tn", block.matrix.tn}};
  j["accuracy"] = metric_to_json(block.report.accuracy);
  j["precision"] = metric_to_json(block.report.precision);
  j["recall"] = metric_to_json(block.report.recall);
  return j;
}

int cmd_eval(const std::string& pred_path, const std::string& gold_path,
             const std::string& language_filter, bool include_processing,
             bool missing_as_reject, const std::string& out_path) {
  std::vector<corpus::PipelineRecord> records = load_audit_records(pred_path);
  if (!language_filter.empty()) {
    std::erase_if(records, [&](const corpus::PipelineRecord& r) {
      return r.candidate.language != language_filter;
    });
  }
  const auto gold = corpus::parse_gold_labels(read_file(gold_path));
  if (gold.empty()) {
    throw InputError("gold label file holds no labels");
  }

  // Processing-error records are pipeline failures: their gold labels are
  // excluded from scoring unless explicitly included as rejections.
  std::set<std::string> excluded_ids;
  if (!include_processing) {
    for (const auto& id : metrics::processing_error_ids(records)) {
      excluded_ids.insert(id);
    }
  }
  std::vector<corpus::GoldLabel> effective_gold;
  for (const auto& label : gold) {
    if (excluded_ids.find(label.video_id) == excluded_ids.end()) {
      effective_gold.push_back(label);
    }
  }
  if (effective_gold.empty()) {
    throw InputError(
        "every gold label was excluded as a processing-error record");
  }

  std::map<std::string, bool> predictions = metrics::predictions_from_records(
      records, {.include_processing_errors = include_processing});
  // The flag resolves gold rows whose video never produced a prediction:
  // count them as predicted-reject instead of failing coverage.
  if (missing_as_reject) {
    for (const auto& label : effective_gold) {
      predictions.emplace(label.video_id, false);
    }
  }

  const EvalBlock overall{
      metrics::confusion_matrix(predictions, effective_gold),
      {}};
  EvalBlock overall_scored = overall;
  overall_scored.report = metrics::classification_metrics(overall.matrix);

  // Per-language blocks cover the gold rows whose video has a record in
  // that language; rows with no record at all appear only in "overall".
  std::map<std::string, std::string> language_of;
  for (const auto& record : records) {
    language_of.emplace(record.candidate.video_id,
                        record.candidate.language);
  }
  std::map<std::string, std::vector<corpus::GoldLabel>> gold_by_language;
  for (const auto& label : effective_gold) {
    const auto it = language_of.find(label.video_id);
    if (it != language_of.end() &&
        predictions.find(label.video_id) != predictions.end()) {
      gold_by_language[it->second].push_back(label);
    }
  }

  std::map<std::string, EvalBlock> blocks;
  for (const auto& [language, labels] : gold_by_language) {
    EvalBlock block;
    block.matrix = metrics::confusion_matrix(predictions, labels);
    block.report = metrics::classification_metrics(block.matrix);
    blocks.emplace(language, std::move(block));
  }

  for (const auto& [language, block] : blocks) {
    print_eval_block(language, block);
  }
  print_eval_block("overall", overall_scored);

  if (!out_path.empty()) {
    ordered_json report;
    report["languages"] = ordered_json::object();
    for (const auto& [language, block] : blocks) {
      report["languages"][language] = eval_block_to_json(block);
    }
    report["overall"] = eval_block_to_json(overall_scored);
    write_file_atomic(out_path, report.dump(2) + "\n");
  }
  return 0;
}

// ---- agreement ----

void print_agreement_block(const std::string& label,
                           const metrics::AgreementReport& report) {
  char bleu[32];
  char chrf[32];
  std::snprintf(bleu, sizeof(bleu), "%.2f", report.bleu.value);
  std::snprintf(chrf, sizeof(chrf), "%.2f", report.chrf.value);
  std::cout << label << " " << report.bleu.signature << " " << bleu << "\n"
            << label << " " << report.chrf.signature << " " << chrf << "\n";
  if (report.external) {
    char ext[32];
    std::snprintf(ext, sizeof(ext), "%.4f", report.external->value);
    std::cout << label << " " << report.external->signature << " " << ext
              << "\n";
  }
  std::cout << label << " scored " << report.n_scored << " excluded "
            << report.n_excluded << "\n";
}

ordered_json agreement_to_json(const metrics::AgreementReport& report) {
  ordered_json j;
  j["bleu"] = corpus_score_to_json(report.bleu);
  j["chrf"] = corpus_score_to_json(report.chrf);
  if (report.external) {
    j["external"] = corpus_score_to_json(*report.external);
  }
  j["n_scored"] = report.n_scored;
  j["n_excluded"] = report.n_excluded;
  return j;
}

int cmd_agreement(const std::string& config_path, const std::string& pred_path,
                  const std::string& gold_path,
                  const std::string& language_filter,
                  const std::string& out_path) {
  const CliConfig cfg = load_config_or_default(config_path);
  std::vector<corpus::PipelineRecord> records = load_audit_records(pred_path);
  if (!language_filter.empty()) {
    std::erase_if(records, [&](const corpus::PipelineRecord& r) {
      return r.candidate.language != language_filter;
    });
  }
  const auto gold_labels = corpus::parse_gold_labels(read_file(gold_path));
  std::map<std::string, std::string> gold;
  for (const auto& label : gold_labels) {
    if (label.gold_translation) {
      gold.emplace(label.video_id, *label.gold_translation);
    }
  }
  if (gold.empty()) {
    throw InputError("gold label file holds no gold translations");
  }

  std::map<std::string, stages::TextExtraction> extractions;
  std::map<std::string, std::string> language_of;
  for (const auto& record : records) {
    if (const auto extraction = text_extraction_of(record)) {
      extractions.emplace(record.candidate.video_id, *extraction);
      language_of.emplace(record.candidate.video_id,
                          record.candidate.language);
    }
  }

  const metrics::ExternalScorerConfig* scorer =
      cfg.external_scorer ? &*cfg.external_scorer : nullptr;
  const metrics::AgreementReport overall =
      metrics::agreement_report(extractions, gold, scorer);

  // Per-language blocks cover gold rows whose video produced an extraction
  // verdict; rows with no extraction at all count only in "overall".
  std::map<std::string, std::map<std::string, std::string>> gold_by_language;
  for (const auto& [video_id, reference] : gold) {
    const auto it = language_of.find(video_id);
    if (it != language_of.end()) {
      gold_by_language[it->second].emplace(video_id, reference);
    }
  }
  std::map<std::string, std::optional<metrics::AgreementReport>> blocks;
  for (const auto& [language, language_gold] : gold_by_language) {
    try {
      blocks.emplace(language,
                     metrics::agreement_report(extractions, language_gold,
                                               scorer));
    } catch (const EmptyReportError&) {
      blocks.emplace(language, std::nullopt);  // nothing scorable here
    }
  }

  for (const auto& [language, block] : blocks) {
    if (block) {
      print_agreement_block(language, *block);
    } else {
      std::cout << language << " scored 0 (nothing scorable)\n";
    }
  }
  print_agreement_block("overall", overall);

  if (!out_path.empty()) {
    ordered_json report;
    report["languages"] = ordered_json::object();
    for (const auto& [language, block] : blocks) {
      if (block) {
        report["languages"][language] = agreement_to_json(*block);
      }
    }
    report["overall"] = agreement_to_json(overall);
    write_file_atomic(out_path, report.dump(2) + "\n");
  }
  return 0;
}

// ---- stats ----

int cmd_stats(const std::string& config_path,
              const std::string& manifest_flag) {
  std::filesystem::path manifest_path = manifest_flag;
  if (manifest_path.empty() && !config_path.empty()) {
    manifest_path = load_config_or_default(config_path).manifest_path;
  }
  if (manifest_path.empty()) {
    throw ConfigError(
        "stats needs a manifest: pass --manifest or set "
        "paths.dataset_manifest");
  }
  const auto manifest = corpus::parse_manifest(read_file(manifest_path));
  std::cout << metrics::render_stats_table(metrics::dataset_stats(manifest));
  return 0;
}

// ---- export ----

int cmd_export(const std::string& config_path,
               const std::string& manifest_flag,
               const std::string& out_path) {
  std::filesystem::path manifest_path = manifest_flag;
  if (manifest_path.empty() && !config_path.empty()) {
    manifest_path = load_config_or_default(config_path).manifest_path;
  }
  if (manifest_path.empty()) {
    throw ConfigError(
        "export needs a manifest: pass --manifest or set "
        "paths.dataset_manifest");
  }
  const auto manifest = corpus::parse_manifest(read_file(manifest_path));
  // Release form: video ids and pipeline text only. No media locators, no
  // source handles, no descriptions.
  std::string out;
  for (const auto& record : manifest.records) {
    ordered_json line;
    line["video_id"] = record.video_id;
    line["language"] = record.language;
    line["extracted_text"] = record.extracted_text;
    out += line.dump();
    out += '\n';
  }
  if (out_path.empty()) {
    std::cout << out;
  } else {
    write_file_atomic(out_path, out);
    std::cout << "export written to " << out_path << "\n";
  }
  return 0;
}

template <typename F>
int run_guarded(F&& f) {
  try {
    return f();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const TemplateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CoverageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const EmptyReportError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const StateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace

int dispatch(int argc, char** argv) {
  CLI::App app{"sign-language video curation pipeline and evaluation harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string candidates_path;
  std::string manifest_path;
  std::string cache_dir;
  std::string pred_path;
  std::string gold_path;
  std::string language_filter;
  int workers = 0;
  bool include_processing = false;
  bool missing_as_reject = false;

  CLI::App* ingest_cmd = app.add_subcommand(
      "ingest", "resolve configured sources into a candidate list");
  ingest_cmd->add_option("--config", config_path, "config file")->required();
  ingest_cmd->add_option("--out", out_path, "candidate JSONL output path");

  CLI::App* run_cmd = app.add_subcommand(
      "run", "curate candidates into a dataset manifest (fresh start)");
  CLI::App* resume_cmd = app.add_subcommand(
      "resume", "continue a checkpointed run, or start one");
  for (CLI::App* cmd : {run_cmd, resume_cmd}) {
    cmd->add_option("--config", config_path, "config file")->required();
    cmd->add_option("--candidates", candidates_path, "candidate JSONL input");
    cmd->add_option("--manifest", manifest_path, "manifest output path");
    cmd->add_option("--workers", workers, "worker thread count");
    cmd->add_option("--cache-dir", cache_dir, "response cache directory");
  }

  CLI::App* eval_cmd = app.add_subcommand(
      "eval", "score accept/reject decisions against gold labels");
  eval_cmd->add_option("--pred", pred_path, "audit JSONL with predictions")
      ->required();
  eval_cmd->add_option("--gold", gold_path, "gold label JSONL")->required();
  eval_cmd->add_option("--language", language_filter,
                       "restrict to one language code");
  eval_cmd->add_flag("--include-processing-errors", include_processing,
                     "score processing-error records as rejections");
  eval_cmd->add_flag("--missing-as-reject", missing_as_reject,
                     "treat gold rows without a prediction as rejections");
  eval_cmd->add_option("--out", out_path, "report JSON output path");

  CLI::App* agreement_cmd = app.add_subcommand(
      "agreement", "score extracted text against gold translations");
  agreement_cmd->add_option("--config", config_path,
                            "config file (for the external scorer)");
  agreement_cmd->add_option("--pred", pred_path,
                            "audit JSONL with text extractions")
      ->required();
  agreement_cmd->add_option("--gold", gold_path, "gold label JSONL")
      ->required();
  agreement_cmd->add_option("--language", language_filter,
                            "restrict to one language code");
  agreement_cmd->add_option("--out", out_path, "report JSON output path");

  CLI::App* stats_cmd = app.add_subcommand(
      "stats", "per-language video counts and hours from a manifest");
  stats_cmd->add_option("--config", config_path, "config file");
  stats_cmd->add_option("--manifest", manifest_path, "manifest path");

  CLI::App* export_cmd = app.add_subcommand(
      "export", "release form of a manifest: video ids and text only");
  export_cmd->add_option("--config", config_path, "config file");
  export_cmd->add_option("--manifest", manifest_path, "manifest path");
  export_cmd->add_option("--out", out_path, "export JSONL output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (ingest_cmd->parsed()) {
    return run_guarded([&] { return cmd_ingest(config_path, out_path); });
  }
  if (run_cmd->parsed() || resume_cmd->parsed()) {
    const auto mode = run_cmd->parsed() ? pipeline::StartMode::Fresh
                                        : pipeline::StartMode::Resume;
    return run_guarded([&] {
      return cmd_run(config_path, candidates_path, manifest_path, cache_dir,
                     workers, mode);
    });
  }
  if (eval_cmd->parsed()) {
    return run_guarded([&] {
      return cmd_eval(pred_path, gold_path, language_filter,
                      include_processing, missing_as_reject, out_path);
    });
  }
  if (agreement_cmd->parsed()) {
    return run_guarded([&] {
      return cmd_agreement(config_path, pred_path, gold_path, language_filter,
                           out_path);
    });
  }
  if (stats_cmd->parsed()) {
    return run_guarded([&] { return cmd_stats(config_path, manifest_path); });
  }
  if (export_cmd->parsed()) {
    return run_guarded(
        [&] { return cmd_export(config_path, manifest_path, out_path); });
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}

}  // namespace signcurator::cli
