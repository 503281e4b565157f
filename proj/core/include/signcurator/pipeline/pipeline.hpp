#pragma once

#include "signcurator/common/time.hpp"
#include "signcurator/corpus/language.hpp"
#include "signcurator/corpus/manifest.hpp"
#include "signcurator/corpus/record.hpp"
#include "signcurator/gateway/gateway.hpp"
#include "signcurator/stages/templates.hpp"
#include "signcurator/stages/verdicts.hpp"
#include "signcurator/video/frames.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace signcurator::pipeline {

struct PipelineConfig {
  gateway::GatewayConfig gateway;
  video::SamplingConfig sampling;
  stages::TemplateSet templates = stages::TemplateSet::builtin();
  // Frame decoder invocation with {input}, {timestamps_csv} and {outdir}
  // placeholders; see video::decode_frames.
  std::string decoder_command;
  int workers = 1;
  std::filesystem::path checkpoint_path;
  std::filesystem::path audit_path;
};

// ConfigError on anything a run would trip over later: bad worker count,
// empty decoder command or paths, sampling that exceeds what an endpoint
// accepts per request, or a curator/judge separation violation.
void validate_pipeline_config(const PipelineConfig& config);

// Digest over the fields that change verdicts: endpoints (base URL, model,
// frame cap), sampling, templates and the decoder command. Worker count,
// cache and rate/retry tuning, and file paths are excluded; changing them
// must not invalidate a checkpoint.
std::string config_digest(const PipelineConfig& config);

// Durable progress marker, rewritten after every terminal record.
struct Checkpoint {
  std::int64_t version = 1;
  std::string config_digest;
  Timestamp written_at{};
  std::map<std::string, std::string> completed;  // video_id -> record digest
};

// Missing file yields nullopt; a present but malformed file raises
// ParseError.
std::optional<Checkpoint> load_checkpoint(const std::filesystem::path& path);
void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& checkpoint);
std::string checkpoint_to_json(const Checkpoint& checkpoint);
Checkpoint checkpoint_from_json(const std::string& json_text);

// Applies one stage verdict to a record: appends it and moves the state
// machine. Stage order violations and verdicts on terminal records raise
// StateError. Negative outcomes reject with the stage's reason; an
// unparseable outcome rejects as a processing error.
void advance_state(corpus::PipelineRecord& record,
                   stages::StageVerdict verdict);

enum class StartMode {
  Fresh,   // refuses to run when a checkpoint already exists
  Resume,  // picks up a checkpoint when present, otherwise starts fresh
};

struct PipelineResult {
  std::vector<corpus::PipelineRecord> records;  // candidate order, deduped
  corpus::DatasetManifest manifest;             // accepted records only
  std::int64_t reused = 0;    // restored from the checkpoint, not reprocessed
  std::int64_t accepted = 0;
  std::int64_t rejected = 0;
};

// Runs every candidate to a terminal state. Each terminal record is
// appended to the audit log and the checkpoint is rewritten before the next
// record completes, so a killed run resumes without losing finished work.
// A gateway outage halts the run: in-flight candidates are dropped (they
// rerun on resume) and the outage propagates after the checkpoint is
// consistent. Candidate languages must exist in the registry.
PipelineResult run_pipeline(const std::vector<corpus::CandidateVideo>& candidates,
                            const PipelineConfig& config,
                            gateway::Gateway& gateway,
                            const corpus::LanguageRegistry& languages,
                            StartMode mode);

}  // namespace signcurator::pipeline
