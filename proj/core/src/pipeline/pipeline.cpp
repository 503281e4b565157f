#include "signcurator/pipeline/pipeline.hpp"

#include "signcurator/common/fs.hpp"
#include "signcurator/common/hash.hpp"
#include "signcurator/error.hpp"
#include "signcurator/ingest/ingest.hpp"
#include "signcurator/stages/runner.hpp"

#include "../internal/json_util.hpp"

#include <atomic>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>

namespace signcurator::pipeline {

using detail::ordered_json;

void validate_pipeline_config(const PipelineConfig& config) {
  gateway::validate_model_separation(config.gateway);
  if (config.workers < 1) {
    throw ConfigError("workers must be at least 1");
  }
  if (config.decoder_command.empty()) {
    throw ConfigError("decoder_command must not be empty");
  }
  if (config.sampling.rate_hz <= 0.0) {
    throw ConfigError("sampling rate_hz must be positive");
  }
  if (config.sampling.max_frames < 1) {
    throw ConfigError("sampling max_frames must be at least 1");
  }
  const auto check_cap = [&](const gateway::EndpointConfig& ep,
                             const char* name) {
    if (config.sampling.max_frames > ep.max_frames_per_request) {
      std::ostringstream msg;
      msg << "sampling max_frames (" << config.sampling.max_frames
          << ") exceeds " << name << " max_frames_per_request ("
          << ep.max_frames_per_request << ")";
      throw ConfigError(msg.str());
    }
  };
  check_cap(config.gateway.curator, "curator");
  check_cap(config.gateway.judge, "judge");
  if (config.checkpoint_path.empty()) {
    throw ConfigError("checkpoint_path must not be empty");
  }
  if (config.audit_path.empty()) {
    throw ConfigError("audit_path must not be empty");
  }
}

std::string config_digest(const PipelineConfig& config) {
  const auto endpoint_fields = [](const gateway::EndpointConfig& ep) {
    ordered_json j;
    j["base_url"] = ep.base_url;
    j["model_id"] = ep.model_id;
    j["max_frames_per_request"] = ep.max_frames_per_request;
    return j;
  };
  ordered_json j;
  j["curator"] = endpoint_fields(config.gateway.curator);
  j["judge"] = endpoint_fields(config.gateway.judge);
  j["sampling"] = {{"rate_hz", config.sampling.rate_hz},
                   {"max_frames", config.sampling.max_frames}};
  j["templates"] = config.templates.digest();
  j["decoder_command"] = config.decoder_command;
  return sha256_hex(j.dump());
}

std::string checkpoint_to_json(const Checkpoint& checkpoint) {
  ordered_json j;
  j["version"] = checkpoint.version;
  j["config_digest"] = checkpoint.config_digest;
  j["written_at"] = to_rfc3339(checkpoint.written_at);
  ordered_json completed = ordered_json::object();
  for (const auto& [id, digest] : checkpoint.completed) {
    completed[id] = digest;  // std::map iteration keeps ids sorted
  }
  j["completed"] = completed;
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& json_text) {
  const ordered_json j = detail::parse_json(json_text, "checkpoint");
  Checkpoint cp;
  cp.version = detail::require_number(j, "version", "checkpoint");
  cp.config_digest = detail::require_string(j, "config_digest", "checkpoint");
  cp.written_at = parse_rfc3339(
      detail::require_string(j, "written_at", "checkpoint"));
  const auto& completed = detail::require_field(j, "completed", "checkpoint");
  if (!completed.is_object()) {
    throw ParseError("checkpoint completed must be an object");
  }
  for (const auto& [id, digest] : completed.items()) {
    if (!digest.is_string()) {
      throw ParseError("checkpoint completed digest for '" + id +
                       "' must be a string");
    }
    cp.completed[id] = digest.get<std::string>();
  }
  return cp;
}

std::optional<Checkpoint> load_checkpoint(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    return std::nullopt;
  }
  return checkpoint_from_json(read_file(path));
}

void save_checkpoint(const std::filesystem::path& path,
                     const Checkpoint& checkpoint) {
  write_file_atomic(path, checkpoint_to_json(checkpoint));
}

namespace {

using corpus::PipelineRecord;
using corpus::RecordState;
using corpus::RejectionReason;
using stages::Stage;

Stage expected_stage(RecordState state) {
  switch (state) {
    case RecordState::Ingested: return Stage::Face;
    case RecordState::FaceChecked: return Stage::Activity;
    case RecordState::ActivityChecked: return Stage::Text;
    case RecordState::TextExtracted: return Stage::Judge;
    default:
      throw StateError("record in state '" + corpus::to_string(state) +
                       "' accepts no further verdicts");
  }
}

void reject(PipelineRecord& record, RejectionReason reason) {
  record.state = RecordState::Rejected;
  record.rejection_reason = reason;
}

}  // namespace

void advance_state(corpus::PipelineRecord& record,
                   stages::StageVerdict verdict) {
  const Stage expected = expected_stage(record.state);
  if (verdict.stage != expected) {
    throw StateError("record '" + record.candidate.video_id + "' in state '" +
                     corpus::to_string(record.state) + "' expects a " +
                     stages::to_string(expected) + " verdict, got " +
                     stages::to_string(verdict.stage));
  }
  const stages::VerdictOutcome& outcome = verdict.outcome;
  if (std::holds_alternative<stages::UnparseableOutcome>(outcome)) {
    const auto& u = std::get<stages::UnparseableOutcome>(outcome);
    if (!record.note) {
      record.note = "unparseable reply at " + stages::to_string(verdict.stage) +
                    " stage: " + u.reason;
    }
    record.verdicts.push_back(std::move(verdict));
    reject(record, RejectionReason::ProcessingError);
    return;
  }
  // Read the outcome before the verdict is moved into the record; `v` would
  // dangle into a moved-from variant otherwise.
  switch (verdict.stage) {
    case Stage::Face: {
      const auto& v = std::get<stages::FaceVerdict>(outcome);
      if (v.face_visible) {
        record.state = RecordState::FaceChecked;
      } else {
        reject(record, RejectionReason::FaceNotVisible);
      }
      record.verdicts.push_back(std::move(verdict));
      return;
    }
    case Stage::Activity: {
      const auto& v = std::get<stages::ActivityVerdict>(outcome);
      if (v.is_signing) {
        record.state = RecordState::ActivityChecked;
      } else {
        reject(record, RejectionReason::NotSigning);
      }
      record.verdicts.push_back(std::move(verdict));
      return;
    }
    case Stage::Text: {
      const auto& v = std::get<stages::TextExtraction>(outcome);
      if (v.text && !v.text->empty()) {
        record.extracted_text = *v.text;
        record.state = RecordState::TextExtracted;
      } else {
        reject(record, RejectionReason::NoText);
      }
      record.verdicts.push_back(std::move(verdict));
      return;
    }
    case Stage::Judge: {
      const auto& v = std::get<stages::JudgeVerdict>(outcome);
      if (v.aligned) {
        record.state = RecordState::Accepted;
      } else {
        reject(record, RejectionReason::MisalignedText);
      }
      record.verdicts.push_back(std::move(verdict));
      return;
    }
  }
  throw StateError("unhandled stage value");
}

namespace {

// Shared mutable run state; every member is guarded by `mutex` except the
// atomics.
struct RunState {
  std::mutex mutex;
  std::vector<std::optional<PipelineRecord>> results;
  Checkpoint checkpoint;
  std::atomic<std::size_t> next_index{0};
  std::atomic<bool> halted{false};
  std::exception_ptr failure;
};

void commit_record(const PipelineConfig& config, RunState& state,
                   std::size_t index, PipelineRecord record) {
  if (const auto violation = corpus::validate_record(record)) {
    throw ValidationError("pipeline produced an invalid record for '" +
                          record.candidate.video_id + "': " + *violation);
  }
  const std::string digest = corpus::record_digest(record);
  const std::string line = corpus::record_to_json(record);
  std::lock_guard<std::mutex> lock(state.mutex);
  append_line(config.audit_path, line);
  state.checkpoint.completed[record.candidate.video_id] = digest;
  state.checkpoint.written_at = std::chrono::system_clock::now();
  save_checkpoint(config.checkpoint_path, state.checkpoint);
  state.results[index] = std::move(record);
}

PipelineRecord process_candidate(const corpus::CandidateVideo& candidate,
                                 const PipelineConfig& config,
                                 gateway::Gateway& gateway,
                                 const corpus::LanguageCode& language) {
  PipelineRecord record;
  record.candidate = candidate;
  record.state = RecordState::Ingested;

  std::shared_ptr<const video::FrameSequence> frames;
  try {
    const video::FramePlan plan = video::plan_frame_samples(
        candidate.duration_s, config.sampling.rate_hz,
        config.sampling.max_frames);
    frames = std::make_shared<const video::FrameSequence>(
        video::decode_frames(config.decoder_command, candidate.media_locator,
                             plan));
  } catch (const MediaError& e) {
    record.note = e.decoder_stderr().empty()
                      ? std::string(e.what())
                      : std::string(e.what()) + ": " + e.decoder_stderr();
    reject(record, RejectionReason::ProcessingError);
    return record;
  }

  advance_state(record, stages::detect_face(frames, gateway, config.templates,
                                            language));
  if (record.state == RecordState::FaceChecked) {
    advance_state(record, stages::detect_sign_activity(
                              frames, gateway, config.templates, language));
  }
  if (record.state == RecordState::ActivityChecked) {
    advance_state(record, stages::extract_text(frames, gateway,
                                               config.templates, language));
  }
  if (record.state == RecordState::TextExtracted) {
    advance_state(record,
                  stages::judge_alignment(frames, *record.extracted_text,
                                          gateway, config.templates,
                                          language));
  }
  return record;
}

void worker_loop(const std::vector<corpus::CandidateVideo>& candidates,
                 const PipelineConfig& config, gateway::Gateway& gateway,
                 const corpus::LanguageRegistry& languages, RunState& state) {
  while (!state.halted.load(std::memory_order_relaxed)) {
    const std::size_t index =
        state.next_index.fetch_add(1, std::memory_order_relaxed);
    if (index >= candidates.size()) {
      return;
    }
    const corpus::CandidateVideo& candidate = candidates[index];
    {
      std::lock_guard<std::mutex> lock(state.mutex);
      if (state.results[index].has_value()) {
        continue;  // restored from the checkpoint
      }
    }
    try {
      const corpus::LanguageCode language =
          languages.require(candidate.language);
      PipelineRecord record =
          process_candidate(candidate, config, gateway, language);
      commit_record(config, state, index, std::move(record));
    } catch (...) {
      std::lock_guard<std::mutex> lock(state.mutex);
      if (!state.failure) {
        state.failure = std::current_exception();
      }
      state.halted.store(true, std::memory_order_relaxed);
      return;
    }
  }
}

}  // namespace

PipelineResult run_pipeline(
    const std::vector<corpus::CandidateVideo>& raw_candidates,
    const PipelineConfig& config, gateway::Gateway& gateway,
    const corpus::LanguageRegistry& languages, StartMode mode) {
  validate_pipeline_config(config);
  const std::vector<corpus::CandidateVideo> candidates =
      ingest::dedup_candidates(raw_candidates);
  for (const auto& candidate : candidates) {
    languages.require(candidate.language);  // fail before any work starts
  }

  const std::string digest = config_digest(config);
  RunState state;
  state.results.resize(candidates.size());
  state.checkpoint.config_digest = digest;

  std::int64_t reused = 0;
  if (mode == StartMode::Fresh) {
    if (std::filesystem::exists(config.checkpoint_path)) {
      throw StateError("checkpoint already exists at '" +
                       config.checkpoint_path.string() +
                       "'; resume it or remove it before a fresh run");
    }
    write_file_atomic(config.audit_path, "");
  } else if (const auto existing = load_checkpoint(config.checkpoint_path)) {
    if (existing->config_digest != digest) {
      throw StateError(
          "checkpoint was written under a different configuration; refusing "
          "to resume (expected config digest " + digest + ", found " +
          existing->config_digest + ")");
    }
    // Restore terminal records from the audit log, keeping only entries the
    // checkpoint vouches for, and rewrite the log to exactly those entries
    // so a crash between append and checkpoint save cannot duplicate lines.
    std::unordered_map<std::string, PipelineRecord> restored;
    std::vector<std::string> restored_order;
    if (std::filesystem::exists(config.audit_path)) {
      std::istringstream lines(read_file(config.audit_path));
      std::string line;
      while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') {
          line.pop_back();
        }
        if (line.empty()) {
          continue;
        }
        PipelineRecord record = corpus::record_from_json(line);
        const auto it = existing->completed.find(record.candidate.video_id);
        if (it == existing->completed.end()) {
          continue;  // appended after the last checkpoint write; rerun it
        }
        if (corpus::record_digest(record) != it->second) {
          throw StateError("audit log record for '" +
                           record.candidate.video_id +
                           "' does not match the checkpoint digest");
        }
        const std::string id = record.candidate.video_id;
        if (restored.emplace(id, std::move(record)).second) {
          restored_order.push_back(id);
        }
      }
    }
    for (const auto& [id, record_digest_hex] : existing->completed) {
      if (restored.find(id) == restored.end()) {
        throw StateError("checkpoint lists '" + id +
                         "' but the audit log has no record of it");
      }
      (void)record_digest_hex;
    }
    std::string rewritten;
    for (const auto& id : restored_order) {
      rewritten += corpus::record_to_json(restored.at(id));
      rewritten += '\n';
    }
    // The checkpoint keeps every verified record, including ones outside
    // the current candidate list; only listed candidates get reused slots.
    state.checkpoint.completed = existing->completed;
    state.checkpoint.written_at = existing->written_at;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto it = restored.find(candidates[i].video_id);
      if (it == restored.end()) {
        continue;
      }
      state.results[i] = it->second;
      ++reused;
    }
    write_file_atomic(config.audit_path, rewritten);
  } else {
    write_file_atomic(config.audit_path, "");
  }

  if (state.checkpoint.completed.empty() && !std::filesystem::exists(config.checkpoint_path)) {
    state.checkpoint.written_at = std::chrono::system_clock::now();
    save_checkpoint(config.checkpoint_path, state.checkpoint);
  }

  const std::size_t thread_count = std::min<std::size_t>(
      static_cast<std::size_t>(config.workers),
      candidates.empty() ? 1 : candidates.size());
  std::vector<std::thread> threads;
  threads.reserve(thread_count);
  for (std::size_t i = 0; i < thread_count; ++i) {
    threads.emplace_back([&] {
      worker_loop(candidates, config, gateway, languages, state);
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  if (state.failure) {
    std::rethrow_exception(state.failure);
  }

  PipelineResult result;
  result.reused = reused;
  result.records.reserve(candidates.size());
  std::vector<PipelineRecord> accepted;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (!state.results[i].has_value()) {
      throw StateError("candidate '" + candidates[i].video_id +
                       "' never reached a terminal state");
    }
    PipelineRecord& record = *state.results[i];
    if (record.state == RecordState::Accepted) {
      ++result.accepted;
      accepted.push_back(record);
    } else {
      ++result.rejected;
    }
    result.records.push_back(std::move(record));
  }
  result.manifest = corpus::build_manifest(accepted, digest,
                                           std::chrono::system_clock::now());
  return result;
}

}  // namespace signcurator::pipeline
