#pragma once

#include "signcurator/corpus/types.hpp"
#include "signcurator/stages/verdicts.hpp"

#include <optional>
#include <string>
#include <vector>

namespace signcurator::corpus {

// How far a record has advanced. Judged exists as a named state but a record
// never rests there: a judge verdict immediately resolves to Accepted or
// Rejected.
enum class RecordState {
  Ingested,
  FaceChecked,
  ActivityChecked,
  TextExtracted,
  Judged,
  Accepted,
  Rejected,
};

std::string to_string(RecordState state);
RecordState record_state_from_string(const std::string& text);

enum class RejectionReason {
  FaceNotVisible,
  NotSigning,
  NoText,
  MisalignedText,
  ProcessingError,
};

std::string to_string(RejectionReason reason);
RejectionReason rejection_reason_from_string(const std::string& text);

// One candidate's full trip through the pipeline.
struct PipelineRecord {
  CandidateVideo candidate;
  RecordState state = RecordState::Ingested;
  std::optional<RejectionReason> rejection_reason;
  std::vector<stages::StageVerdict> verdicts;
  std::optional<std::string> extracted_text;
  std::optional<std::string> note;  // operator-facing detail, e.g. decoder stderr
};

// Digest over the semantic fields of a verdict: stage, outcome, model_id and
// raw_response. Latency, cache status and attempt count are excluded so a
// warm rerun reproduces the same digests.
std::string verdict_digest(const stages::StageVerdict& verdict);

// Digest over the semantic fields of a record (candidate identity, state,
// rejection reason, verdict digests, extracted text). Used to verify
// checkpointed records on resume.
std::string record_digest(const PipelineRecord& record);

// Serialization used by the audit log and checkpoint store. Round-trips all
// fields including timings.
std::string record_to_json(const PipelineRecord& record);
PipelineRecord record_from_json(const std::string& json_text);

// Candidate serialization used by the ingest → run handoff file.
std::string candidate_to_json(const CandidateVideo& candidate);
CandidateVideo candidate_from_json(const std::string& json_text);

// Returns the name of the first violated invariant, or empty optional when
// the record is coherent (terminal-state bookkeeping, verdict ordering,
// extracted-text presence for accepted records).
std::optional<std::string> validate_record(const PipelineRecord& record);

}  // namespace signcurator::corpus
