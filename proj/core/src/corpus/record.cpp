#include "signcurator/corpus/record.hpp"

#include "signcurator/common/hash.hpp"
#include "signcurator/common/time.hpp"
#include "signcurator/error.hpp"

#include "../internal/json_util.hpp"

namespace signcurator::corpus {

using detail::ordered_json;
using stages::Stage;
using stages::StageVerdict;

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::HashtagQuery: return "hashtag_query";
    case SourceKind::UserHandle: return "user_handle";
    case SourceKind::ManifestFile: return "manifest_file";
  }
  throw Error("unhandled source kind value");
}

SourceKind source_kind_from_string(const std::string& text) {
  if (text == "hashtag_query") return SourceKind::HashtagQuery;
  if (text == "user_handle") return SourceKind::UserHandle;
  if (text == "manifest_file") return SourceKind::ManifestFile;
  throw ParseError("unknown source kind: '" + text + "'");
}

std::string to_string(RecordState state) {
  switch (state) {
    case RecordState::Ingested: return "ingested";
    case RecordState::FaceChecked: return "face_checked";
    case RecordState::ActivityChecked: return "activity_checked";
    case RecordState::TextExtracted: return "text_extracted";
    case RecordState::Judged: return "judged";
    case RecordState::Accepted: return "accepted";
    case RecordState::Rejected: return "rejected";
  }
  throw Error("unhandled record state value");
}

RecordState record_state_from_string(const std::string& text) {
  if (text == "ingested") return RecordState::Ingested;
  if (text == "face_checked") return RecordState::FaceChecked;
  if (text == "activity_checked") return RecordState::ActivityChecked;
  if (text == "text_extracted") return RecordState::TextExtracted;
  if (text == "judged") return RecordState::Judged;
  if (text == "accepted") return RecordState::Accepted;
  if (text == "rejected") return RecordState::Rejected;
  throw ParseError("unknown record state: '" + text + "'");
}

std::string to_string(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::FaceNotVisible: return "face_not_visible";
    case RejectionReason::NotSigning: return "not_signing";
    case RejectionReason::NoText: return "no_text";
    case RejectionReason::MisalignedText: return "misaligned_text";
    case RejectionReason::ProcessingError: return "processing_error";
  }
  throw Error("unhandled rejection reason value");
}

RejectionReason rejection_reason_from_string(const std::string& text) {
  if (text == "face_not_visible") return RejectionReason::FaceNotVisible;
  if (text == "not_signing") return RejectionReason::NotSigning;
  if (text == "no_text") return RejectionReason::NoText;
  if (text == "misaligned_text") return RejectionReason::MisalignedText;
  if (text == "processing_error") return RejectionReason::ProcessingError;
  throw ParseError("unknown rejection reason: '" + text + "'");
}

namespace {

ordered_json outcome_to_json(const stages::VerdictOutcome& outcome) {
  ordered_json j;
  if (const auto* face = std::get_if<stages::FaceVerdict>(&outcome)) {
    j["type"] = "face";
    j["face_visible"] = face->face_visible;
    j["people_count"] = face->people_count;
  } else if (const auto* act = std::get_if<stages::ActivityVerdict>(&outcome)) {
    j["type"] = "activity";
    j["is_signing"] = act->is_signing;
  } else if (const auto* text = std::get_if<stages::TextExtraction>(&outcome)) {
    j["type"] = "text";
    if (text->text) {
      j["text"] = *text->text;
    } else {
      j["text"] = nullptr;
    }
    j["source"] = to_string(text->source);
  } else if (const auto* judge = std::get_if<stages::JudgeVerdict>(&outcome)) {
    j["type"] = "judge";
    j["aligned"] = judge->aligned;
    if (judge->rationale) {
      j["rationale"] = *judge->rationale;
    }
  } else if (const auto* bad = std::get_if<stages::UnparseableOutcome>(&outcome)) {
    j["type"] = "unparseable";
    j["reason"] = bad->reason;
  } else {
    throw Error("unhandled verdict outcome variant");
  }
  return j;
}

stages::VerdictOutcome outcome_from_json(const ordered_json& j) {
  const std::string type = detail::require_string(j, "type", "verdict outcome");
  if (type == "face") {
    stages::FaceVerdict v;
    v.face_visible = detail::require_bool(j, "face_visible", "face outcome");
    v.people_count = static_cast<std::int64_t>(
        detail::require_number(j, "people_count", "face outcome"));
    return v;
  }
  if (type == "activity") {
    stages::ActivityVerdict v;
    v.is_signing = detail::require_bool(j, "is_signing", "activity outcome");
    return v;
  }
  if (type == "text") {
    stages::TextExtraction v;
    const auto& text = detail::require_field(j, "text", "text outcome");
    if (!text.is_null()) {
      if (!text.is_string()) {
        throw ParseError("field 'text' in text outcome must be a string or null");
      }
      v.text = text.get<std::string>();
    }
    v.source = stages::text_source_from_string(
        detail::require_string(j, "source", "text outcome"));
    return v;
  }
  if (type == "judge") {
    stages::JudgeVerdict v;
    v.aligned = detail::require_bool(j, "aligned", "judge outcome");
    if (j.contains("rationale") && !j.at("rationale").is_null()) {
      v.rationale = j.at("rationale").get<std::string>();
    }
    return v;
  }
  if (type == "unparseable") {
    stages::UnparseableOutcome v;
    v.reason = detail::require_string(j, "reason", "unparseable outcome");
    return v;
  }
  throw ParseError("unknown verdict outcome type: '" + type + "'");
}

ordered_json verdict_to_json(const StageVerdict& v) {
  ordered_json j;
  j["stage"] = to_string(v.stage);
  j["outcome"] = outcome_to_json(v.outcome);
  j["model_id"] = v.model_id;
  j["raw_response"] = v.raw_response;
  j["latency_ms"] = v.latency_ms;
  j["cached"] = v.cached;
  j["attempts"] = v.attempts;
  return j;
}

StageVerdict verdict_from_json(const ordered_json& j) {
  StageVerdict v;
  v.stage = stages::stage_from_string(
      detail::require_string(j, "stage", "verdict"));
  v.outcome = outcome_from_json(detail::require_field(j, "outcome", "verdict"));
  v.model_id = detail::require_string(j, "model_id", "verdict");
  v.raw_response = detail::require_string(j, "raw_response", "verdict");
  v.latency_ms = static_cast<std::int64_t>(
      detail::require_number(j, "latency_ms", "verdict"));
  v.cached = detail::require_bool(j, "cached", "verdict");
  v.attempts = static_cast<std::int64_t>(
      detail::require_number(j, "attempts", "verdict"));
  return v;
}

ordered_json candidate_to_ojson(const CandidateVideo& c) {
  ordered_json j;
  j["video_id"] = c.video_id;
  j["source"] = {{"kind", to_string(c.source.kind)},
                 {"value", c.source.value}};
  j["language"] = c.language;
  j["duration_s"] = c.duration_s;
  j["media_locator"] = c.media_locator;
  if (c.description_text) {
    j["description_text"] = *c.description_text;
  }
  j["fetched_at"] = to_rfc3339(c.fetched_at);
  return j;
}

CandidateVideo candidate_from_ojson(const ordered_json& j) {
  CandidateVideo c;
  c.video_id = detail::require_string(j, "video_id", "candidate");
  const auto& src = detail::require_field(j, "source", "candidate");
  c.source.kind =
      source_kind_from_string(detail::require_string(src, "kind", "source"));
  c.source.value = detail::require_string(src, "value", "source");
  c.language = detail::require_string(j, "language", "candidate");
  c.duration_s = detail::require_number(j, "duration_s", "candidate");
  c.media_locator = detail::require_string(j, "media_locator", "candidate");
  if (j.contains("description_text") && !j.at("description_text").is_null()) {
    c.description_text = j.at("description_text").get<std::string>();
  }
  c.fetched_at =
      parse_rfc3339(detail::require_string(j, "fetched_at", "candidate"));
  return c;
}

}  // namespace

std::string verdict_digest(const StageVerdict& verdict) {
  ordered_json j;
  j["stage"] = to_string(verdict.stage);
  j["outcome"] = outcome_to_json(verdict.outcome);
  j["model_id"] = verdict.model_id;
  j["raw_response"] = verdict.raw_response;
  return sha256_hex(j.dump());
}

std::string record_digest(const PipelineRecord& record) {
  ordered_json j;
  j["video_id"] = record.candidate.video_id;
  j["source_kind"] = to_string(record.candidate.source.kind);
  j["source_value"] = record.candidate.source.value;
  j["language"] = record.candidate.language;
  j["duration_s"] = record.candidate.duration_s;
  j["media_locator"] = record.candidate.media_locator;
  if (record.candidate.description_text) {
    j["description_text"] = *record.candidate.description_text;
  } else {
    j["description_text"] = nullptr;
  }
  j["fetched_at"] = to_rfc3339(record.candidate.fetched_at);
  j["state"] = to_string(record.state);
  if (record.rejection_reason) {
    j["rejection_reason"] = to_string(*record.rejection_reason);
  } else {
    j["rejection_reason"] = nullptr;
  }
  ordered_json digests = ordered_json::array();
  for (const auto& v : record.verdicts) {
    digests.push_back(verdict_digest(v));
  }
  j["verdict_digests"] = digests;
  if (record.extracted_text) {
    j["extracted_text"] = *record.extracted_text;
  } else {
    j["extracted_text"] = nullptr;
  }
  return sha256_hex(j.dump());
}

std::string record_to_json(const PipelineRecord& record) {
  ordered_json j;
  j["candidate"] = candidate_to_ojson(record.candidate);
  j["state"] = to_string(record.state);
  if (record.rejection_reason) {
    j["rejection_reason"] = to_string(*record.rejection_reason);
  }
  ordered_json verdicts = ordered_json::array();
  for (const auto& v : record.verdicts) {
    verdicts.push_back(verdict_to_json(v));
  }
  j["verdicts"] = verdicts;
  if (record.extracted_text) {
    j["extracted_text"] = *record.extracted_text;
  }
  if (record.note) {
    j["note"] = *record.note;
  }
  return j.dump();
}

PipelineRecord record_from_json(const std::string& json_text) {
  const ordered_json j = detail::parse_json(json_text, "record");
  PipelineRecord r;
  r.candidate =
      candidate_from_ojson(detail::require_field(j, "candidate", "record"));
  r.state =
      record_state_from_string(detail::require_string(j, "state", "record"));
  if (j.contains("rejection_reason") && !j.at("rejection_reason").is_null()) {
    r.rejection_reason = rejection_reason_from_string(
        j.at("rejection_reason").get<std::string>());
  }
  const auto& verdicts = detail::require_field(j, "verdicts", "record");
  if (!verdicts.is_array()) {
    throw ParseError("field 'verdicts' in record must be an array");
  }
  for (const auto& v : verdicts) {
    r.verdicts.push_back(verdict_from_json(v));
  }
  if (j.contains("extracted_text") && !j.at("extracted_text").is_null()) {
    r.extracted_text = j.at("extracted_text").get<std::string>();
  }
  if (j.contains("note") && !j.at("note").is_null()) {
    r.note = j.at("note").get<std::string>();
  }
  return r;
}

std::string candidate_to_json(const CandidateVideo& candidate) {
  return candidate_to_ojson(candidate).dump();
}

CandidateVideo candidate_from_json(const std::string& json_text) {
  return candidate_from_ojson(detail::parse_json(json_text, "candidate"));
}

namespace {

bool outcome_matches_stage(const StageVerdict& v) {
  if (std::holds_alternative<stages::UnparseableOutcome>(v.outcome)) {
    return true;  // can happen at any stage
  }
  switch (v.stage) {
    case Stage::Face:
      return std::holds_alternative<stages::FaceVerdict>(v.outcome);
    case Stage::Activity:
      return std::holds_alternative<stages::ActivityVerdict>(v.outcome);
    case Stage::Text:
      return std::holds_alternative<stages::TextExtraction>(v.outcome);
    case Stage::Judge:
      return std::holds_alternative<stages::JudgeVerdict>(v.outcome);
  }
  return false;
}

// Latest stage a record rejected for this reason may carry a verdict for.
Stage last_allowed_stage(RejectionReason reason) {
  switch (reason) {
    case RejectionReason::FaceNotVisible: return Stage::Face;
    case RejectionReason::NotSigning: return Stage::Activity;
    case RejectionReason::NoText: return Stage::Text;
    case RejectionReason::MisalignedText: return Stage::Judge;
    case RejectionReason::ProcessingError: return Stage::Judge;
  }
  return Stage::Judge;
}

bool outcome_positive(const StageVerdict& v) {
  if (const auto* face = std::get_if<stages::FaceVerdict>(&v.outcome)) {
    return face->face_visible;
  }
  if (const auto* act = std::get_if<stages::ActivityVerdict>(&v.outcome)) {
    return act->is_signing;
  }
  if (const auto* text = std::get_if<stages::TextExtraction>(&v.outcome)) {
    return text->text.has_value() && !text->text->empty();
  }
  if (const auto* judge = std::get_if<stages::JudgeVerdict>(&v.outcome)) {
    return judge->aligned;
  }
  return false;
}

}  // namespace

std::optional<std::string> validate_record(const PipelineRecord& record) {
  if (record.candidate.video_id.empty()) {
    return "video_id must be nonempty";
  }
  if (record.candidate.duration_s < 0.0) {
    return "duration_s must be nonnegative";
  }
  if (record.candidate.language.empty()) {
    return "language must be present";
  }
  if (record.state == RecordState::Rejected && !record.rejection_reason) {
    return "rejected record must carry a rejection_reason";
  }
  if (record.state != RecordState::Rejected && record.rejection_reason) {
    return "rejection_reason present on a record that is not rejected";
  }
  int prev_stage = -1;
  for (const auto& v : record.verdicts) {
    if (v.model_id.empty()) {
      return "verdict model_id must be nonempty";
    }
    if (!outcome_matches_stage(v)) {
      return "verdict outcome does not match its stage";
    }
    const int s = static_cast<int>(v.stage);
    if (s <= prev_stage) {
      return "verdicts must appear in stage order without repeats";
    }
    prev_stage = s;
  }
  if (record.state == RecordState::Rejected) {
    const int limit =
        static_cast<int>(last_allowed_stage(*record.rejection_reason));
    if (prev_stage > limit) {
      return "verdict recorded for a stage after the rejection";
    }
  }
  if (record.state == RecordState::Accepted) {
    if (!record.extracted_text || record.extracted_text->empty()) {
      return "accepted record must carry nonempty extracted_text";
    }
    if (record.verdicts.size() != 4) {
      return "accepted record must carry exactly four verdicts";
    }
    static const Stage expected[] = {Stage::Face, Stage::Activity, Stage::Text,
                                     Stage::Judge};
    for (std::size_t i = 0; i < 4; ++i) {
      if (record.verdicts[i].stage != expected[i]) {
        return "accepted record verdicts must cover face, activity, text, judge in order";
      }
      if (!outcome_positive(record.verdicts[i])) {
        return "accepted record must have positive outcomes at every stage";
      }
    }
  }
  return std::nullopt;
}

}  // namespace signcurator::corpus
