#include "signcurator/corpus/gold.hpp"
#include "signcurator/corpus/language.hpp"
#include "signcurator/corpus/record.hpp"
#include "signcurator/corpus/types.hpp"
#include "signcurator/error.hpp"

#include <doctest.h>

#include <string>

namespace sc = signcurator;
using sc::corpus::CandidateVideo;
using sc::corpus::PipelineRecord;
using sc::corpus::RecordState;
using sc::corpus::RejectionReason;
using sc::stages::Stage;
using sc::stages::StageVerdict;

namespace {

CandidateVideo sample_candidate() {
  CandidateVideo c;
  c.video_id = "vid-001";
  c.source = {sc::corpus::SourceKind::HashtagQuery, "signlanguage"};
  c.language = "ase";
  c.duration_s = 12.5;
  c.media_locator = "file:///data/vid-001.mp4";
  c.description_text = "a clip";
  c.fetched_at = sc::parse_rfc3339("2026-08-01T10:00:00Z");
  return c;
}

StageVerdict make_verdict(Stage stage, bool positive) {
  StageVerdict v;
  v.stage = stage;
  v.model_id = stage == Stage::Judge ? "judge-model" : "curator-model";
  v.raw_response = "{\"scripted\": true}";
  v.latency_ms = 42;
  v.attempts = 1;
  switch (stage) {
    case Stage::Face:
      v.outcome = sc::stages::FaceVerdict{positive, positive ? 1 : 0};
      break;
    case Stage::Activity:
      v.outcome = sc::stages::ActivityVerdict{positive};
      break;
    case Stage::Text: {
      sc::stages::TextExtraction t;
      if (positive) {
        t.text = "Hello world";
        t.source = sc::stages::TextSource::FormalCaption;
      }
      v.outcome = t;
      break;
    }
    case Stage::Judge:
      v.outcome = sc::stages::JudgeVerdict{positive, std::string("because")};
      break;
  }
  return v;
}

PipelineRecord accepted_record() {
  PipelineRecord r;
  r.candidate = sample_candidate();
  r.state = RecordState::Accepted;
  r.extracted_text = "Hello world";
  for (Stage s : {Stage::Face, Stage::Activity, Stage::Text, Stage::Judge}) {
    r.verdicts.push_back(make_verdict(s, true));
  }
  return r;
}

}  // namespace

TEST_CASE("language registry carries the eight built-ins") {
  const auto reg = sc::corpus::LanguageRegistry::builtin();
  const auto all = reg.all();
  CHECK(all.size() == 8);
  for (const char* code :
       {"ase", "asf", "bfi", "csl", "fsl", "gsg", "ise", "swl"}) {
    const auto found = reg.find(code);
    REQUIRE(found.has_value());
    CHECK(found->iso639_3 == code);
    CHECK_FALSE(found->display_name.empty());
    CHECK_FALSE(found->spoken_language.empty());
  }
  CHECK(reg.find("ase")->spoken_name == "English");
  CHECK(reg.find("gsg")->spoken_name == "German");

  SUBCASE("all() is sorted by code") {
    for (std::size_t i = 1; i < all.size(); ++i) {
      CHECK(all[i - 1].iso639_3 < all[i].iso639_3);
    }
  }
  SUBCASE("require throws ConfigError naming the unknown code") {
    CHECK_FALSE(reg.find("xyz").has_value());
    CHECK_THROWS_WITH_AS(reg.require("xyz"),
                         doctest::Contains("xyz"), sc::ConfigError);
  }
  SUBCASE("add replaces an existing entry") {
    auto copy = reg;
    copy.add({"ase", "Renamed", "en", "English"});
    CHECK(copy.all().size() == 8);
    CHECK(copy.find("ase")->display_name == "Renamed");
    copy.add({"zzz", "New Language", "xx", "Xish"});
    CHECK(copy.all().size() == 9);
    CHECK(copy.all().back().iso639_3 == "zzz");
  }
}

TEST_CASE("enum string round trips") {
  using sc::corpus::SourceKind;
  for (auto k : {SourceKind::HashtagQuery, SourceKind::UserHandle,
                 SourceKind::ManifestFile}) {
    CHECK(sc::corpus::source_kind_from_string(sc::corpus::to_string(k)) == k);
  }
  for (auto s : {RecordState::Ingested, RecordState::FaceChecked,
                 RecordState::ActivityChecked, RecordState::TextExtracted,
                 RecordState::Judged, RecordState::Accepted,
                 RecordState::Rejected}) {
    CHECK(sc::corpus::record_state_from_string(sc::corpus::to_string(s)) == s);
  }
  for (auto r : {RejectionReason::FaceNotVisible, RejectionReason::NotSigning,
                 RejectionReason::NoText, RejectionReason::MisalignedText,
                 RejectionReason::ProcessingError}) {
    CHECK(sc::corpus::rejection_reason_from_string(sc::corpus::to_string(r)) ==
          r);
  }
  CHECK_THROWS_AS(sc::corpus::source_kind_from_string("webcam"),
                  sc::ParseError);
  CHECK_THROWS_AS(sc::corpus::record_state_from_string("limbo"),
                  sc::ParseError);
  CHECK_THROWS_AS(sc::corpus::rejection_reason_from_string("vibes"),
                  sc::ParseError);
}

TEST_CASE("candidate JSON round trip") {
  const auto c = sample_candidate();
  const auto parsed = sc::corpus::candidate_from_json(
      sc::corpus::candidate_to_json(c));
  CHECK(parsed.video_id == c.video_id);
  CHECK(parsed.source.kind == c.source.kind);
  CHECK(parsed.source.value == c.source.value);
  CHECK(parsed.language == c.language);
  CHECK(parsed.duration_s == c.duration_s);
  CHECK(parsed.media_locator == c.media_locator);
  CHECK(parsed.description_text == c.description_text);
  CHECK(parsed.fetched_at == c.fetched_at);

  SUBCASE("absent description stays absent") {
    auto no_desc = c;
    no_desc.description_text.reset();
    const auto back = sc::corpus::candidate_from_json(
        sc::corpus::candidate_to_json(no_desc));
    CHECK_FALSE(back.description_text.has_value());
  }
  SUBCASE("malformed JSON raises ParseError") {
    CHECK_THROWS_AS(sc::corpus::candidate_from_json("{nope"), sc::ParseError);
    CHECK_THROWS_AS(sc::corpus::candidate_from_json("{}"), sc::ParseError);
  }
}

TEST_CASE("record JSON round trip preserves every field") {
  auto r = accepted_record();
  r.verdicts[0].latency_ms = 917;
  r.verdicts[0].cached = true;
  r.verdicts[0].attempts = 2;
  r.note = "resumed once";
  const std::string json = sc::corpus::record_to_json(r);

  SUBCASE("serialization is a single line") {
    CHECK(json.find('\n') == std::string::npos);
  }
  const auto back = sc::corpus::record_from_json(json);
  CHECK(back.candidate.video_id == r.candidate.video_id);
  CHECK(back.state == r.state);
  CHECK(back.extracted_text == r.extracted_text);
  CHECK(back.note == r.note);
  REQUIRE(back.verdicts.size() == 4);
  CHECK(back.verdicts[0].latency_ms == 917);
  CHECK(back.verdicts[0].cached == true);
  CHECK(back.verdicts[0].attempts == 2);
  const auto* face = std::get_if<sc::stages::FaceVerdict>(&back.verdicts[0].outcome);
  REQUIRE(face != nullptr);
  CHECK(face->face_visible);
  CHECK(face->people_count == 1);
  const auto* judge = std::get_if<sc::stages::JudgeVerdict>(&back.verdicts[3].outcome);
  REQUIRE(judge != nullptr);
  CHECK(judge->aligned);
  CHECK(judge->rationale == std::string("because"));

  SUBCASE("rejected and unparseable outcomes round trip") {
    PipelineRecord rej;
    rej.candidate = sample_candidate();
    rej.state = RecordState::Rejected;
    rej.rejection_reason = RejectionReason::ProcessingError;
    StageVerdict v;
    v.stage = Stage::Activity;
    v.model_id = "curator-model";
    v.outcome = sc::stages::UnparseableOutcome{"gibberish twice"};
    rej.verdicts = {make_verdict(Stage::Face, true), v};
    rej.note = "unparseable reply";
    const auto back2 = sc::corpus::record_from_json(sc::corpus::record_to_json(rej));
    CHECK(back2.state == RecordState::Rejected);
    CHECK(back2.rejection_reason == RejectionReason::ProcessingError);
    const auto* u = std::get_if<sc::stages::UnparseableOutcome>(
        &back2.verdicts[1].outcome);
    REQUIRE(u != nullptr);
    CHECK(u->reason == "gibberish twice");
  }
}

TEST_CASE("verdict digest covers semantics and ignores timings") {
  const auto v = make_verdict(Stage::Face, true);
  const auto d = sc::corpus::verdict_digest(v);
  CHECK(d.size() == 64);

  auto timing = v;
  timing.latency_ms = 9999;
  timing.cached = true;
  timing.attempts = 2;
  CHECK(sc::corpus::verdict_digest(timing) == d);

  auto other_model = v;
  other_model.model_id = "different-model";
  CHECK(sc::corpus::verdict_digest(other_model) != d);

  auto other_outcome = v;
  other_outcome.outcome = sc::stages::FaceVerdict{false, 0};
  CHECK(sc::corpus::verdict_digest(other_outcome) != d);

  auto other_raw = v;
  other_raw.raw_response = "{\"scripted\": false}";
  CHECK(sc::corpus::verdict_digest(other_raw) != d);
}

TEST_CASE("record digest ignores notes and timings but sees semantics") {
  const auto r = accepted_record();
  const auto d = sc::corpus::record_digest(r);
  CHECK(d.size() == 64);

  auto noted = r;
  noted.note = "operator remark";
  noted.verdicts[2].latency_ms = 123456;
  noted.verdicts[2].cached = true;
  CHECK(sc::corpus::record_digest(noted) == d);

  auto other_text = r;
  other_text.extracted_text = "Hello world!";
  CHECK(sc::corpus::record_digest(other_text) != d);

  auto other_state = r;
  other_state.state = RecordState::Rejected;
  other_state.rejection_reason = RejectionReason::MisalignedText;
  CHECK(sc::corpus::record_digest(other_state) != d);

  auto other_id = r;
  other_id.candidate.video_id = "vid-002";
  CHECK(sc::corpus::record_digest(other_id) != d);
}

TEST_CASE("validate_record catches each invariant violation") {
  CHECK(sc::corpus::validate_record(accepted_record()) == std::nullopt);

  const auto violation = [](PipelineRecord r) {
    const auto v = sc::corpus::validate_record(r);
    REQUIRE(v.has_value());
    return *v;
  };

  auto no_id = accepted_record();
  no_id.candidate.video_id.clear();
  CHECK(violation(no_id) == "video_id must be nonempty");

  auto neg = accepted_record();
  neg.candidate.duration_s = -1.0;
  CHECK(violation(neg).find("duration_s") != std::string::npos);

  auto no_lang = accepted_record();
  no_lang.candidate.language.clear();
  CHECK(violation(no_lang).find("language") != std::string::npos);

  auto rejected_no_reason = accepted_record();
  rejected_no_reason.state = RecordState::Rejected;
  CHECK(violation(rejected_no_reason).find("rejection_reason") !=
        std::string::npos);

  auto reason_not_rejected = accepted_record();
  reason_not_rejected.rejection_reason = RejectionReason::NoText;
  CHECK(violation(reason_not_rejected).find("not rejected") !=
        std::string::npos);

  auto empty_model = accepted_record();
  empty_model.verdicts[1].model_id.clear();
  CHECK(violation(empty_model).find("model_id") != std::string::npos);

  auto mismatched = accepted_record();
  mismatched.verdicts[0].outcome = sc::stages::ActivityVerdict{true};
  CHECK(violation(mismatched).find("match its stage") != std::string::npos);

  auto out_of_order = accepted_record();
  std::swap(out_of_order.verdicts[0], out_of_order.verdicts[1]);
  CHECK(violation(out_of_order).find("stage order") != std::string::npos);

  auto beyond_rejection = accepted_record();
  beyond_rejection.state = RecordState::Rejected;
  beyond_rejection.rejection_reason = RejectionReason::FaceNotVisible;
  beyond_rejection.extracted_text.reset();
  CHECK(violation(beyond_rejection).find("after the rejection") !=
        std::string::npos);

  auto accepted_no_text = accepted_record();
  accepted_no_text.extracted_text.reset();
  CHECK(violation(accepted_no_text).find("extracted_text") !=
        std::string::npos);

  auto accepted_three = accepted_record();
  accepted_three.verdicts.pop_back();
  CHECK(violation(accepted_three).find("four verdicts") != std::string::npos);

  auto accepted_negative = accepted_record();
  accepted_negative.verdicts[3].outcome = sc::stages::JudgeVerdict{false, {}};
  CHECK(violation(accepted_negative).find("positive outcomes") !=
        std::string::npos);

  SUBCASE("rejection at each stage validates with the right verdict count") {
    const struct {
      RejectionReason reason;
      int verdicts;
    } cases[] = {
        {RejectionReason::FaceNotVisible, 1},
        {RejectionReason::NotSigning, 2},
        {RejectionReason::NoText, 3},
        {RejectionReason::MisalignedText, 4},
    };
    const Stage order[] = {Stage::Face, Stage::Activity, Stage::Text,
                           Stage::Judge};
    for (const auto& c : cases) {
      PipelineRecord r;
      r.candidate = sample_candidate();
      r.state = RecordState::Rejected;
      r.rejection_reason = c.reason;
      for (int i = 0; i < c.verdicts; ++i) {
        r.verdicts.push_back(make_verdict(order[i], i + 1 < c.verdicts));
      }
      CHECK(sc::corpus::validate_record(r) == std::nullopt);
    }
  }
}

TEST_CASE("gold label parsing") {
  const std::string text =
      "{\"video_id\": \"v1\", \"is_valid_pair\": true, "
      "\"gold_translation\": \"The weather is nice\"}\n"
      "\n"
      "{\"video_id\": \"v2\", \"is_valid_pair\": false}\n"
      "{\"video_id\": \"v3\", \"is_valid_pair\": true, "
      "\"gold_translation\": null}\n";
  const auto labels = sc::corpus::parse_gold_labels(text);
  REQUIRE(labels.size() == 3);
  CHECK(labels[0].video_id == "v1");
  CHECK(labels[0].is_valid_pair);
  CHECK(labels[0].gold_translation == std::string("The weather is nice"));
  CHECK_FALSE(labels[1].is_valid_pair);
  CHECK_FALSE(labels[1].gold_translation.has_value());
  CHECK_FALSE(labels[2].gold_translation.has_value());

  SUBCASE("malformed line is named by number") {
    try {
      sc::corpus::parse_gold_labels(
          "{\"video_id\": \"v1\", \"is_valid_pair\": true}\n"
          "{broken\n");
      FAIL("expected ParseError");
    } catch (const sc::ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
  SUBCASE("missing is_valid_pair is a parse failure with the line number") {
    try {
      sc::corpus::parse_gold_labels("{\"video_id\": \"v1\"}\n");
      FAIL("expected ParseError");
    } catch (const sc::ParseError& e) {
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
      CHECK(std::string(e.what()).find("is_valid_pair") != std::string::npos);
    }
  }
  SUBCASE("duplicate ids are rejected") {
    CHECK_THROWS_AS(sc::corpus::parse_gold_labels(
                        "{\"video_id\": \"v1\", \"is_valid_pair\": true}\n"
                        "{\"video_id\": \"v1\", \"is_valid_pair\": false}\n"),
                    sc::ValidationError);
  }
  SUBCASE("blank and CRLF lines are tolerated") {
    const auto crlf = sc::corpus::parse_gold_labels(
        "{\"video_id\": \"v1\", \"is_valid_pair\": true}\r\n  \t\r\n");
    CHECK(crlf.size() == 1);
  }
}
