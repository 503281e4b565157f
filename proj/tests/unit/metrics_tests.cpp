#include "signcurator/error.hpp"
#include "signcurator/metrics/agreement.hpp"
#include "signcurator/metrics/confusion.hpp"
#include "signcurator/metrics/stats.hpp"
#include "signcurator/metrics/text_metrics.hpp"

#include "../support/metric_oracles.hpp"
#include "../support/table1.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace sc = signcurator;
using sc::metrics::ConfusionMatrix;
using Tokens = std::vector<std::string>;

TEST_CASE("confusion matrix counts quadrants against gold") {
  std::vector<sc::corpus::GoldLabel> gold = {
      {"g1", true, {}}, {"g2", true, {}}, {"g3", false, {}}, {"g4", false, {}},
  };
  std::map<std::string, bool> predictions = {
      {"g1", true},   // tp
      {"g2", false},  // fn
      {"g3", true},   // fp
      {"g4", false},  // tn
      {"g9", true},   // not in gold: ignored
  };
  const auto cm = sc::metrics::confusion_matrix(predictions, gold);
  CHECK(cm.tp == 1);
  CHECK(cm.fp == 1);
  CHECK(cm.fn == 1);
  CHECK(cm.tn == 1);
  CHECK(cm.total() == 4);

  SUBCASE("empty gold yields an all-zero matrix") {
    const auto empty = sc::metrics::confusion_matrix(predictions, {});
    CHECK(empty.total() == 0);
  }
  SUBCASE("uncovered gold ids are a coverage failure, listed sorted") {
    predictions.erase("g3");
    predictions.erase("g1");
    CHECK_THROWS_WITH_AS(sc::metrics::confusion_matrix(predictions, gold),
                         "no prediction for 2 gold id(s): g1, g3",
                         sc::CoverageError);
  }
}

TEST_CASE("classification metrics on pinned matrices") {
  // 152-video evaluation, first language: accuracy .82, precision .91,
  // recall .79 at two decimals.
  const auto asl = sc::metrics::classification_metrics({75, 7, 20, 50});
  REQUIRE(asl.accuracy.has_value());
  REQUIRE(asl.precision.has_value());
  REQUIRE(asl.recall.has_value());
  CHECK(*asl.accuracy == doctest::Approx(125.0 / 152.0));
  CHECK(*asl.precision == doctest::Approx(75.0 / 82.0));
  CHECK(*asl.recall == doctest::Approx(75.0 / 95.0));
  CHECK(std::llround(*asl.accuracy * 100.0) == 82);
  CHECK(std::llround(*asl.precision * 100.0) == 91);
  CHECK(std::llround(*asl.recall * 100.0) == 79);

  // Second language: accuracy .75, precision .72, recall .87.
  const auto dgs = sc::metrics::classification_metrics({71, 27, 11, 43});
  CHECK(*dgs.accuracy == doctest::Approx(114.0 / 152.0));
  CHECK(*dgs.precision == doctest::Approx(71.0 / 98.0));
  CHECK(*dgs.recall == doctest::Approx(71.0 / 82.0));
  CHECK(std::llround(*dgs.accuracy * 100.0) == 75);
  CHECK(std::llround(*dgs.precision * 100.0) == 72);
  CHECK(std::llround(*dgs.recall * 100.0) == 87);

  const auto perfect = sc::metrics::classification_metrics({10, 0, 0, 10});
  CHECK(*perfect.accuracy == 1.0);
  CHECK(*perfect.precision == 1.0);
  CHECK(*perfect.recall == 1.0);

  const auto coin = sc::metrics::classification_metrics({1, 1, 1, 1});
  CHECK(*coin.accuracy == 0.5);
  CHECK(*coin.precision == 0.5);
  CHECK(*coin.recall == 0.5);

  SUBCASE("zero denominators are undefined, not zero") {
    const auto no_accepts = sc::metrics::classification_metrics({0, 0, 5, 5});
    CHECK(*no_accepts.accuracy == 0.5);
    CHECK(!no_accepts.precision.has_value());
    REQUIRE(no_accepts.recall.has_value());
    CHECK(*no_accepts.recall == 0.0);

    const auto no_valid = sc::metrics::classification_metrics({0, 5, 0, 5});
    REQUIRE(no_valid.precision.has_value());
    CHECK(*no_valid.precision == 0.0);
    CHECK(!no_valid.recall.has_value());
  }
  SUBCASE("degenerate matrices are input errors") {
    CHECK_THROWS_WITH_AS(sc::metrics::classification_metrics({0, 0, 0, 0}),
                         "empty confusion matrix: every metric is undefined",
                         sc::InputError);
    CHECK_THROWS_AS(sc::metrics::classification_metrics({-1, 1, 1, 1}),
                    sc::InputError);
  }
}

TEST_CASE("classification metrics agree with direct formulas") {
  std::mt19937 rng(20260815);
  std::uniform_int_distribution<std::int64_t> count(0, 1000);
  for (int trial = 0; trial < 200; ++trial) {
    ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
    if (cm.total() == 0) {
      continue;
    }
    CAPTURE(cm.tp);
    CAPTURE(cm.fp);
    CAPTURE(cm.fn);
    CAPTURE(cm.tn);
    const auto report = sc::metrics::classification_metrics(cm);
    CHECK(*report.accuracy ==
          static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()));
    CHECK(report.precision.has_value() == (cm.tp + cm.fp > 0));
    if (report.precision) {
      CHECK(*report.precision == static_cast<double>(cm.tp) /
                                     static_cast<double>(cm.tp + cm.fp));
    }
    CHECK(report.recall.has_value() == (cm.tp + cm.fn > 0));
    if (report.recall) {
      CHECK(*report.recall == static_cast<double>(cm.tp) /
                                  static_cast<double>(cm.tp + cm.fn));
    }
  }
}

TEST_CASE("confusion matrix agrees with a naive recount") {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<sc::corpus::GoldLabel> gold;
    std::map<std::string, bool> predictions;
    std::int64_t want[4] = {};
    const int n = 1 + trial * 40;
    for (int i = 0; i < n; ++i) {
      const std::string id = "v" + std::to_string(i);
      const bool valid = coin(rng) == 1;
      const bool accepted = coin(rng) == 1;
      gold.push_back({id, valid, {}});
      predictions[id] = accepted;
      if (accepted && valid) ++want[0];
      if (accepted && !valid) ++want[1];
      if (!accepted && valid) ++want[2];
      if (!accepted && !valid) ++want[3];
    }
    const auto cm = sc::metrics::confusion_matrix(predictions, gold);
    CHECK(cm.tp == want[0]);
    CHECK(cm.fp == want[1]);
    CHECK(cm.fn == want[2]);
    CHECK(cm.tn == want[3]);
  }
}

namespace {

sc::corpus::PipelineRecord terminal_record(
    const std::string& id, sc::corpus::RecordState state,
    std::optional<sc::corpus::RejectionReason> reason = {}) {
  sc::corpus::PipelineRecord r;
  r.candidate.video_id = id;
  r.state = state;
  r.rejection_reason = reason;
  return r;
}

}  // namespace

TEST_CASE("predictions derive from terminal pipeline records") {
  using sc::corpus::RecordState;
  using sc::corpus::RejectionReason;
  std::vector<sc::corpus::PipelineRecord> records = {
      terminal_record("a", RecordState::Accepted),
      terminal_record("b", RecordState::Rejected, RejectionReason::NotSigning),
      terminal_record("c", RecordState::Rejected,
                      RejectionReason::ProcessingError),
  };

  const auto predictions = sc::metrics::predictions_from_records(records);
  CHECK(predictions.size() == 2);
  CHECK(predictions.at("a") == true);
  CHECK(predictions.at("b") == false);
  CHECK(predictions.count("c") == 0);  // pipeline failure, not a judgment

  SUBCASE("processing errors can be counted as rejections on request") {
    const auto strict = sc::metrics::predictions_from_records(records, {true});
    CHECK(strict.size() == 3);
    CHECK(strict.at("c") == false);
  }
  SUBCASE("processing-error ids are reported sorted and deduplicated") {
    records.push_back(terminal_record("z", RecordState::Rejected,
                                      RejectionReason::ProcessingError));
    records.push_back(terminal_record("c", RecordState::Rejected,
                                      RejectionReason::ProcessingError));
    const auto ids = sc::metrics::processing_error_ids(records);
    CHECK(ids == std::vector<std::string>{"c", "z"});
  }
  SUBCASE("non-terminal records are rejected") {
    records.push_back(terminal_record("d", RecordState::TextExtracted));
    CHECK_THROWS_WITH_AS(sc::metrics::predictions_from_records(records),
                         doctest::Contains("not terminal"),
                         sc::ValidationError);
  }
  SUBCASE("duplicate ids keep the first record") {
    records.push_back(terminal_record("a", RecordState::Rejected,
                                      RejectionReason::NotSigning));
    const auto first_wins = sc::metrics::predictions_from_records(records);
    CHECK(first_wins.at("a") == true);
  }
}

TEST_CASE("13a tokenization fixtures") {
  using sc::metrics::tokenize_13a;
  CHECK(tokenize_13a("Hello, world!") == Tokens{"Hello", ",", "world", "!"});
  CHECK(tokenize_13a("3.5") == Tokens{"3.5"});
  CHECK(tokenize_13a("5.") == Tokens{"5."});
  CHECK(tokenize_13a(".5") == Tokens{".5"});
  CHECK(tokenize_13a("1,000") == Tokens{"1,000"});
  CHECK(tokenize_13a("a.b") == Tokens{"a", ".", "b"});
  CHECK(tokenize_13a("end.") == Tokens{"end", "."});
  CHECK(tokenize_13a("e.g.") == Tokens{"e", ".", "g", "."});
  CHECK(tokenize_13a("&amp;") == Tokens{"&"});
  CHECK(tokenize_13a("&quot;hi&quot;") == Tokens{"\"", "hi", "\""});
  CHECK(tokenize_13a("a &lt; b &gt; c") == Tokens{"a", "<", "b", ">", "c"});
  CHECK(tokenize_13a("a-\nb") == Tokens{"ab"});
  CHECK(tokenize_13a("a\nb") == Tokens{"a", "b"});
  CHECK(tokenize_13a("a(b)c") == Tokens{"a", "(", "b", ")", "c"});
  CHECK(tokenize_13a("don't") == Tokens{"don't"});
  CHECK(tokenize_13a("well-known") == Tokens{"well-known"});
  CHECK(tokenize_13a("") == Tokens{});
  CHECK(tokenize_13a("   ") == Tokens{});
  CHECK(tokenize_13a("  two   spaces  ") == Tokens{"two", "spaces"});
}

TEST_CASE("13a reduces to whitespace splitting on plain words") {
  std::mt19937 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const std::string segment = testsupport::oracle::random_segment(rng, 12);
    CHECK(sc::metrics::tokenize_13a(segment) ==
          testsupport::oracle::split_ws(segment));
  }
}

TEST_CASE("brevity penalty") {
  using sc::metrics::brevity_penalty;
  CHECK(brevity_penalty(0, 5) == 0.0);
  CHECK(brevity_penalty(5, 5) == 1.0);
  CHECK(brevity_penalty(10, 5) == 1.0);
  CHECK(brevity_penalty(5, 10) == doctest::Approx(std::exp(-1.0)));
  CHECK(brevity_penalty(9, 10) == doctest::Approx(std::exp(1.0 - 10.0 / 9.0)));

  SUBCASE("never decreases as the hypothesis grows") {
    double previous = 0.0;
    for (std::int64_t hyp_len = 0; hyp_len <= 40; ++hyp_len) {
      const double bp = brevity_penalty(hyp_len, 20);
      CHECK(bp >= previous);
      CHECK(bp <= 1.0);
      previous = bp;
    }
  }
}

TEST_CASE("corpus BLEU fixtures") {
  using sc::metrics::bleu_corpus;

  SUBCASE("identity scores 100") {
    const std::vector<std::string> text = {"the cat sat on the mat",
                                           "a signing hand moves quickly"};
    const auto score = bleu_corpus(text, text);
    CHECK(score.value == 100.0);
    CHECK(score.n == 2);
    CHECK(score.signature == sc::metrics::kBleuSignature);
    CHECK(sc::metrics::to_string(score.metric) == "bleu");
  }
  SUBCASE("hand-worked precision ladder") {
    // hyp 5 tokens, ref 6: p1 = 1, p2 = 3/4, p3 = 2/3, p4 = 1/2, BP = e^-.2
    const auto score = bleu_corpus({"a b c d e"}, {"a b c d x e"});
    const double expected =
        100.0 * std::exp(1.0 - 6.0 / 5.0) *
        std::exp((std::log(0.75) + std::log(2.0 / 3.0) + std::log(0.5)) / 4.0);
    CHECK(score.value == doctest::Approx(expected));
    CHECK(score.value == doctest::Approx(57.8930067).epsilon(1e-6));
  }
  SUBCASE("zero-match orders smooth instead of zeroing") {
    // p1 = 2/4; orders 2..4 have no matches: 1/(2*3), 1/(4*2), 1/(8*1)
    const auto score = bleu_corpus({"a x c y"}, {"a b c d"});
    const double expected =
        100.0 * std::exp((std::log(0.5) + std::log(1.0 / 6.0) +
                          std::log(0.125) + std::log(0.125)) /
                         4.0);
    CHECK(score.value == doctest::Approx(expected));
    CHECK(score.value == doctest::Approx(18.9958912).epsilon(1e-6));
  }
  SUBCASE("an empty hypothesis side scores zero") {
    const auto score = bleu_corpus({""}, {"a b c d"});
    CHECK(score.value == 0.0);
    CHECK(score.n == 1);
    CHECK(score.signature == sc::metrics::kBleuSignature);
  }
  SUBCASE("a corpus with no 4-grams scores zero even on identity") {
    CHECK(bleu_corpus({"a b c"}, {"a b c"}).value == 0.0);
  }
  SUBCASE("segment order does not matter") {
    const std::vector<std::string> hyps = {"a b c d", "sign hand face talk",
                                           "one two red blue"};
    const std::vector<std::string> refs = {"a b c e", "sign hand talk face",
                                           "one two red blue"};
    const std::vector<std::string> hyps_rev(hyps.rbegin(), hyps.rend());
    const std::vector<std::string> refs_rev(refs.rbegin(), refs.rend());
    CHECK(bleu_corpus(hyps, refs).value ==
          bleu_corpus(hyps_rev, refs_rev).value);
  }
  SUBCASE("shape violations are input errors") {
    CHECK_THROWS_WITH_AS(bleu_corpus({"a"}, {}),
                         "hypothesis/reference counts differ: 1 vs 0",
                         sc::InputError);
    CHECK_THROWS_WITH_AS(bleu_corpus({}, {}),
                         "corpus metrics require at least one segment",
                         sc::InputError);
  }
}

TEST_CASE("corpus chrF fixtures") {
  using sc::metrics::chrf_corpus;

  SUBCASE("identity scores 100") {
    const std::vector<std::string> text = {"signing", "weather"};
    const auto score = chrf_corpus(text, text);
    CHECK(score.value == 100.0);
    CHECK(score.signature == sc::metrics::kChrfSignature);
    CHECK(score.n == 2);
    CHECK(sc::metrics::to_string(score.metric) == "chrf");
  }
  SUBCASE("disjoint strings score 0") {
    CHECK(chrf_corpus({"abc"}, {"xyz"}).value == 0.0);
  }
  SUBCASE("hand-worked near miss") {
    // "cat" vs "cats": orders 1..3 match fully from the hypothesis side,
    // order 4 exists only in the reference and drags the mean down.
    const auto score = chrf_corpus({"cat"}, {"cats"});
    const double expected =
        100.0 * (3.75 / 4.75 + (10.0 / 14.0) + 2.5 / 4.5 + 0.0) / 4.0;
    CHECK(score.value == doctest::Approx(expected));
    CHECK(score.value == doctest::Approx(51.4828738).epsilon(1e-6));
  }
  SUBCASE("one-sided orders count as effective zeros") {
    const auto score = chrf_corpus({"abc"}, {"abcdef"});
    const double expected =
        100.0 * (2.5 / 4.5 + 2.0 / 4.4 + 1.25 / 4.25) / 6.0;
    CHECK(score.value == doctest::Approx(expected));
  }
  SUBCASE("whitespace is invisible to chrF") {
    CHECK(chrf_corpus({"a b c"}, {"abc"}).value == 100.0);
  }
  SUBCASE("segment order does not matter") {
    const std::vector<std::string> hyps = {"signing hands", "cats", "dog"};
    const std::vector<std::string> refs = {"signed hand", "cat", "dogs"};
    const std::vector<std::string> hyps_rev(hyps.rbegin(), hyps.rend());
    const std::vector<std::string> refs_rev(refs.rbegin(), refs.rend());
    CHECK(chrf_corpus(hyps, refs).value ==
          chrf_corpus(hyps_rev, refs_rev).value);
  }
  SUBCASE("an all-empty corpus scores zero") {
    CHECK(chrf_corpus({""}, {""}).value == 0.0);
  }
  SUBCASE("shape violations are input errors") {
    CHECK_THROWS_AS(chrf_corpus({"a", "b"}, {"a"}), sc::InputError);
    CHECK_THROWS_AS(chrf_corpus({}, {}), sc::InputError);
  }
}

TEST_CASE("corpus metrics agree with direct-formula oracles") {
  std::mt19937 rng(20260814);
  for (int trial = 0; trial < 30; ++trial) {
    CAPTURE(trial);
    const auto corpus = testsupport::oracle::random_corpus(rng);
    const double bleu = sc::metrics::bleu_corpus(corpus.hyps, corpus.refs).value;
    const double chrf = sc::metrics::chrf_corpus(corpus.hyps, corpus.refs).value;
    CHECK(bleu ==
          doctest::Approx(testsupport::oracle::naive_bleu(corpus.hyps,
                                                          corpus.refs))
              .epsilon(1e-9));
    CHECK(chrf ==
          doctest::Approx(testsupport::oracle::naive_chrf(corpus.hyps,
                                                          corpus.refs))
              .epsilon(1e-9));
    CHECK(bleu >= 0.0);
    CHECK(bleu <= 100.0);
    CHECK(chrf >= 0.0);
    CHECK(chrf <= 100.0);
  }
}

TEST_CASE("agreement report scores extracted captions against gold") {
  std::map<std::string, sc::stages::TextExtraction> extractions;
  std::map<std::string, std::string> gold;
  for (int i = 1; i <= 75; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "g-%03d", i);
    const std::string text = std::string("sign video pair ") + id;
    gold[id] = text;
    if (i <= 65) {
      extractions[id] = {text, sc::stages::TextSource::FormalCaption};
    } else if (i <= 70) {
      // stage ran, found nothing
      extractions[id] = {std::nullopt, sc::stages::TextSource::None};
    } else if (i <= 72) {
      extractions[id] = {std::string(), sc::stages::TextSource::EmbeddedText};
    }
    // 73..75 never reached the extraction stage at all
  }

  const auto report = sc::metrics::agreement_report(extractions, gold);
  CHECK(report.n_scored == 65);
  CHECK(report.n_excluded == 10);
  CHECK(report.bleu.value == 100.0);
  CHECK(report.chrf.value == 100.0);
  CHECK(report.bleu.n == 65);
  CHECK(report.chrf.n == 65);
  CHECK(report.bleu.signature == sc::metrics::kBleuSignature);
  CHECK(report.chrf.signature == sc::metrics::kChrfSignature);
  CHECK(!report.external.has_value());

  SUBCASE("imperfect extractions score below identity") {
    extractions["g-001"] = {std::string("sign video pair mangled"),
                            sc::stages::TextSource::FormalCaption};
    const auto worse = sc::metrics::agreement_report(extractions, gold);
    CHECK(worse.bleu.value < 100.0);
    CHECK(worse.bleu.value > 0.0);
    CHECK(worse.chrf.value < 100.0);
  }
  SUBCASE("no scorable pairs is an empty-report failure") {
    std::map<std::string, sc::stages::TextExtraction> none;
    for (const auto& [id, reference] : gold) {
      none[id] = {std::nullopt, sc::stages::TextSource::None};
    }
    CHECK_THROWS_WITH_AS(
        sc::metrics::agreement_report(none, gold),
        "no scorable pairs: every extraction was empty or missing",
        sc::EmptyReportError);
  }
  SUBCASE("empty gold is an input error") {
    CHECK_THROWS_WITH_AS(sc::metrics::agreement_report(extractions, {}),
                         "agreement report requires at least one gold pair",
                         sc::InputError);
  }
}

TEST_CASE("external scorer protocol") {
  httplib::Server server;
  std::mutex seen_mutex;
  std::string seen_body;
  std::string seen_auth;
  std::atomic<int> hits{0};

  server.Post("/api/score", [&](const httplib::Request& req,
                                httplib::Response& res) {
    ++hits;
    {
      std::lock_guard<std::mutex> lock(seen_mutex);
      seen_body = req.body;
      seen_auth = req.get_header_value("Authorization");
    }
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json scores = nlohmann::json::array();
    double value = 80.0;
    for (std::size_t i = 0; i < body.at("pairs").size(); ++i) {
      scores.push_back(value);
      value += 10.0;
    }
    res.set_content(nlohmann::json{{"scores", scores}}.dump(),
                    "application/json");
  });
  server.Post("/short/score",
              [](const httplib::Request&, httplib::Response& res) {
                res.set_content(R"({"scores": [1.0]})", "application/json");
              });
  server.Post("/malformed/score",
              [](const httplib::Request&, httplib::Response& res) {
                res.set_content("scores: what scores?", "text/plain");
              });
  server.Post("/broken/score",
              [](const httplib::Request&, httplib::Response& res) {
                res.status = 500;
                res.set_content("upstream sadness", "text/plain");
              });

  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread server_thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  const std::string host = "http://127.0.0.1:" + std::to_string(port);
  sc::metrics::ExternalScorerConfig scorer;
  scorer.base_url = host + "/api";
  scorer.timeout_s = 5.0;

  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"the signed caption", "the gold caption"},
      {"another pair", "another reference"},
  };

  SUBCASE("scores come back in request order") {
    const auto scores = sc::metrics::score_external(pairs, scorer);
    REQUIRE(scores.size() == 2);
    CHECK(scores[0] == 80.0);
    CHECK(scores[1] == 90.0);
    std::lock_guard<std::mutex> lock(seen_mutex);
    const auto sent = nlohmann::json::parse(seen_body);
    REQUIRE(sent.at("pairs").size() == 2);
    CHECK(sent["pairs"][0]["hypothesis"] == "the signed caption");
    CHECK(sent["pairs"][0]["reference"] == "the gold caption");
    CHECK(sent["pairs"][1]["hypothesis"] == "another pair");
    CHECK(seen_auth.empty());
  }
  SUBCASE("bearer token is read from the named env var") {
    setenv("SIGNCURATOR_SCORER_KEY", "sk-scorer-9", 1);
    auto authed = scorer;
    authed.api_key_ref = "SIGNCURATOR_SCORER_KEY";
    sc::metrics::score_external(pairs, authed);
    unsetenv("SIGNCURATOR_SCORER_KEY");
    std::lock_guard<std::mutex> lock(seen_mutex);
    CHECK(seen_auth == "Bearer sk-scorer-9");
  }
  SUBCASE("empty pair list never dials out") {
    CHECK(sc::metrics::score_external({}, scorer).empty());
    CHECK(hits.load() == 0);
  }
  SUBCASE("a count mismatch is a feature outage") {
    auto bad = scorer;
    bad.base_url = host + "/short";
    CHECK_THROWS_WITH_AS(sc::metrics::score_external(pairs, bad),
                         doctest::Contains("1 scores for 2 pairs"),
                         sc::FeatureUnavailableError);
  }
  SUBCASE("an off-contract reply is a feature outage") {
    auto bad = scorer;
    bad.base_url = host + "/malformed";
    CHECK_THROWS_WITH_AS(sc::metrics::score_external(pairs, bad),
                         doctest::Contains("scores array"),
                         sc::FeatureUnavailableError);
  }
  SUBCASE("a non-2xx status is a feature outage") {
    auto bad = scorer;
    bad.base_url = host + "/broken";
    CHECK_THROWS_WITH_AS(sc::metrics::score_external(pairs, bad),
                         doctest::Contains("status 500"),
                         sc::FeatureUnavailableError);
  }
  SUBCASE("an unconfigured or unparseable scorer is a feature outage") {
    CHECK_THROWS_AS(sc::metrics::score_external(pairs, {}),
                    sc::FeatureUnavailableError);
    sc::metrics::ExternalScorerConfig nonsense;
    nonsense.base_url = "not a url";
    CHECK_THROWS_WITH_AS(sc::metrics::score_external(pairs, nonsense),
                         doctest::Contains("external scorer URL"),
                         sc::FeatureUnavailableError);
  }
  SUBCASE("agreement report averages the external column") {
    std::map<std::string, sc::stages::TextExtraction> extractions = {
        {"v1", {std::string("sign talk one two"),
                sc::stages::TextSource::FormalCaption}},
        {"v2", {std::string("red blue sun rain"),
                sc::stages::TextSource::FormalCaption}},
    };
    const std::map<std::string, std::string> gold = {
        {"v1", "sign talk one two"}, {"v2", "red blue sun rain"}};
    const auto report =
        sc::metrics::agreement_report(extractions, gold, &scorer);
    REQUIRE(report.external.has_value());
    CHECK(report.external->value == 85.0);  // mean of 80 and 90
    CHECK(report.external->n == 2);
    CHECK(report.external->signature == "External|url:" + scorer.base_url);
    CHECK(sc::metrics::to_string(report.external->metric) == "external");
  }
  SUBCASE("agreement report omits the column when the scorer is down") {
    std::map<std::string, sc::stages::TextExtraction> extractions = {
        {"v1", {std::string("sign talk one two"),
                sc::stages::TextSource::FormalCaption}},
    };
    const std::map<std::string, std::string> gold = {{"v1",
                                                      "sign talk one two"}};
    sc::metrics::ExternalScorerConfig dead;
    dead.base_url = "http://127.0.0.1:1";
    dead.timeout_s = 2.0;
    const auto report =
        sc::metrics::agreement_report(extractions, gold, &dead);
    CHECK(!report.external.has_value());
    CHECK(report.bleu.value == 100.0);  // local metrics unaffected
  }

  server.stop();
  server_thread.join();
}

TEST_CASE("dataset stats aggregate the manifest per language") {
  SUBCASE("empty manifest") {
    const auto stats = sc::metrics::dataset_stats({});
    CHECK(stats.rows.empty());
    CHECK(stats.total_videos == 0);
    CHECK(stats.total_hours == 0.0);
    CHECK(sc::metrics::render_stats_table(stats) == "Total 0 0\n");
  }
  SUBCASE("single record") {
    sc::corpus::DatasetManifest m;
    sc::corpus::ManifestRecord rec;
    rec.video_id = "gsg-0001";
    rec.language = "gsg";
    rec.duration_s = 3600.0;
    rec.extracted_text = "caption";
    m.records.push_back(rec);
    const auto stats = sc::metrics::dataset_stats(m);
    REQUIRE(stats.rows.size() == 1);
    CHECK(stats.rows[0].language == "gsg");
    CHECK(stats.rows[0].videos == 1);
    CHECK(stats.rows[0].hours == doctest::Approx(1.0));
    CHECK(sc::metrics::render_stats_table(stats) == "gsg 1 1\nTotal 1 1\n");
  }
  SUBCASE("published corpus shape") {
    const auto manifest = testsupport::make_table1_manifest();
    const auto stats = sc::metrics::dataset_stats(manifest);
    const auto& rows = testsupport::table1_rows();
    REQUIRE(stats.rows.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CAPTURE(rows[i].language);
      CHECK(stats.rows[i].language == rows[i].language);
      CHECK(stats.rows[i].videos == rows[i].videos);
      CHECK(stats.rows[i].hours ==
            doctest::Approx(static_cast<double>(rows[i].hours)));
    }
    CHECK(stats.total_videos == 4800);
    CHECK(stats.total_hours == doctest::Approx(49.0));

    const std::string table = sc::metrics::render_stats_table(stats);
    CHECK(table.rfind("ase 816 8\n", 0) == 0);
    CHECK(table.find("bfi 1201 15\n") != std::string::npos);
    CHECK(table.find("csl 218 2\n") != std::string::npos);
    const std::string footer = "Total 4800 49\n";
    REQUIRE(table.size() >= footer.size());
    CHECK(table.substr(table.size() - footer.size()) == footer);
  }
}
