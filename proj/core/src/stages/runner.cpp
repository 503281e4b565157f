#include "signcurator/stages/runner.hpp"

#include "signcurator/error.hpp"
#include "signcurator/stages/parse.hpp"

#include <iostream>
#include <optional>
#include <utility>
#include <vector>

namespace signcurator::stages {

namespace {

constexpr const char* kReprompt =
    "Your previous reply could not be parsed. Reply with exactly one JSON "
    "object and nothing else.";

std::string trimmed(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

void print_warnings(Stage stage, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) {
    std::cerr << "warning: " << to_string(stage) << " stage: " << w << "\n";
  }
}

gateway::Role role_for(Stage stage) {
  return stage == Stage::Judge ? gateway::Role::Judge
                               : gateway::Role::Curator;
}

// One exchange, with a single reprompt when the reply cannot be parsed.
// A reply that still fails to parse, a non-retryable request failure, or a
// protocol violation becomes an UnparseableOutcome so the pipeline can
// reject the video instead of halting.
StageVerdict run_stage(Stage stage, const FramesPtr& frames,
                       gateway::Gateway& gw, const TemplateSet& templates,
                       const corpus::LanguageCode& language,
                       const std::optional<std::string>& caption_context) {
  const PromptTemplate& tpl = templates.for_stage(stage, language.iso639_3);
  const std::string prompt = render_prompt(tpl, language, caption_context);

  StageVerdict verdict;
  verdict.stage = stage;
  verdict.attempts = 0;
  // Until a reply arrives, attribute the verdict to the model addressed.
  verdict.model_id = role_for(stage) == gateway::Role::Judge
                         ? gw.config().judge.model_id
                         : gw.config().curator.model_id;

  std::string active_prompt = prompt;
  std::optional<std::string> parse_failure;
  for (int attempt = 0; attempt < 2; ++attempt) {
    gateway::ModelRequest request;
    request.role = role_for(stage);
    request.prompt_text = active_prompt;
    request.frames = frames;

    gateway::ModelResponse response;
    const auto started = std::chrono::steady_clock::now();
    try {
      response = gw.cached_complete(request);
    } catch (const GatewayUnavailableError&) {
      throw;  // outage: caller checkpoints and halts
    } catch (const Error& e) {
      // RequestError, ProtocolError, InputError: the exchange itself is
      // broken, not the service.
      verdict.attempts += 1;
      verdict.outcome = UnparseableOutcome{e.what()};
      return verdict;
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    verdict.latency_ms +=
        std::chrono::duration_cast<std::chrono::milliseconds>(elapsed)
            .count();
    verdict.attempts += 1;
    verdict.model_id = response.model_id;
    verdict.raw_response = response.text;
    verdict.cached = response.from_cache;

    std::vector<std::string> warnings;
    try {
      verdict.outcome = parse_verdict(response.text, stage, &warnings);
      print_warnings(stage, warnings);
      return verdict;
    } catch (const ResponseFormatError& e) {
      parse_failure = e.what();
      active_prompt = prompt + "\n\n" + kReprompt;
    }
  }
  verdict.outcome = UnparseableOutcome{*parse_failure};
  return verdict;
}

}  // namespace

StageVerdict detect_face(const FramesPtr& frames, gateway::Gateway& gw,
                         const TemplateSet& templates,
                         const corpus::LanguageCode& language) {
  return run_stage(Stage::Face, frames, gw, templates, language,
                   std::nullopt);
}

StageVerdict detect_sign_activity(const FramesPtr& frames,
                                  gateway::Gateway& gw,
                                  const TemplateSet& templates,
                                  const corpus::LanguageCode& language) {
  return run_stage(Stage::Activity, frames, gw, templates, language,
                   std::nullopt);
}

StageVerdict extract_text(const FramesPtr& frames, gateway::Gateway& gw,
                          const TemplateSet& templates,
                          const corpus::LanguageCode& language) {
  return run_stage(Stage::Text, frames, gw, templates, language,
                   std::nullopt);
}

StageVerdict judge_alignment(const FramesPtr& frames,
                             const std::string& extracted_text,
                             gateway::Gateway& gw,
                             const TemplateSet& templates,
                             const corpus::LanguageCode& language) {
  if (trimmed(extracted_text).empty()) {
    throw InputError("judge_alignment requires nonempty extracted text");
  }
  return run_stage(Stage::Judge, frames, gw, templates, language,
                   extracted_text);
}

}  // namespace signcurator::stages
