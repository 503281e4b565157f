#pragma once

#include "signcurator/corpus/language.hpp"
#include "signcurator/gateway/gateway.hpp"
#include "signcurator/stages/templates.hpp"
#include "signcurator/stages/verdicts.hpp"
#include "signcurator/video/frames.hpp"

#include <memory>
#include <string>

namespace signcurator::stages {

using FramesPtr = std::shared_ptr<const video::FrameSequence>;

// Each runner issues one model exchange (plus at most one reprompt when the
// reply cannot be parsed) and returns the full StageVerdict for the audit
// trail. A verdict that still cannot be parsed, a non-retryable request
// failure, or a protocol violation yields an UnparseableOutcome; only a
// gateway outage (GatewayUnavailableError) propagates, so the pipeline can
// checkpoint and halt.

// Curator role: is a face clearly visible?
StageVerdict detect_face(const FramesPtr& frames, gateway::Gateway& gw,
                         const TemplateSet& templates,
                         const corpus::LanguageCode& language);

// Curator role: is the person signing?
StageVerdict detect_sign_activity(const FramesPtr& frames,
                                  gateway::Gateway& gw,
                                  const TemplateSet& templates,
                                  const corpus::LanguageCode& language);

// Curator role: recover caption or on-screen text.
StageVerdict extract_text(const FramesPtr& frames, gateway::Gateway& gw,
                          const TemplateSet& templates,
                          const corpus::LanguageCode& language);

// Judge role: does extracted_text translate the signing? extracted_text
// must be nonempty after trimming; violations raise InputError before any
// request is issued.
StageVerdict judge_alignment(const FramesPtr& frames,
                             const std::string& extracted_text,
                             gateway::Gateway& gw,
                             const TemplateSet& templates,
                             const corpus::LanguageCode& language);

}  // namespace signcurator::stages
