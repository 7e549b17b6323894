#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "readlab/corpus.hpp"

namespace readlab {

// The two chat prompt templates used by every protocol run. Rendering is
// byte-deterministic; the offline stub backends parse these exact shapes back,
// so any change here must keep render and extract in sync.

std::string render_generalist_prompt(const std::string& target_source);

struct PromptShot {
    std::string source;
    ReadabilityLabel label;
};

std::string render_personalized_prompt(const std::vector<PromptShot>& shots,
                                       const std::string& target_source);

// Recovers the target snippet text from either template; nullopt when the text
// does not look like one of our prompts.
std::optional<std::string> extract_prompt_target(const std::string& prompt);

// Recovers the example blocks of a personalized prompt; empty for a
// generalist prompt.
std::vector<PromptShot> extract_prompt_shots(const std::string& prompt);

// Content hash over both fixed templates; goes into run fingerprints so any
// template edit changes every affected artifact.
std::string prompt_schema_hash();

}  // namespace readlab
