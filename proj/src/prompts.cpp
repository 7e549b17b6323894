#include "readlab/prompts.hpp"

#include "readlab/hash.hpp"
#include "readlab/util.hpp"

namespace readlab {

namespace {

constexpr std::string_view kGeneralistHead =
    "You are an expert code readability labeler.\n"
    "Your role is to assign a code readability label. The labels you can assign are: "
    "Unreadable, Neutral, and Readable.\n"
    "\n"
    "Now, assign the code readability label for the following snippet:\n";

constexpr std::string_view kPersonalizedHead =
    "You are an expert and personal code readability labeler.\n"
    "Your role is to assign a code readability label based on the already known preferences "
    "of the developer. The labels you can assign are: Unreadable, Neutral, and Readable.\n"
    "\n"
    "Below you find examples of the already known developer preferences.\n"
    "\n";

constexpr std::string_view kPersonalizedTargetMarker =
    "Now, assign the developer code readability label for the following one:\n";

}  // namespace

std::string render_generalist_prompt(const std::string& target_source) {
    std::string prompt(kGeneralistHead);
    prompt += target_source;
    prompt += ".";
    return prompt;
}

std::string render_personalized_prompt(const std::vector<PromptShot>& shots,
                                       const std::string& target_source) {
    std::string prompt(kPersonalizedHead);
    for (const PromptShot& shot : shots) {
        prompt += shot.source;
        prompt += "\nLabel: ";
        prompt += label_word(shot.label);
        prompt += "\n\n";
    }
    prompt += kPersonalizedTargetMarker;
    prompt += target_source;
    prompt += ".";
    return prompt;
}

std::optional<std::string> extract_prompt_target(const std::string& prompt) {
    std::size_t start = std::string::npos;
    if (prompt.rfind(kGeneralistHead, 0) == 0) {
        start = kGeneralistHead.size();
    } else {
        std::size_t marker = prompt.rfind(kPersonalizedTargetMarker);
        if (marker != std::string::npos) start = marker + kPersonalizedTargetMarker.size();
    }
    if (start == std::string::npos || start >= prompt.size()) return std::nullopt;
    std::size_t end = prompt.size();
    if (prompt.back() == '.') --end;  // the template's trailing period
    return prompt.substr(start, end - start);
}

std::string prompt_schema_hash() {
    std::string all(kGeneralistHead);
    all += "\x1f";
    all += kPersonalizedHead;
    all += "\x1f";
    all += kPersonalizedTargetMarker;
    return content_hash(all);
}

std::vector<PromptShot> extract_prompt_shots(const std::string& prompt) {
    std::vector<PromptShot> shots;
    if (prompt.rfind(kPersonalizedHead, 0) != 0) return shots;
    std::size_t marker = prompt.rfind(kPersonalizedTargetMarker);
    if (marker == std::string::npos) return shots;

    std::string region = prompt.substr(kPersonalizedHead.size(), marker - kPersonalizedHead.size());
    std::string current;
    for (const std::string& line : split(region, '\n')) {
        if (line.rfind("Label: ", 0) == 0) {
            std::string_view word = trim(std::string_view(line).substr(7));
            PromptShot shot;
            // drop the newline joining the source to its label line
            if (!current.empty() && current.back() == '\n') current.pop_back();
            shot.source = current;
            shot.label = label_from_word(word);
            shots.push_back(std::move(shot));
            current.clear();
        } else if (!(current.empty() && line.empty())) {
            current += line;
            current += "\n";
        }
    }
    return shots;
}

}  // namespace readlab
