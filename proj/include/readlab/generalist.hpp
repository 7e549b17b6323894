#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "readlab/classifier.hpp"
#include "readlab/corpus.hpp"
#include "readlab/llm_gateway.hpp"

namespace readlab {

// One evaluation run for one developer: what the method predicted, what the
// developer actually said, and which snippets the backend failed on.
// Predictions and truth always carry the same key set; abstained snippets
// appear in neither.
struct GeneralistRun {
    std::string dataset_id;
    std::string developer_id;
    std::string method;
    std::map<std::string, ReadabilityLabel> predictions;
    std::map<std::string, ReadabilityLabel> truth;
    std::vector<std::string> abstentions;
};

inline constexpr const char* kMethodFeatureModel = "feature_model";
inline constexpr const char* kMethodLlmZeroShot = "llm_zero_shot";
inline constexpr const char* kMethodOptimalOracle = "optimal_oracle";

// The developer's own mapped labels, one per rated snippet.
std::map<std::string, ReadabilityLabel> truth_column(const RatingMatrix& matrix,
                                                     const std::string& developer_id);

// Most common mapped label over all developers' ratings of the snippet;
// ties break toward the less readable label.
ReadabilityLabel optimal_generalist_predict(const RatingMatrix& matrix,
                                            const std::string& snippet_id);

GeneralistRun eval_optimal_oracle(const Dataset& dataset, const std::string& developer_id,
                                  bool exclude_target_developer = false);

GeneralistRun eval_feature_generalist(const Dataset& dataset, const std::string& developer_id,
                                      const Hyperparams& hp, std::uint64_t seed);

// Zero-shot LLM protocol. Prompts do not depend on the developer, so routing
// every developer through one Gateway instance makes repeat snippets pure
// cache hits.
GeneralistRun eval_llm_generalist(Gateway& gateway, const Dataset& dataset,
                                  const std::string& developer_id);

// Reference table for the majority-echo stub: source text -> inclusive-mode label.
std::map<std::string, ReadabilityLabel> majority_table(const Dataset& dataset);

}  // namespace readlab
