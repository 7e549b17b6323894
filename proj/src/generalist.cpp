#include "readlab/generalist.hpp"

#include "readlab/prompts.hpp"

namespace readlab {

std::map<std::string, ReadabilityLabel> truth_column(const RatingMatrix& matrix,
                                                     const std::string& developer_id) {
    std::size_t dev = matrix.developer_index(developer_id);
    std::map<std::string, ReadabilityLabel> truth;
    for (std::size_t s = 0; s < matrix.snippet_count(); ++s) {
        if (auto score = matrix.rating(s, dev)) {
            truth[matrix.snippet_ids()[s]] = map_score_to_label(*score);
        }
    }
    return truth;
}

ReadabilityLabel optimal_generalist_predict(const RatingMatrix& matrix,
                                            const std::string& snippet_id) {
    return majority_label(DatasetView(matrix), snippet_id);
}

GeneralistRun eval_optimal_oracle(const Dataset& dataset, const std::string& developer_id,
                                  bool exclude_target_developer) {
    if (!dataset.matrix.dense()) throw DataError("eval_optimal_oracle: matrix must be dense");
    GeneralistRun run;
    run.dataset_id = dataset.name;
    run.developer_id = developer_id;
    run.method = kMethodOptimalOracle;
    run.truth = truth_column(dataset.matrix, developer_id);
    DatasetView view = exclude_target_developer ? remove_developer(dataset.matrix, developer_id)
                                                : DatasetView(dataset.matrix);
    for (const auto& [snippet_id, unused] : run.truth) {
        (void)unused;
        run.predictions[snippet_id] = majority_label(view, snippet_id);
    }
    return run;
}

GeneralistRun eval_feature_generalist(const Dataset& dataset, const std::string& developer_id,
                                      const Hyperparams& hp, std::uint64_t seed) {
    GeneralistRun run;
    run.dataset_id = dataset.name;
    run.developer_id = developer_id;
    run.method = kMethodFeatureModel;
    run.predictions = cross_validate(dataset.matrix, dataset.snippets, developer_id, hp, seed);
    run.truth = truth_column(dataset.matrix, developer_id);
    return run;
}

GeneralistRun eval_llm_generalist(Gateway& gateway, const Dataset& dataset,
                                  const std::string& developer_id) {
    if (!dataset.matrix.dense()) throw DataError("eval_llm_generalist: matrix must be dense");
    GeneralistRun run;
    run.dataset_id = dataset.name;
    run.developer_id = developer_id;
    run.method = kMethodLlmZeroShot;
    std::map<std::string, ReadabilityLabel> truth = truth_column(dataset.matrix, developer_id);
    for (const Snippet& snippet : dataset.snippets) {
        auto t = truth.find(snippet.id);
        if (t == truth.end()) continue;
        std::optional<ReadabilityLabel> label =
            complete_label(gateway, render_generalist_prompt(snippet.source));
        if (label) {
            run.predictions[snippet.id] = *label;
            run.truth[snippet.id] = t->second;
        } else {
            run.abstentions.push_back(snippet.id);
        }
    }
    return run;
}

std::map<std::string, ReadabilityLabel> majority_table(const Dataset& dataset) {
    std::map<std::string, ReadabilityLabel> table;
    for (const Snippet& snippet : dataset.snippets) {
        table[snippet.source] = optimal_generalist_predict(dataset.matrix, snippet.id);
    }
    return table;
}

}  // namespace readlab
