#include "readlab/personalization.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "readlab/prompts.hpp"
#include "readlab/util.hpp"

namespace readlab {

std::string_view shot_algorithm_word(ShotAlgorithm a) {
    switch (a) {
        case ShotAlgorithm::HV: return "hv";
        case ShotAlgorithm::HVL: return "hvl";
        case ShotAlgorithm::R: return "r";
    }
    return "unknown";
}

ShotAlgorithm shot_algorithm_from_word(std::string_view w) {
    if (w == "hv") return ShotAlgorithm::HV;
    if (w == "hvl") return ShotAlgorithm::HVL;
    if (w == "r") return ShotAlgorithm::R;
    throw DataError("unknown shot selection algorithm: '" + std::string(w) + "'");
}

namespace {

ReadabilityLabel developer_label(const RatingMatrix& matrix, std::size_t snippet, std::size_t dev) {
    auto score = matrix.rating(snippet, dev);
    if (!score) throw DataError("developer has no rating for shot snippet");
    return map_score_to_label(*score);
}

struct Ranked {
    std::size_t snippet;
    double variance;
};

// Others-variance per snippet, ranked by (variance desc, snippet id asc).
std::vector<Ranked> rank_by_others_variance(const RatingMatrix& matrix,
                                            const std::string& developer_id) {
    DatasetView others = remove_developer(matrix, developer_id);
    std::vector<Ranked> ranked;
    ranked.reserve(matrix.snippet_count());
    for (std::size_t s = 0; s < matrix.snippet_count(); ++s) {
        ranked.push_back({s, snippet_score_variance(others, matrix.snippet_ids()[s])});
    }
    std::stable_sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
        if (a.variance != b.variance) return a.variance > b.variance;
        return matrix.snippet_ids()[a.snippet] < matrix.snippet_ids()[b.snippet];
    });
    return ranked;
}

}  // namespace

ShotSet select_shots_hv(const RatingMatrix& matrix, const std::string& developer_id, int k) {
    if (!matrix.dense()) throw DataError("select_shots_hv: matrix must be dense");
    if (matrix.snippet_count() < static_cast<std::size_t>(k)) {
        throw DataError("select_shots_hv: fewer than " + std::to_string(k) + " snippets");
    }
    std::size_t dev = matrix.developer_index(developer_id);
    std::vector<Ranked> ranked = rank_by_others_variance(matrix, developer_id);

    ShotSet set;
    set.algorithm = ShotAlgorithm::HV;
    set.developer_id = developer_id;
    for (int i = 0; i < k; ++i) {
        const Ranked& r = ranked[static_cast<std::size_t>(i)];
        set.shots.push_back({matrix.snippet_ids()[r.snippet],
                             developer_label(matrix, r.snippet, dev), r.variance});
    }
    return set;
}

ShotSet select_shots_hvl(const RatingMatrix& matrix, const std::string& developer_id) {
    if (!matrix.dense()) throw DataError("select_shots_hvl: matrix must be dense");
    std::size_t dev = matrix.developer_index(developer_id);
    if (matrix.snippet_count() == 0) throw DataError("select_shots_hvl: developer column is empty");

    std::vector<Ranked> ranked = rank_by_others_variance(matrix, developer_id);
    ShotSet set;
    set.algorithm = ShotAlgorithm::HVL;
    set.developer_id = developer_id;
    // One shot per label the developer actually used; the ranking is already
    // (variance desc, id asc), so the first hit per label is the winner and the
    // resulting shot order is descending criterion.
    std::array<bool, 3> taken{false, false, false};
    for (const Ranked& r : ranked) {
        ReadabilityLabel label = developer_label(matrix, r.snippet, dev);
        std::size_t li = static_cast<std::size_t>(label);
        if (taken[li]) continue;
        taken[li] = true;
        set.shots.push_back({matrix.snippet_ids()[r.snippet], label, r.variance});
        if (set.shots.size() == 3) break;
    }
    set.label_coverage_incomplete = set.shots.size() < 3;
    return set;
}

ShotSet select_shots_random(const RatingMatrix& matrix, const std::string& developer_id,
                            std::uint64_t seed, int k) {
    if (matrix.snippet_count() < static_cast<std::size_t>(k)) {
        throw DataError("select_shots_random: fewer than " + std::to_string(k) + " snippets");
    }
    std::size_t dev = matrix.developer_index(developer_id);
    std::vector<std::size_t> pool(matrix.snippet_count());
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(seed);

    ShotSet set;
    set.algorithm = ShotAlgorithm::R;
    set.developer_id = developer_id;
    set.seed = seed;
    // partial Fisher-Yates: draw order is the shot order
    for (int i = 0; i < k; ++i) {
        std::size_t remaining = pool.size() - static_cast<std::size_t>(i);
        std::size_t j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng() % remaining);
        std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        std::size_t snippet = pool[static_cast<std::size_t>(i)];
        set.shots.push_back({matrix.snippet_ids()[snippet], developer_label(matrix, snippet, dev), 0.0});
    }
    return set;
}

ShotSet select_shots(const RatingMatrix& matrix, ShotAlgorithm algorithm,
                     const std::string& developer_id, std::uint64_t run_seed, int k) {
    switch (algorithm) {
        case ShotAlgorithm::HV:
            return select_shots_hv(matrix, developer_id, k);
        case ShotAlgorithm::HVL:
            return select_shots_hvl(matrix, developer_id);
        case ShotAlgorithm::R:
            return select_shots_random(matrix, developer_id,
                                       run_seed + matrix.developer_index(developer_id), k);
    }
    throw DataError("select_shots: unknown algorithm");
}

std::string build_personalized_prompt(const Dataset& dataset, const ShotSet& shots,
                                      const Snippet& target) {
    if (shots.shots.empty()) throw DataError("build_personalized_prompt: empty shot set");
    std::vector<PromptShot> rendered;
    for (const Shot& shot : shots.shots) {
        if (shot.snippet_id == target.id) {
            throw DataError("build_personalized_prompt: target '" + target.id +
                            "' collides with a shot snippet");
        }
        rendered.push_back({dataset.snippet(shot.snippet_id).source, shot.label});
    }
    return render_personalized_prompt(rendered, target.source);
}

std::set<std::string> personalized_eval_set(const RatingMatrix& matrix, ShotAlgorithm algorithm,
                                            std::uint64_t run_seed, int k) {
    if (!matrix.dense()) throw DataError("personalized_eval_set: matrix must be dense");
    std::set<std::string> chosen;
    for (const std::string& dev : matrix.developer_ids()) {
        for (const Shot& shot : select_shots(matrix, algorithm, dev, run_seed, k).shots) {
            chosen.insert(shot.snippet_id);
        }
    }
    std::set<std::string> eval_ids;
    for (const std::string& id : matrix.snippet_ids()) {
        if (!chosen.count(id)) eval_ids.insert(id);
    }
    if (eval_ids.empty()) {
        throw DataError("personalized_eval_set: every snippet was chosen as a shot");
    }
    return eval_ids;
}

std::vector<GeneralistRun> eval_personalized(Gateway& gateway, const Dataset& dataset,
                                             ShotAlgorithm algorithm, std::uint64_t run_seed,
                                             int jobs, int k, std::vector<ShotSet>* out_shots) {
    const RatingMatrix& matrix = dataset.matrix;
    std::set<std::string> eval_ids = personalized_eval_set(matrix, algorithm, run_seed, k);

    const std::vector<std::string>& devs = matrix.developer_ids();
    std::vector<GeneralistRun> runs(devs.size());
    std::vector<ShotSet> shot_sets(devs.size());
    parallel_for(jobs, devs.size(), [&](std::size_t i) {
        const std::string& dev = devs[i];
        ShotSet shots = select_shots(matrix, algorithm, dev, run_seed, k);
        GeneralistRun run;
        run.dataset_id = dataset.name;
        run.developer_id = dev;
        run.method = std::string("personalized_") + std::string(shot_algorithm_word(algorithm));
        std::map<std::string, ReadabilityLabel> truth = truth_column(matrix, dev);
        for (const std::string& snippet_id : eval_ids) {
            std::string prompt = build_personalized_prompt(dataset, shots, dataset.snippet(snippet_id));
            std::optional<ReadabilityLabel> label = complete_label(gateway, prompt);
            if (label) {
                run.predictions[snippet_id] = *label;
                run.truth[snippet_id] = truth.at(snippet_id);
            } else {
                run.abstentions.push_back(snippet_id);
            }
        }
        runs[i] = std::move(run);
        shot_sets[i] = std::move(shots);
    });
    if (out_shots) *out_shots = std::move(shot_sets);
    return runs;
}

}  // namespace readlab
