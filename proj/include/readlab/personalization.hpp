#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "readlab/corpus.hpp"
#include "readlab/generalist.hpp"
#include "readlab/llm_gateway.hpp"

namespace readlab {

enum class ShotAlgorithm {
    HV,   // k snippets with the highest score variance among the other developers
    HVL,  // per-label highest-variance snippet; needs d's full column (not realistic)
    R,    // k snippets drawn uniformly without replacement
};

std::string_view shot_algorithm_word(ShotAlgorithm a);
ShotAlgorithm shot_algorithm_from_word(std::string_view w);

// HVL reads the developer's full rating column, which no deployment has.
constexpr bool is_realistic(ShotAlgorithm a) { return a != ShotAlgorithm::HVL; }

struct Shot {
    std::string snippet_id;
    ReadabilityLabel label;    // always the developer's own mapped rating
    double criterion = 0.0;    // others-variance for HV/HVL, 0 for R
};

struct ShotSet {
    ShotAlgorithm algorithm = ShotAlgorithm::HV;
    std::string developer_id;
    std::vector<Shot> shots;  // HV/HVL: descending criterion, ties by id; R: draw order
    std::optional<std::uint64_t> seed;  // R only
    // HVL only: the developer never used some label, so the set is short.
    bool label_coverage_incomplete = false;
};

ShotSet select_shots_hv(const RatingMatrix& matrix, const std::string& developer_id, int k = 3);
ShotSet select_shots_hvl(const RatingMatrix& matrix, const std::string& developer_id);
ShotSet select_shots_random(const RatingMatrix& matrix, const std::string& developer_id,
                            std::uint64_t seed, int k = 3);

// Dispatch used by run orchestration; for R the developer's sub-seed is
// run_seed + developer index so a single run seed pins every selection.
ShotSet select_shots(const RatingMatrix& matrix, ShotAlgorithm algorithm,
                     const std::string& developer_id, std::uint64_t run_seed, int k = 3);

// Renders the personalized prompt for the target. The target must not be one
// of the shots.
std::string build_personalized_prompt(const Dataset& dataset, const ShotSet& shots,
                                      const Snippet& target);

// Snippets never chosen as a shot by the algorithm for any developer; the only
// legal test set for the personalized protocol. Throws DataError when empty.
std::set<std::string> personalized_eval_set(const RatingMatrix& matrix, ShotAlgorithm algorithm,
                                            std::uint64_t run_seed, int k = 3);

// Full personalized protocol over every developer. Gateway/parse failures are
// recorded as abstentions. out_shots, when given, receives each developer's
// ShotSet in developer order.
std::vector<GeneralistRun> eval_personalized(Gateway& gateway, const Dataset& dataset,
                                             ShotAlgorithm algorithm, std::uint64_t run_seed,
                                             int jobs = 1, int k = 3,
                                             std::vector<ShotSet>* out_shots = nullptr);

}  // namespace readlab
