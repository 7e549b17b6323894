#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "readlab/analysis.hpp"
#include "readlab/corpus.hpp"

namespace readlab {

struct Hyperparams {
    double learning_rate = 0.05;
    double l2_strength = 1e-3;
    int max_epochs = 5000;
    double convergence_tolerance = 1e-7;
};

// 3-class linear model over the feature catalog. Weights are 3 x (F+1) with
// the bias in the last column; inputs are standardized with the normalization
// fitted on the training data (constant features normalize to 0).
struct ClassifierModel {
    std::string feature_schema_version;
    std::size_t feature_count = 0;
    std::vector<double> weights;  // row-major, 3 rows of (feature_count + 1)
    std::vector<double> norm_mean;
    std::vector<double> norm_stddev;
    std::vector<bool> constant_feature;
};

struct Prediction {
    ReadabilityLabel label;
    std::array<double, 3> probabilities;
};

// L2-regularized multinomial cross-entropy loss and its analytic gradient.
// `design` is n x dim row-major with the bias column (always 1) last; the L2
// term covers every column except the bias. Exposed so the gradient can be
// finite-difference checked against the exact loss fit() minimizes.
double loss_and_gradient(const std::vector<double>& weights, const std::vector<double>& design,
                         const std::vector<int>& label_index, std::size_t samples, std::size_t dim,
                         double l2_strength, std::vector<double>* gradient);

// Full-batch gradient descent from zero-initialized weights; bit-reproducible
// for a given input (the seed is accepted for interface stability but inert
// under zero init). Stops at max_epochs or when the per-epoch loss improvement
// drops below convergence_tolerance.
ClassifierModel fit(const std::vector<FeatureVector>& features,
                    const std::vector<ReadabilityLabel>& labels, const Hyperparams& hp,
                    std::uint64_t seed, std::vector<double>* loss_history = nullptr);

Prediction predict(const ClassifierModel& model, const FeatureVector& features);

struct FoldPlan {
    std::uint64_t seed = 0;
    std::vector<std::vector<std::string>> folds;  // disjoint, cover all ids, sizes differ <= 1
};

FoldPlan make_fold_plan(const std::vector<std::string>& snippet_ids, std::uint64_t seed,
                        int fold_count = 10);

// Leave-developer-out 10-fold protocol: ground truth is the majority label of
// the other developers; each fold is predicted by a model fitted on the other
// nine. Requires a dense matrix and at least 10 snippets.
std::map<std::string, ReadabilityLabel> cross_validate(const RatingMatrix& matrix,
                                                       const std::vector<Snippet>& snippets,
                                                       const std::string& developer_id,
                                                       const Hyperparams& hp, std::uint64_t seed);

// Flat text persistence; round-trips are value-exact.
void save_model(const ClassifierModel& model, std::ostream& out);
ClassifierModel load_model(std::istream& in);

}  // namespace readlab
