#include "readlab/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace readlab {

namespace {

constexpr std::size_t kClasses = 3;
constexpr double kConstantStddevFloor = 1e-12;

void softmax_row(std::array<double, kClasses>& scores) {
    double max_score = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - max_score);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

std::array<double, kClasses> class_scores(const std::vector<double>& weights,
                                          const double* row, std::size_t dim) {
    std::array<double, kClasses> scores{};
    for (std::size_t c = 0; c < kClasses; ++c) {
        const double* w = weights.data() + c * dim;
        double s = 0.0;
        for (std::size_t j = 0; j < dim; ++j) s += w[j] * row[j];
        scores[c] = s;
    }
    return scores;
}

double normalized_value(const ClassifierModel& model, std::size_t feature, double raw) {
    if (model.constant_feature[feature]) return 0.0;
    return (raw - model.norm_mean[feature]) / model.norm_stddev[feature];
}

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double loss_and_gradient(const std::vector<double>& weights, const std::vector<double>& design,
                         const std::vector<int>& label_index, std::size_t samples, std::size_t dim,
                         double l2_strength, std::vector<double>* gradient) {
    if (gradient) gradient->assign(weights.size(), 0.0);
    double nll = 0.0;
    const double inv_n = 1.0 / static_cast<double>(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double* row = design.data() + i * dim;
        std::array<double, kClasses> p = class_scores(weights, row, dim);
        softmax_row(p);
        nll -= std::log(std::max(p[static_cast<std::size_t>(label_index[i])], 1e-300));
        if (gradient) {
            for (std::size_t c = 0; c < kClasses; ++c) {
                double delta = (p[c] - (label_index[i] == static_cast<int>(c) ? 1.0 : 0.0)) * inv_n;
                double* g = gradient->data() + c * dim;
                for (std::size_t j = 0; j < dim; ++j) g[j] += delta * row[j];
            }
        }
    }
    double loss = nll * inv_n;
    // The bias column (last) stays unregularized.
    double reg = 0.0;
    for (std::size_t c = 0; c < kClasses; ++c) {
        for (std::size_t j = 0; j + 1 < dim; ++j) {
            double w = weights[c * dim + j];
            reg += w * w;
            if (gradient) (*gradient)[c * dim + j] += l2_strength * w;
        }
    }
    return loss + 0.5 * l2_strength * reg;
}

ClassifierModel fit(const std::vector<FeatureVector>& features,
                    const std::vector<ReadabilityLabel>& labels, const Hyperparams& hp,
                    std::uint64_t seed, std::vector<double>* loss_history) {
    (void)seed;  // zero init is the documented default; the seed has no effect
    if (features.empty()) throw DataError("fit: empty training set");
    if (features.size() != labels.size()) {
        throw DataError("fit: feature and label list lengths differ");
    }
    if (hp.learning_rate <= 0 || hp.l2_strength < 0 || hp.max_epochs <= 0 ||
        hp.convergence_tolerance <= 0) {
        throw DataError("fit: invalid hyperparameters");
    }

    const std::size_t n = features.size();
    const std::size_t f = features.front().values.size();
    const std::size_t dim = f + 1;

    ClassifierModel model;
    model.feature_schema_version = features.front().schema_version;
    model.feature_count = f;
    model.norm_mean.assign(f, 0.0);
    model.norm_stddev.assign(f, 1.0);
    model.constant_feature.assign(f, false);

    for (const FeatureVector& fv : features) {
        if (fv.schema_version != model.feature_schema_version || fv.values.size() != f) {
            throw DataError("fit: feature schema mismatch in training set");
        }
    }

    // Standardization fitted on the training data only.
    for (std::size_t j = 0; j < f; ++j) {
        double mean = 0.0;
        for (const FeatureVector& fv : features) mean += fv.values[j].second;
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const FeatureVector& fv : features) {
            double d = fv.values[j].second - mean;
            var += d * d;
        }
        var /= static_cast<double>(n);
        double stddev = std::sqrt(var);
        model.norm_mean[j] = mean;
        if (stddev < kConstantStddevFloor) {
            model.constant_feature[j] = true;
            model.norm_stddev[j] = 1.0;
        } else {
            model.norm_stddev[j] = stddev;
        }
    }

    std::vector<double> design(n * dim, 1.0);
    std::vector<int> label_index(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < f; ++j) {
            design[i * dim + j] = normalized_value(model, j, features[i].values[j].second);
        }
        label_index[i] = static_cast<int>(labels[i]);
    }

    model.weights.assign(kClasses * dim, 0.0);
    std::vector<double> gradient;
    double prev_loss = 0.0;
    bool have_prev = false;
    for (int epoch = 0; epoch < hp.max_epochs; ++epoch) {
        double loss = loss_and_gradient(model.weights, design, label_index, n, dim,
                                        hp.l2_strength, &gradient);
        if (loss_history) loss_history->push_back(loss);
        for (std::size_t k = 0; k < model.weights.size(); ++k) {
            model.weights[k] -= hp.learning_rate * gradient[k];
        }
        if (have_prev && prev_loss - loss < hp.convergence_tolerance) break;
        prev_loss = loss;
        have_prev = true;
    }
    return model;
}

Prediction predict(const ClassifierModel& model, const FeatureVector& features) {
    if (features.schema_version != model.feature_schema_version ||
        features.values.size() != model.feature_count) {
        throw DataError("predict: feature schema mismatch");
    }
    const std::size_t dim = model.feature_count + 1;
    std::vector<double> row(dim, 1.0);
    for (std::size_t j = 0; j < model.feature_count; ++j) {
        row[j] = normalized_value(model, j, features.values[j].second);
    }
    std::array<double, kClasses> p = class_scores(model.weights, row.data(), dim);
    softmax_row(p);
    // argmax with ties toward the less readable label (lowest index)
    std::size_t best = 0;
    for (std::size_t c = 1; c < kClasses; ++c) {
        if (p[c] > p[best]) best = c;
    }
    return Prediction{static_cast<ReadabilityLabel>(best), p};
}

FoldPlan make_fold_plan(const std::vector<std::string>& snippet_ids, std::uint64_t seed,
                        int fold_count) {
    if (fold_count <= 0) throw DataError("make_fold_plan: fold count must be positive");
    if (snippet_ids.size() < static_cast<std::size_t>(fold_count)) {
        throw DataError("make_fold_plan: need at least " + std::to_string(fold_count) + " snippets");
    }
    std::vector<std::size_t> order(snippet_ids.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    FoldPlan plan;
    plan.seed = seed;
    plan.folds.resize(static_cast<std::size_t>(fold_count));
    const std::size_t n = order.size();
    const std::size_t base = n / static_cast<std::size_t>(fold_count);
    const std::size_t extra = n % static_cast<std::size_t>(fold_count);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < plan.folds.size(); ++k) {
        std::size_t size = base + (k < extra ? 1 : 0);
        for (std::size_t i = 0; i < size; ++i) {
            plan.folds[k].push_back(snippet_ids[order[cursor++]]);
        }
    }
    return plan;
}

std::map<std::string, ReadabilityLabel> cross_validate(const RatingMatrix& matrix,
                                                       const std::vector<Snippet>& snippets,
                                                       const std::string& developer_id,
                                                       const Hyperparams& hp, std::uint64_t seed) {
    if (!matrix.dense()) throw DataError("cross_validate: matrix must be dense");
    if (matrix.snippet_count() < 10) throw DataError("cross_validate: need at least 10 snippets");
    DatasetView others = remove_developer(matrix, developer_id);

    std::map<std::string, ReadabilityLabel> truth;
    std::map<std::string, FeatureVector> feats;
    for (const Snippet& s : snippets) {
        truth[s.id] = majority_label(others, s.id);
        feats[s.id] = extract_features(s);
    }
    for (const std::string& id : matrix.snippet_ids()) {
        if (!feats.count(id)) {
            throw DataError("cross_validate: no snippet source for rated id '" + id + "'");
        }
    }

    FoldPlan plan = make_fold_plan(matrix.snippet_ids(), seed);
    std::map<std::string, ReadabilityLabel> predictions;
    for (std::size_t held_out = 0; held_out < plan.folds.size(); ++held_out) {
        std::vector<FeatureVector> train_x;
        std::vector<ReadabilityLabel> train_y;
        for (std::size_t k = 0; k < plan.folds.size(); ++k) {
            if (k == held_out) continue;
            for (const std::string& id : plan.folds[k]) {
                train_x.push_back(feats.at(id));
                train_y.push_back(truth.at(id));
            }
        }
        ClassifierModel model = fit(train_x, train_y, hp, seed);
        for (const std::string& id : plan.folds[held_out]) {
            predictions[id] = predict(model, feats.at(id)).label;
        }
    }
    return predictions;
}

void save_model(const ClassifierModel& model, std::ostream& out) {
    out << "readlab-model 1\n";
    out << "schema " << model.feature_schema_version << "\n";
    out << "features " << model.feature_count << "\n";
    for (std::size_t j = 0; j < model.feature_count; ++j) {
        out << "norm " << format_exact(model.norm_mean[j]) << " " << format_exact(model.norm_stddev[j])
            << " " << (model.constant_feature[j] ? 1 : 0) << "\n";
    }
    const std::size_t dim = model.feature_count + 1;
    for (std::size_t c = 0; c < kClasses; ++c) {
        out << "weights";
        for (std::size_t j = 0; j < dim; ++j) out << " " << format_exact(model.weights[c * dim + j]);
        out << "\n";
    }
}

ClassifierModel load_model(std::istream& in) {
    std::string word;
    int version = 0;
    if (!(in >> word >> version) || word != "readlab-model" || version != 1) {
        throw DataError("load_model: bad header");
    }
    ClassifierModel model;
    if (!(in >> word >> model.feature_schema_version) || word != "schema") {
        throw DataError("load_model: missing schema line");
    }
    if (!(in >> word >> model.feature_count) || word != "features") {
        throw DataError("load_model: missing features line");
    }
    model.norm_mean.resize(model.feature_count);
    model.norm_stddev.resize(model.feature_count);
    model.constant_feature.assign(model.feature_count, false);
    for (std::size_t j = 0; j < model.feature_count; ++j) {
        int flag = 0;
        if (!(in >> word >> model.norm_mean[j] >> model.norm_stddev[j] >> flag) || word != "norm") {
            throw DataError("load_model: malformed norm row");
        }
        model.constant_feature[j] = flag != 0;
    }
    const std::size_t dim = model.feature_count + 1;
    model.weights.resize(kClasses * dim);
    for (std::size_t c = 0; c < kClasses; ++c) {
        if (!(in >> word) || word != "weights") throw DataError("load_model: malformed weight row");
        for (std::size_t j = 0; j < dim; ++j) {
            if (!(in >> model.weights[c * dim + j])) {
                throw DataError("load_model: malformed weight row");
            }
        }
    }
    return model;
}

}  // namespace readlab
