#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "readlab/classifier.hpp"
#include "test_util.hpp"

using namespace readlab;

namespace {

FeatureVector fv2(double a, double b) {
    FeatureVector fv;
    fv.schema_version = "test2";
    fv.values = {{"f0", a}, {"f1", b}};
    return fv;
}

// two well-separated clusters in 2-D
void separable_clusters(std::vector<FeatureVector>& xs, std::vector<ReadabilityLabel>& ys) {
    std::mt19937 rng(5);
    auto jitter = [&rng] { return (static_cast<double>(rng() % 1000) / 1000.0 - 0.5) * 0.2; };
    for (int i = 0; i < 30; ++i) {
        xs.push_back(fv2(2.0 + jitter(), 2.0 + jitter()));
        ys.push_back(ReadabilityLabel::Readable);
        xs.push_back(fv2(-2.0 + jitter(), -2.0 + jitter()));
        ys.push_back(ReadabilityLabel::Unreadable);
    }
}

}  // namespace

TEST_SUITE("classifier") {

TEST_CASE("fit separates two clusters") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    int correct = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (predict(model, xs[i]).label == ys[i]) ++correct;
    }
    CHECK(static_cast<double>(correct) / static_cast<double>(xs.size()) >= 0.99);
}

TEST_CASE("fit on a single label predicts that label everywhere") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    for (int i = 0; i < 20; ++i) {
        xs.push_back(fv2(static_cast<double>(i), static_cast<double>(i % 5)));
        ys.push_back(ReadabilityLabel::Neutral);
    }
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    for (const FeatureVector& x : xs) {
        CHECK(predict(model, x).label == ReadabilityLabel::Neutral);
    }
    CHECK(predict(model, fv2(100.0, -3.0)).label == ReadabilityLabel::Neutral);
}

TEST_CASE("fit validates preconditions") {
    std::vector<FeatureVector> xs = {fv2(1, 2)};
    std::vector<ReadabilityLabel> ys = {ReadabilityLabel::Readable, ReadabilityLabel::Neutral};
    CHECK_THROWS_AS(fit(xs, ys, Hyperparams{}, 0), DataError);
    CHECK_THROWS_AS(fit({}, {}, Hyperparams{}, 0), DataError);
}

TEST_CASE("predict with all-zero weights is the uniform tie broken to Unreadable") {
    ClassifierModel model;
    model.feature_schema_version = "test2";
    model.feature_count = 2;
    model.weights.assign(3 * 3, 0.0);
    model.norm_mean = {0.0, 0.0};
    model.norm_stddev = {1.0, 1.0};
    model.constant_feature = {false, false};
    Prediction p = predict(model, fv2(0.3, -0.7));
    CHECK(p.label == ReadabilityLabel::Unreadable);
    for (double prob : p.probabilities) CHECK(prob == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("predict saturates for a dominant class and always sums to one") {
    ClassifierModel model;
    model.feature_schema_version = "test2";
    model.feature_count = 2;
    model.weights.assign(3 * 3, 0.0);
    model.weights[2 * 3 + 2] = 50.0;  // Readable bias
    model.norm_mean = {0.0, 0.0};
    model.norm_stddev = {1.0, 1.0};
    model.constant_feature = {false, false};
    Prediction p = predict(model, fv2(0.0, 0.0));
    CHECK(p.label == ReadabilityLabel::Readable);
    CHECK(p.probabilities[2] > 0.99);

    std::mt19937 rng(23);
    for (int i = 0; i < 50; ++i) {
        // keep scores small enough that no probability saturates in double
        for (double& w : model.weights) w = (static_cast<double>(rng() % 200) - 100.0) / 100.0;
        Prediction q = predict(model, fv2(static_cast<double>(rng() % 3),
                                          static_cast<double>(rng() % 3)));
        double sum = q.probabilities[0] + q.probabilities[1] + q.probabilities[2];
        CHECK(std::abs(sum - 1.0) <= 1e-9);
        for (double prob : q.probabilities) {
            CHECK(prob > 0.0);
            CHECK(prob < 1.0);
        }
    }
}

TEST_CASE("predict argmax is invariant under a constant shift of every class score") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    ClassifierModel shifted = model;
    const std::size_t dim = model.feature_count + 1;
    for (std::size_t c = 0; c < 3; ++c) shifted.weights[c * dim + dim - 1] += 7.5;
    for (const FeatureVector& x : xs) {
        Prediction a = predict(model, x);
        Prediction b = predict(shifted, x);
        CHECK(a.label == b.label);
        for (int c = 0; c < 3; ++c) {
            CHECK(a.probabilities[static_cast<std::size_t>(c)] ==
                  doctest::Approx(b.probabilities[static_cast<std::size_t>(c)]).epsilon(1e-9));
        }
    }
}

TEST_CASE("predict rejects schema mismatches") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    FeatureVector other = fv2(0, 0);
    other.schema_version = "different";
    CHECK_THROWS_AS(predict(model, other), DataError);
}

TEST_CASE("analytic gradient matches central finite differences") {
    std::mt19937 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = 20, f = 5, dim = f + 1;
    for (int instance = 0; instance < 5; ++instance) {
        std::vector<double> design(n * dim, 1.0);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < f; ++j) design[i * dim + j] = gauss(rng);
            labels[i] = static_cast<int>(rng() % 3);
        }
        std::vector<double> weights(3 * dim);
        for (double& w : weights) w = gauss(rng) * 0.5;

        std::vector<double> grad;
        loss_and_gradient(weights, design, labels, n, dim, 0.1, &grad);

        const double h = 1e-5;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            std::vector<double> wp = weights, wm = weights;
            wp[k] += h;
            wm[k] -= h;
            double fp = loss_and_gradient(wp, design, labels, n, dim, 0.1, nullptr);
            double fm = loss_and_gradient(wm, design, labels, n, dim, 0.1, nullptr);
            double fd = (fp - fm) / (2.0 * h);
            double rel = std::abs(grad[k] - fd) / std::max({std::abs(grad[k]), std::abs(fd), 1e-6});
            CHECK(rel < 1e-4);
        }
    }
}

TEST_CASE("full-batch loss is non-increasing at the default learning rate") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    for (int i = 0; i < 10; ++i) {  // add a third class
        xs.push_back(fv2(2.0, -2.0));
        ys.push_back(ReadabilityLabel::Neutral);
    }
    std::vector<double> history;
    Hyperparams hp;
    hp.max_epochs = 400;
    fit(xs, ys, hp, 0, &history);
    REQUIRE(history.size() > 2);
    for (std::size_t i = 1; i < history.size(); ++i) {
        CHECK(history[i] <= history[i - 1] + 1e-12);
    }
}

TEST_CASE("normalization is fitted on the training input") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    for (std::size_t j = 0; j < model.feature_count; ++j) {
        double mean = 0.0;
        for (const FeatureVector& x : xs) {
            mean += (x.values[j].second - model.norm_mean[j]) / model.norm_stddev[j];
        }
        mean /= static_cast<double>(xs.size());
        double var = 0.0;
        for (const FeatureVector& x : xs) {
            double z = (x.values[j].second - model.norm_mean[j]) / model.norm_stddev[j];
            var += (z - mean) * (z - mean);
        }
        var /= static_cast<double>(xs.size());
        CHECK(std::abs(mean) <= 1e-9);
        CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-9);
    }
}

TEST_CASE("constant features are flagged and normalized to zero") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    for (int i = 0; i < 12; ++i) {
        FeatureVector fv;
        fv.schema_version = "test2";
        fv.values = {{"f0", 3.5}, {"f1", static_cast<double>(i % 3)}};
        xs.push_back(fv);
        ys.push_back(static_cast<ReadabilityLabel>(i % 3));
    }
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);
    CHECK(model.constant_feature[0]);
    CHECK_FALSE(model.constant_feature[1]);
}

TEST_CASE("fold plan partitions the ids with near-equal sizes") {
    std::vector<std::string> ids;
    for (int i = 0; i < 37; ++i) ids.push_back(testutil::snippet_name(i));
    FoldPlan plan = make_fold_plan(ids, 99);
    REQUIRE(plan.folds.size() == 10);
    std::set<std::string> seen;
    std::size_t min_size = ids.size(), max_size = 0;
    for (const auto& fold : plan.folds) {
        min_size = std::min(min_size, fold.size());
        max_size = std::max(max_size, fold.size());
        for (const std::string& id : fold) CHECK(seen.insert(id).second);
    }
    CHECK(seen.size() == ids.size());
    CHECK(max_size - min_size <= 1);
    // deterministic
    FoldPlan again = make_fold_plan(ids, 99);
    CHECK(plan.folds == again.folds);
    FoldPlan other = make_fold_plan(ids, 100);
    CHECK(plan.folds != other.folds);
}

TEST_CASE("cross_validate covers every snippet exactly once and is seed-deterministic") {
    std::vector<std::vector<int>> grid;
    for (int s = 0; s < 24; ++s) grid.push_back(std::vector<int>(5, 1 + (s * 2) % 5));
    Dataset ds = testutil::make_dataset(grid);
    Hyperparams hp;
    hp.max_epochs = 150;
    auto preds = cross_validate(ds.matrix, ds.snippets, "dev001", hp, 7);
    CHECK(preds.size() == 24);
    for (const Snippet& s : ds.snippets) CHECK(preds.count(s.id) == 1);

    auto again = cross_validate(ds.matrix, ds.snippets, "dev001", hp, 7);
    CHECK(preds == again);
}

TEST_CASE("cross_validate never reads the target developer's column") {
    std::vector<std::vector<int>> grid;
    for (int s = 0; s < 20; ++s) grid.push_back(std::vector<int>(4, 1 + (s * 3) % 5));
    Dataset ds = testutil::make_dataset(grid);
    // flip dev000's scores; truth and features are untouched for the run on dev000
    std::vector<std::vector<int>> flipped = grid;
    for (auto& row : flipped) row[0] = 6 - row[0];
    Dataset ds2 = testutil::make_dataset(flipped);

    Hyperparams hp;
    hp.max_epochs = 150;
    auto a = cross_validate(ds.matrix, ds.snippets, "dev000", hp, 3);
    auto b = cross_validate(ds2.matrix, ds2.snippets, "dev000", hp, 3);
    CHECK(a == b);
}

TEST_CASE("cross_validate predicts each fold with a model fitted on the other nine") {
    std::vector<std::vector<int>> grid;
    for (int s = 0; s < 20; ++s) grid.push_back(std::vector<int>(4, 1 + (s * 2) % 5));
    Dataset ds = testutil::make_dataset(grid);
    Hyperparams hp;
    hp.max_epochs = 120;
    const std::uint64_t seed = 13;
    auto predictions = cross_validate(ds.matrix, ds.snippets, "dev000", hp, seed);

    // replay the bookkeeping for one fold: fitting on the complement must
    // reproduce exactly the predictions cross_validate reported for it
    FoldPlan plan = make_fold_plan(ds.matrix.snippet_ids(), seed);
    DatasetView others = remove_developer(ds.matrix, "dev000");
    std::map<std::string, FeatureVector> feats;
    std::map<std::string, ReadabilityLabel> truth;
    for (const Snippet& s : ds.snippets) {
        feats[s.id] = extract_features(s);
        truth[s.id] = majority_label(others, s.id);
    }
    const std::size_t held_out = 4;
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
        CHECK(predictions.at(id) == predict(model, feats.at(id)).label);
    }
}

TEST_CASE("cross_validate preconditions") {
    std::vector<std::vector<int>> grid(5, std::vector<int>(3, 3));
    Dataset small = testutil::make_dataset(grid);
    CHECK_THROWS_AS(cross_validate(small.matrix, small.snippets, "dev000", Hyperparams{}, 0),
                    DataError);

    std::vector<std::vector<int>> holes(12, std::vector<int>(3, 3));
    holes[2][1] = 0;
    Dataset sparse = testutil::make_dataset(holes);
    CHECK_THROWS_AS(cross_validate(sparse.matrix, sparse.snippets, "dev000", Hyperparams{}, 0),
                    DataError);

    Dataset ok = testutil::make_dataset(std::vector<std::vector<int>>(12, std::vector<int>(3, 3)));
    CHECK_THROWS_AS(cross_validate(ok.matrix, ok.snippets, "ghost", Hyperparams{}, 0), DataError);
}

TEST_CASE("model persistence round-trips value-exactly") {
    std::vector<FeatureVector> xs;
    std::vector<ReadabilityLabel> ys;
    separable_clusters(xs, ys);
    ClassifierModel model = fit(xs, ys, Hyperparams{}, 0);

    std::stringstream buffer;
    save_model(model, buffer);
    ClassifierModel loaded = load_model(buffer);
    CHECK(loaded.feature_schema_version == model.feature_schema_version);
    CHECK(loaded.feature_count == model.feature_count);
    CHECK(loaded.weights == model.weights);          // exact doubles
    CHECK(loaded.norm_mean == model.norm_mean);
    CHECK(loaded.norm_stddev == model.norm_stddev);
    CHECK(loaded.constant_feature == model.constant_feature);

    std::stringstream bad("readlab-model 9\n");
    CHECK_THROWS_AS(load_model(bad), DataError);
}

}  // TEST_SUITE
