// Acceptance suite: one pass/fail line per shipping criterion, exercised
// against synthetic datasets and the real CLI binary. Exits nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "readlab/artifacts.hpp"
#include "readlab/consistency.hpp"
#include "readlab/prompts.hpp"
#include "test_util.hpp"

using namespace readlab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

const std::string kCli = READLAB_CLI_PATH;

struct Check {
    bool ok = true;
    std::string note;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            note = message;
        }
    }
};

int g_failures = 0;

void run_criterion(const std::string& name, const std::function<void(Check&)>& body) {
    Check check;
    auto start = Clock::now();
    try {
        body(check);
    } catch (const std::exception& e) {
        check.ok = false;
        check.note = std::string("exception: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    std::ostringstream line;
    line << (check.ok ? "[PASS] " : "[FAIL] ") << name << " (" << static_cast<long>(ms) << " ms)";
    if (!check.ok) line << " -- " << check.note;
    std::cout << line.str() << std::endl;
    if (!check.ok) ++g_failures;
}

GatewayConfig stub_config(StubPolicy::Kind kind, const std::string& text = "Readable") {
    GatewayConfig cfg;
    cfg.backend = GatewayConfig::Backend::Stub;
    cfg.stub_policy = StubPolicy{kind, text};
    return cfg;
}

Dataset unanimous_dataset(int snippets, int developers) {
    static const int cycle[5] = {1, 3, 5, 2, 4};
    std::vector<std::vector<int>> grid;
    for (int s = 0; s < snippets; ++s) {
        grid.push_back(std::vector<int>(static_cast<std::size_t>(developers), cycle[s % 5]));
    }
    return testutil::make_dataset(grid, "unanimous");
}

// independent brute-force metric route (counts scanned pairwise)
LabelMetrics brute_force_metrics(const std::vector<ReadabilityLabel>& truth,
                                 const std::vector<ReadabilityLabel>& pred,
                                 ReadabilityLabel label) {
    long tp = 0, fp = 0, fn = 0, support = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] == label) ++support;
        if (pred[i] == label && truth[i] == label) ++tp;
        if (pred[i] == label && truth[i] != label) ++fp;
        if (pred[i] != label && truth[i] == label) ++fn;
    }
    LabelMetrics m;
    m.support = support;
    m.precision = (tp + fp) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = (tp + fn) == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = (m.precision + m.recall) == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

double others_variance(const RatingMatrix& m, std::size_t snippet, std::size_t excluded_dev) {
    double sum = 0.0, count = 0.0;
    for (std::size_t d = 0; d < m.developer_count(); ++d) {
        if (d == excluded_dev) continue;
        sum += m.rating(snippet, d)->value();
        count += 1.0;
    }
    double mean = sum / count;
    double ss = 0.0;
    for (std::size_t d = 0; d < m.developer_count(); ++d) {
        if (d == excluded_dev) continue;
        double delta = m.rating(snippet, d)->value() - mean;
        ss += delta * delta;
    }
    return ss / count;
}

std::string tree_digest(const fs::path& dir) {
    std::string digest;
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const fs::path& f : files) {
        digest += fs::relative(f, dir).string();
        digest += "\x01";
        digest += testutil::read_file(f);
        digest += "\x02";
    }
    return digest;
}

// ---------------------------------------------------------------------------

void criterion_dataset_structure(Check& check) {
    auto start = Clock::now();
    testutil::TempDir dir("acc_struct");

    // D_b&w shape: 100 snippets x 120 developers, fragment granularity
    testutil::write_dataset(dir.path() / "bw", "bw", 100, 120, "fragment",
                            [](int s, int d) { return 1 + (s + d) % 5; });
    // D_s shape: 200 snippets x 9 developers, method granularity
    testutil::write_dataset(dir.path() / "sc", "sc", 200, 9, "method",
                            [](int s, int d) { return 1 + (s * 2 + d) % 5; });

    auto bw = testutil::run_command(kCli + " validate " + (dir.path() / "bw").string());
    check.require(bw.exit_code == 0, "validate bw exited " + std::to_string(bw.exit_code));
    check.require(bw.output.find("100 snippets x 120 developers") != std::string::npos,
                  "bw dimensions not reported: " + bw.output);
    check.require(bw.output.find("12000 ratings") != std::string::npos, "bw rating count wrong");
    check.require(bw.output.find("dense") != std::string::npos, "bw not reported dense");

    auto sc = testutil::run_command(kCli + " validate " + (dir.path() / "sc").string());
    check.require(sc.exit_code == 0, "validate sc exited " + std::to_string(sc.exit_code));
    check.require(sc.output.find("200 snippets x 9 developers") != std::string::npos,
                  "sc dimensions not reported: " + sc.output);
    check.require(sc.output.find("1800 ratings") != std::string::npos, "sc rating count wrong");
    check.require(sc.output.find("dense") != std::string::npos, "sc not reported dense");

    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    check.require(seconds < 5.0, "took " + std::to_string(seconds) + " s (limit 5)");
}

void criterion_label_mapping(Check& check) {
    check.require(map_score_to_label(LikertScore(1)) == ReadabilityLabel::Unreadable, "1");
    check.require(map_score_to_label(LikertScore(2)) == ReadabilityLabel::Unreadable, "2");
    check.require(map_score_to_label(LikertScore(3)) == ReadabilityLabel::Neutral, "3");
    check.require(map_score_to_label(LikertScore(4)) == ReadabilityLabel::Readable, "4");
    check.require(map_score_to_label(LikertScore(5)) == ReadabilityLabel::Readable, "5");
}

void criterion_oracle_ceiling(Check& check) {
    auto start = Clock::now();
    Dataset ds = unanimous_dataset(20, 8);
    for (const std::string& dev : ds.matrix.developer_ids()) {
        GeneralistRun run = eval_optimal_oracle(ds, dev);
        DeveloperReport report = make_report(run, "acc");
        for (ReadabilityLabel label : kAllLabels) {
            const LabelMetrics& m = report.per_label[static_cast<std::size_t>(label)];
            if (m.support > 0) {
                check.require(m.precision == 1.0 && m.recall == 1.0 && m.f1 == 1.0,
                              "imperfect metrics for " + std::string(label_word(label)) +
                                  " on " + dev);
            }
        }
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    check.require(seconds < 1.0, "took " + std::to_string(seconds) + " s (limit 1)");
}

void criterion_stub_equivalence(Check& check) {
    std::vector<std::vector<int>> grid;
    std::mt19937 rng(2024);
    for (int s = 0; s < 20; ++s) {
        std::vector<int> row;
        for (int d = 0; d < 8; ++d) row.push_back(1 + static_cast<int>(rng() % 5));
        grid.push_back(row);
    }
    Dataset ds = testutil::make_dataset(grid, "varied");
    Gateway gw(stub_config(StubPolicy::Kind::MajorityEcho));
    gw.set_majority_table(majority_table(ds));

    for (const std::string& dev : ds.matrix.developer_ids()) {
        DeveloperReport llm = make_report(eval_llm_generalist(gw, ds, dev), "acc");
        DeveloperReport oracle = make_report(eval_optimal_oracle(ds, dev), "acc");
        check.require(llm.abstention_count == 0, "stub abstained for " + dev);
        check.require(llm.accuracy == oracle.accuracy, "accuracy differs for " + dev);
        for (std::size_t l = 0; l < 3; ++l) {
            check.require(llm.per_label[l].precision == oracle.per_label[l].precision &&
                              llm.per_label[l].recall == oracle.per_label[l].recall &&
                              llm.per_label[l].f1 == oracle.per_label[l].f1 &&
                              llm.per_label[l].support == oracle.per_label[l].support,
                          "per-label cells differ for " + dev);
        }
        check.require(llm.macro_f1 == oracle.macro_f1 &&
                          llm.macro_precision == oracle.macro_precision &&
                          llm.macro_recall == oracle.macro_recall,
                      "macro cells differ for " + dev);
    }
}

void criterion_gradient_check(Check& check) {
    auto start = Clock::now();
    std::mt19937 rng(99);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const std::size_t n = 20, f = 5, dim = f + 1;
    for (int instance = 0; instance < 20; ++instance) {
        std::vector<double> design(n * dim, 1.0);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < f; ++j) design[i * dim + j] = gauss(rng);
            labels[i] = static_cast<int>(rng() % 3);
        }
        std::vector<double> weights(3 * dim);
        for (double& w : weights) w = gauss(rng) * 0.5;

        std::vector<double> grad;
        loss_and_gradient(weights, design, labels, n, dim, 1e-2, &grad);
        const double h = 1e-5;
        for (std::size_t k = 0; k < weights.size(); ++k) {
            std::vector<double> wp = weights, wm = weights;
            wp[k] += h;
            wm[k] -= h;
            double fp = loss_and_gradient(wp, design, labels, n, dim, 1e-2, nullptr);
            double fm = loss_and_gradient(wm, design, labels, n, dim, 1e-2, nullptr);
            double fd = (fp - fm) / (2.0 * h);
            double rel =
                std::abs(grad[k] - fd) / std::max({std::abs(grad[k]), std::abs(fd), 1e-6});
            check.require(rel < 1e-4, "relative error " + std::to_string(rel) + " at instance " +
                                          std::to_string(instance));
        }
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    check.require(seconds < 5.0, "took " + std::to_string(seconds) + " s (limit 5)");
}

void criterion_classifier_sanity(Check& check) {
    auto start = Clock::now();
    // 300 snippets in three classes separable by construction: class 0 short,
    // class 1 medium, class 2 long bodies; every developer scores by class.
    static const int class_score[3] = {1, 3, 5};
    std::vector<std::vector<int>> grid;
    for (int s = 0; s < 300; ++s) {
        grid.push_back(std::vector<int>(4, class_score[s % 3]));
    }
    Dataset ds = testutil::make_dataset(grid, "separable");
    for (int s = 0; s < 300; ++s) {
        int cls = s % 3;
        ds.snippets[static_cast<std::size_t>(s)].source =
            testutil::java_snippet_source(s, cls * 12);
    }

    DatasetView others = remove_developer(ds.matrix, "dev000");
    auto predictions = cross_validate(ds.matrix, ds.snippets, "dev000", Hyperparams{}, 17);
    long correct = 0;
    for (const Snippet& s : ds.snippets) {
        if (predictions.at(s.id) == majority_label(others, s.id)) ++correct;
    }
    double accuracy = static_cast<double>(correct) / 300.0;
    check.require(accuracy >= 0.95, "held-out accuracy " + std::to_string(accuracy));

    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    check.require(seconds < 30.0, "took " + std::to_string(seconds) + " s (limit 30)");
}

void criterion_metric_oracle(Check& check) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        std::size_t n = rng() % 51;
        std::vector<ReadabilityLabel> truth(n), pred(n);
        for (std::size_t i = 0; i < n; ++i) {
            truth[i] = static_cast<ReadabilityLabel>(rng() % 3);
            pred[i] = static_cast<ReadabilityLabel>(rng() % 3);
        }
        ConfusionMatrix cm = confusion(truth, pred);
        for (ReadabilityLabel label : kAllLabels) {
            LabelMetrics ours = label_metrics(cm, label);
            LabelMetrics oracle = brute_force_metrics(truth, pred, label);
            check.require(ours.precision == oracle.precision && ours.recall == oracle.recall &&
                              ours.f1 == oracle.f1 && ours.support == oracle.support,
                          "metrics differ at trial " + std::to_string(trial));
        }
    }
}

void criterion_shot_selection_oracles(Check& check) {
    std::mt19937 rng(501);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t snippets = 3 + rng() % 8;   // up to 10
        std::size_t devs = 2 + rng() % 9;       // up to 10
        std::vector<std::vector<int>> grid(snippets, std::vector<int>(devs));
        for (auto& row : grid) {
            for (int& cell : row) {
                // small score alphabet makes exact variance ties common
                cell = 1 + static_cast<int>(rng() % 3);
            }
        }
        RatingMatrix m = testutil::make_matrix(grid);

        for (const std::string& dev : m.developer_ids()) {
            std::size_t di = m.developer_index(dev);

            // exhaustive HV oracle: repeated argmax with the stated tie rule
            std::vector<bool> used(m.snippet_count(), false);
            ShotSet hv = select_shots_hv(m, dev);
            for (int round = 0; round < 3; ++round) {
                std::size_t best = m.snippet_count();
                double best_var = -1.0;
                for (std::size_t s = 0; s < m.snippet_count(); ++s) {
                    if (used[s]) continue;
                    double var = others_variance(m, s, di);
                    if (var > best_var ||
                        (var == best_var && m.snippet_ids()[s] < m.snippet_ids()[best])) {
                        best = s;
                        best_var = var;
                    }
                }
                used[best] = true;
                check.require(hv.shots[static_cast<std::size_t>(round)].snippet_id ==
                                  m.snippet_ids()[best],
                              "hv mismatch at trial " + std::to_string(trial));
            }

            // exhaustive HVL oracle: per-label argmax over d's labels
            ShotSet hvl = select_shots_hvl(m, dev);
            std::set<std::pair<std::string, int>> got;
            for (const Shot& s : hvl.shots) got.insert({s.snippet_id, static_cast<int>(s.label)});
            std::set<std::pair<std::string, int>> want;
            for (ReadabilityLabel label : kAllLabels) {
                std::size_t best = m.snippet_count();
                double best_var = -1.0;
                for (std::size_t s = 0; s < m.snippet_count(); ++s) {
                    if (map_score_to_label(*m.rating(s, di)) != label) continue;
                    double var = others_variance(m, s, di);
                    if (var > best_var ||
                        (var == best_var && m.snippet_ids()[s] < m.snippet_ids()[best])) {
                        best = s;
                        best_var = var;
                    }
                }
                if (best != m.snippet_count()) {
                    want.insert({m.snippet_ids()[best], static_cast<int>(label)});
                }
            }
            check.require(got == want, "hvl mismatch at trial " + std::to_string(trial));
        }

        // R: seed-deterministic and blind to the scores
        const std::string dev = m.developer_ids()[0];
        ShotSet r1 = select_shots_random(m, dev, 77);
        ShotSet r2 = select_shots_random(m, dev, 77);
        std::vector<std::vector<int>> permuted = grid;
        for (auto& row : permuted) {
            for (int& cell : row) cell = 6 - cell;  // flip every score
        }
        ShotSet r3 = select_shots_random(testutil::make_matrix(permuted), dev, 77);
        for (std::size_t i = 0; i < r1.shots.size(); ++i) {
            check.require(r1.shots[i].snippet_id == r2.shots[i].snippet_id, "R not deterministic");
            check.require(r1.shots[i].snippet_id == r3.shots[i].snippet_id,
                          "R selection depends on scores");
        }
    }
}

void criterion_shot_exclusion(Check& check) {
    testutil::TempDir dir("acc_excl");
    // more snippets than possible shot slots (4 developers x 3 shots) so the
    // eval set stays non-empty whatever the selections do
    testutil::write_dataset(dir.path() / "ds", "varied", 20, 4, "fragment",
                            [](int s, int d) { return 1 + (s * 2 + d * 3) % 5; });
    for (const std::string ssa : {"hv", "hvl", "r"}) {
        fs::path out = dir.path() / ("out_" + ssa);
        auto r = testutil::run_command(kCli + " run personalized --dataset " +
                                       (dir.path() / "ds").string() + " --ssa " + ssa +
                                       " --seed 3 --out " + out.string());
        check.require(r.exit_code == 0, ssa + " run failed: " + r.output);
        if (r.exit_code != 0) continue;

        // re-verify the property from the artifacts themselves
        std::set<std::string> shot_ids;
        std::vector<nlohmann::json> runs;
        for (const auto& entry : fs::directory_iterator(out / "runs")) {
            nlohmann::json doc = nlohmann::json::parse(testutil::read_file(entry.path()));
            for (const auto& shot : doc.at("shots")) {
                shot_ids.insert(shot.at("snippet").get<std::string>());
            }
            runs.push_back(std::move(doc));
        }
        check.require(!runs.empty(), "no run artifacts for " + ssa);
        for (const nlohmann::json& doc : runs) {
            for (const auto& [snippet_id, label] : doc.at("predictions").items()) {
                (void)label;
                check.require(!shot_ids.count(snippet_id),
                              "eval snippet " + snippet_id + " is a shot in " + ssa);
            }
        }
    }
}

void criterion_feature_values(Check& check) {
    double volume = halstead_volume(tokenize("a = a + 1;"));
    check.require(std::abs(volume - 6.0 * std::log2(5.0)) < 1e-9,
                  "halstead volume " + std::to_string(volume));

    TokenStream uniform;
    uniform.line_count = 1;
    uniform.lines = {""};
    for (const char* t : {"a", "b", "c", "d"}) {
        Token tok;
        tok.text = t;
        tok.kind = TokenKind::Identifier;
        tok.line = 1;
        uniform.tokens.push_back(tok);
    }
    check.require(std::abs(token_entropy(uniform) - 2.0) < 1e-12, "uniform-4 entropy");

    TokenStream skewed;
    skewed.line_count = 1;
    skewed.lines = {""};
    for (const char* t : {"x", "x", "x", "y"}) {
        Token tok;
        tok.text = t;
        tok.kind = TokenKind::Identifier;
        tok.line = 1;
        skewed.tokens.push_back(tok);
    }
    check.require(std::abs(token_entropy(skewed) - 0.811278) < 1e-6, "skewed entropy");
}

void criterion_consistency_arithmetic(Check& check) {
    auto records_with = [](long total, long inconsistent) {
        std::vector<AnnotationRecord> records;
        for (long i = 1; i <= total; ++i) {
            AnnotationRecord rec;
            rec.pair_id = i;
            rec.final = i <= inconsistent ? Verdict::Inconsistent : Verdict::Consistent;
            records.push_back(rec);
        }
        return records;
    };
    double bw = inconsistency_rate(records_with(384, 121));
    check.require(std::abs(bw - 100.0 * 121.0 / 384.0) < 1e-12, "bw rate wrong");
    check.require(std::lround(bw) == 32, "bw rate does not round to 32");
    check.require(std::abs(bw - 31.5) < 0.05, "bw rate not ~31.5");

    double sc = inconsistency_rate(records_with(384, 90));
    check.require(std::abs(sc - 100.0 * 90.0 / 384.0) < 1e-12, "sc rate wrong");
    check.require(std::lround(sc) == 23, "sc rate does not round to 23");
    check.require(std::abs(sc - 23.4) < 0.05, "sc rate not ~23.4");

    // the 23-disagreement fixture: both annotators cover 384 pairs, disagree on
    // exactly 23, and the tiebreaks decide every disagreement
    std::vector<VerdictEntry> a, b, tiebreaks;
    for (long i = 1; i <= 384; ++i) {
        bool disagrees = i <= 23;
        a.push_back({i, "a", Verdict::Consistent, ""});
        b.push_back({i, "b", disagrees ? Verdict::Inconsistent : Verdict::Consistent, ""});
        if (disagrees) {
            tiebreaks.push_back(
                {i, "t", i % 2 == 0 ? Verdict::Inconsistent : Verdict::Consistent, ""});
        }
    }
    MergeResult merged = merge_with_tiebreak(a, b, tiebreaks);
    check.require(merged.records.size() == 384, "record count");
    check.require(merged.disagreements.size() == 23, "disagreement count");
    check.require(merged.pending.empty(), "pending left over");
    long finals = 0;
    for (const AnnotationRecord& rec : merged.records) {
        if (rec.final) ++finals;
        if (rec.tiebreak) {
            check.require(*rec.final == *rec.tiebreak, "final does not follow tiebreak");
        } else {
            check.require(*rec.final == *rec.verdict_a, "final does not follow agreement");
        }
    }
    check.require(finals == 384, "not every record finalized");
}

void criterion_determinism(Check& check) {
    testutil::TempDir dir("acc_det");
    testutil::write_dataset(dir.path() / "ds", "varied", 12, 4, "fragment",
                            [](int s, int d) { return 1 + (s * 3 + d) % 5; });

    std::string personalized = kCli + " run personalized --dataset " +
                               (dir.path() / "ds").string() +
                               " --ssa hv --gateway stub:majority-echo --seed 11 --out ";
    auto p1 = testutil::run_command(personalized + (dir.path() / "p1").string());
    auto p2 = testutil::run_command(personalized + (dir.path() / "p2").string());
    check.require(p1.exit_code == 0 && p2.exit_code == 0, "personalized runs failed");
    check.require(tree_digest(dir.path() / "p1") == tree_digest(dir.path() / "p2"),
                  "personalized artifacts differ between identical runs");

    std::string generalist = kCli + " run generalist --dataset " + (dir.path() / "ds").string() +
                             " --method llm --gateway stub:majority-echo --seed 11 --out ";
    auto g1 = testutil::run_command(generalist + (dir.path() / "g1").string());
    auto g2 = testutil::run_command(generalist + (dir.path() / "g2").string());
    check.require(g1.exit_code == 0 && g2.exit_code == 0, "generalist runs failed");
    check.require(tree_digest(dir.path() / "g1") == tree_digest(dir.path() / "g2"),
                  "generalist artifacts differ between identical runs");
}

}  // namespace

int main() {
    auto start = Clock::now();

    run_criterion("dataset-structural-replication", criterion_dataset_structure);
    run_criterion("label-mapping-exhaustive", criterion_label_mapping);
    run_criterion("oracle-ceiling-property", criterion_oracle_ceiling);
    run_criterion("stub-equivalence", criterion_stub_equivalence);
    run_criterion("classifier-gradient-check", criterion_gradient_check);
    run_criterion("classifier-sanity", criterion_classifier_sanity);
    run_criterion("metric-oracle-equivalence", criterion_metric_oracle);
    run_criterion("shot-selection-oracles", criterion_shot_selection_oracles);
    run_criterion("shot-exclusion-property", criterion_shot_exclusion);
    run_criterion("hand-computed-feature-values", criterion_feature_values);
    run_criterion("consistency-arithmetic", criterion_consistency_arithmetic);
    run_criterion("end-to-end-determinism", criterion_determinism);

    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "CRITERIA FAILED") << " ("
              << g_failures << " failures, " << seconds << " s)" << std::endl;
    if (seconds >= 120.0) {
        std::cout << "[FAIL] acceptance suite exceeded the 2-minute budget" << std::endl;
        return 1;
    }
    return g_failures == 0 ? 0 : 1;
}
