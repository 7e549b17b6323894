#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "readlab/artifacts.hpp"
#include "readlab/consistency.hpp"
#include "readlab/hash.hpp"
#include "readlab/prompts.hpp"
#include "readlab/util.hpp"

namespace {

using namespace readlab;
using json = nlohmann::json;
namespace fs = std::filesystem;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string sanitize_filename(const std::string& name) {
    std::string out;
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  c == '-' || c == '_' || c == '.';
        out.push_back(ok ? c : '_');
    }
    return out;
}

GatewayConfig parse_gateway_spec(const std::string& spec) {
    GatewayConfig gw;
    if (spec == "remote") {
        gw.backend = GatewayConfig::Backend::RemoteHttp;
        gw.model_name = "gpt-4o";
        return gw;
    }
    std::vector<std::string> parts = split(spec, ':');
    if (parts.size() >= 2 && parts[0] == "stub") {
        gw.backend = GatewayConfig::Backend::Stub;
        gw.model_name = "stub";
        StubPolicy policy;
        if (parts[1] == "majority-echo") {
            policy.kind = StubPolicy::Kind::MajorityEcho;
        } else if (parts[1] == "shot-echo") {
            policy.kind = StubPolicy::Kind::ShotEcho;
        } else if (parts[1] == "constant" && parts.size() == 3) {
            policy.kind = StubPolicy::Kind::ConstantText;
            policy.constant_text = std::string(label_word(label_from_word(parts[2])));
        } else {
            throw UsageError("unknown stub gateway spec: '" + spec + "'");
        }
        gw.stub_policy = policy;
        return gw;
    }
    throw UsageError("unknown gateway spec: '" + spec +
                     "' (expected remote, stub:constant:<Label>, stub:majority-echo or "
                     "stub:shot-echo)");
}

void write_run_config_json(const RunConfig& config) {
    json doc;
    doc["fingerprint"] = config.fingerprint();
    doc["canonical"] = config.canonical();
    fs::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "run_config.json", std::ios::binary);
    out << doc.dump(2) << "\n";
}

void write_reports_and_aggregates(const RunConfig& config,
                                  const std::vector<GeneralistRun>& runs,
                                  const std::vector<const ShotSet*>& shots) {
    const std::string fp = config.fingerprint();
    std::vector<DeveloperReport> reports;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const GeneralistRun& run = runs[i];
        const std::string stem = run.method + "_" + sanitize_filename(run.developer_id);
        write_run_json(config.out_dir / "runs" / (stem + ".json"), run, config, shots[i]);
        DeveloperReport report = make_report(run, fp);
        write_report_json(config.out_dir / "reports" / (stem + ".json"), report, config);
        reports.push_back(std::move(report));
    }
    write_aggregate_csv(config.out_dir / "aggregate.csv", aggregate_developers(reports), fp);
    for (ReadabilityLabel label : kAllLabels) {
        std::string lower(label_word(label));
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        write_distribution_csv(config.out_dir / ("f1_" + lower + ".csv"),
                               export_f1_distribution(reports, label), fp);
    }
    write_run_config_json(config);
}

int cmd_validate(const std::string& dataset_path) {
    Dataset ds = load_dataset(dataset_path);
    std::cout << "dataset '" << ds.name << "': " << ds.matrix.snippet_count() << " snippets x "
              << ds.matrix.developer_count() << " developers, " << ds.matrix.rating_count()
              << " ratings, " << (ds.matrix.dense() ? "dense" : "sparse")
              << ", granularity=" << granularity_word(ds.granularity) << "\n";
    return 0;
}

int cmd_features_export(RunConfig config) {
    Dataset ds = load_dataset(config.dataset_path);
    config.dataset_name = ds.name;
    config.command = "features-export";
    fs::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "features.csv", std::ios::binary);
    if (!out) throw DataError("cannot write features.csv under " + config.out_dir.string());
    write_features_csv(out, ds.snippets, artifact_fingerprint(config.fingerprint(), "features.csv"));
    std::cout << "wrote " << (config.out_dir / "features.csv").string() << " (" << ds.snippets.size()
              << " rows)\n";
    return 0;
}

int cmd_run_generalist(RunConfig config, const std::string& method_word) {
    Dataset ds = load_dataset(config.dataset_path);
    config.dataset_name = ds.name;
    if (!ds.matrix.dense()) throw DataError("generalist protocols require a dense matrix");

    const std::vector<std::string>& devs = ds.matrix.developer_ids();
    std::vector<GeneralistRun> runs(devs.size());
    if (method_word == "feature") {
        config.method = kMethodFeatureModel;
        parallel_for(config.jobs, devs.size(), [&](std::size_t i) {
            runs[i] = eval_feature_generalist(ds, devs[i], config.hp, config.seed);
        });
    } else if (method_word == "oracle") {
        config.method = kMethodOptimalOracle;
        parallel_for(config.jobs, devs.size(), [&](std::size_t i) {
            runs[i] = eval_optimal_oracle(ds, devs[i], config.oracle_excludes_target);
        });
    } else if (method_word == "llm") {
        config.method = kMethodLlmZeroShot;
        Gateway gateway(config.gateway);
        if (config.gateway.stub_policy &&
            config.gateway.stub_policy->kind == StubPolicy::Kind::MajorityEcho) {
            gateway.set_majority_table(majority_table(ds));
        }
        parallel_for(config.jobs, devs.size(),
                     [&](std::size_t i) { runs[i] = eval_llm_generalist(gateway, ds, devs[i]); });
    } else {
        throw UsageError("unknown generalist method: '" + method_word + "'");
    }

    std::vector<const ShotSet*> no_shots(runs.size(), nullptr);
    write_reports_and_aggregates(config, runs, no_shots);
    std::cout << "generalist run (" << config.method << ") complete: " << runs.size()
              << " developers, fingerprint " << config.fingerprint() << "\n";
    return 0;
}

int cmd_run_personalized(RunConfig config, const std::string& ssa_word) {
    Dataset ds = load_dataset(config.dataset_path);
    config.dataset_name = ds.name;
    ShotAlgorithm algorithm = shot_algorithm_from_word(ssa_word);
    config.method = std::string("personalized_") + std::string(shot_algorithm_word(algorithm));

    Gateway gateway(config.gateway);
    if (config.gateway.stub_policy &&
        config.gateway.stub_policy->kind == StubPolicy::Kind::MajorityEcho) {
        gateway.set_majority_table(majority_table(ds));
    }
    std::vector<ShotSet> shot_sets;
    std::vector<GeneralistRun> runs = eval_personalized(gateway, ds, algorithm, config.seed,
                                                        config.jobs, config.k_shots, &shot_sets);
    check_shot_exclusion(runs, shot_sets);

    std::vector<const ShotSet*> shots;
    shots.reserve(shot_sets.size());
    for (const ShotSet& s : shot_sets) shots.push_back(&s);
    write_reports_and_aggregates(config, runs, shots);
    std::cout << "personalized run (" << config.method << ") complete: " << runs.size()
              << " developers, fingerprint " << config.fingerprint() << "\n";
    return 0;
}

int cmd_shots_show(const RunConfig& config, const std::string& ssa_word,
                   const std::string& developer_id, const std::string& dump_prompt_for) {
    Dataset ds = load_dataset(config.dataset_path);
    ShotAlgorithm algorithm = shot_algorithm_from_word(ssa_word);
    ShotSet set = select_shots(ds.matrix, algorithm, developer_id, config.seed, config.k_shots);

    json doc;
    doc["algorithm"] = std::string(shot_algorithm_word(set.algorithm));
    doc["realistic"] = is_realistic(set.algorithm);
    doc["developer"] = set.developer_id;
    if (set.algorithm == ShotAlgorithm::HVL) {
        doc["label_coverage_incomplete"] = set.label_coverage_incomplete;
    }
    if (set.seed) {
        doc["seed"] = *set.seed;
    } else {
        doc["seed"] = nullptr;
    }
    json list = json::array();
    for (const Shot& shot : set.shots) {
        list.push_back({{"snippet", shot.snippet_id},
                        {"label", std::string(label_word(shot.label))},
                        {"criterion", shot.criterion}});
    }
    doc["shots"] = std::move(list);
    std::cout << doc.dump(2) << "\n";

    if (!dump_prompt_for.empty()) {
        std::string prompt = build_personalized_prompt(ds, set, ds.snippet(dump_prompt_for));
        std::cout << "--- prompt for " << dump_prompt_for << " ---\n"
                  << prompt << "\n--- prompt_hash: " << content_hash(prompt) << " ---\n";
    }
    return 0;
}

int cmd_consistency_sample(RunConfig config, long n, bool unique_pairs) {
    Dataset ds = load_dataset(config.dataset_path);
    config.dataset_name = ds.name;
    std::vector<PairSample> pairs = sample_pairs(ds.matrix, n, config.seed, unique_pairs);
    fs::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "pairs.json", std::ios::binary);
    std::string artifact_name =
        "pairs.json:" + std::to_string(n) + (unique_pairs ? ":unique" : "");
    write_pairs_json(out, pairs, ds.name,
                     artifact_fingerprint(config.fingerprint(), artifact_name));
    std::cout << "sampled " << pairs.size() << " pairs into "
              << (config.out_dir / "pairs.json").string() << "\n";
    return 0;
}

int cmd_consistency_annotate(const RunConfig& config, const std::string& pairs_file,
                             const std::string& annotator_id) {
    Dataset ds = load_dataset(config.dataset_path);
    std::ifstream in(pairs_file);
    if (!in) throw DataError("cannot open pairs file: " + pairs_file);
    std::vector<PairSample> pairs = read_pairs_json(in);
    fs::create_directories(config.out_dir);
    fs::path verdicts = config.out_dir / ("verdicts_" + sanitize_filename(annotator_id) + ".jsonl");
    SessionResult result = annotate_session(pairs, ds, annotator_id, verdicts, std::cin, std::cout);
    std::cout << "\nsession done: " << result.answered << " answered, " << result.skipped
              << " skipped, " << result.already_done << " previously answered ("
              << verdicts.string() << ")\n";
    return 0;
}

json record_to_json(const AnnotationRecord& rec) {
    json j;
    j["pair_id"] = rec.pair_id;
    auto put = [&j](const char* key, const std::optional<Verdict>& v) {
        if (v) {
            j[key] = std::string(verdict_word(*v));
        } else {
            j[key] = nullptr;
        }
    };
    put("verdict_a", rec.verdict_a);
    put("verdict_b", rec.verdict_b);
    put("tiebreak", rec.tiebreak);
    put("final", rec.final);
    return j;
}

int cmd_consistency_merge(const RunConfig& config, const std::string& file_a,
                          const std::string& file_b, const std::string& file_t) {
    std::vector<VerdictEntry> a = read_verdict_file(file_a);
    std::vector<VerdictEntry> b = read_verdict_file(file_b);
    std::vector<VerdictEntry> t =
        file_t.empty() ? std::vector<VerdictEntry>{} : read_verdict_file(file_t);
    MergeResult merged = merge_with_tiebreak(a, b, t);

    json doc;
    json records = json::array();
    for (const AnnotationRecord& rec : merged.records) records.push_back(record_to_json(rec));
    doc["records"] = std::move(records);
    doc["disagreements"] = merged.disagreements;
    doc["pending"] = merged.pending;
    // content-addressed: equal fingerprints imply identical verdict inputs
    doc["fingerprint"] = content_hash(slurp(file_a) + "\x1f" + slurp(file_b) + "\x1f" +
                                      (file_t.empty() ? "" : slurp(file_t)));
    fs::create_directories(config.out_dir);
    std::ofstream out(config.out_dir / "merged.json", std::ios::binary);
    out << doc.dump(2) << "\n";
    std::cout << "merged " << merged.records.size() << " pairs: " << merged.disagreements.size()
              << " disagreements, " << merged.pending.size() << " pending\n";
    return 0;
}

int cmd_consistency_report(const RunConfig& config, const std::string& merged_file,
                           bool write_out) {
    std::ifstream in(merged_file);
    if (!in) throw DataError("cannot open merged file: " + merged_file);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed merged file: ") + e.what());
    }
    std::vector<AnnotationRecord> records;
    try {
        for (const json& item : doc.at("records")) {
            AnnotationRecord rec;
            rec.pair_id = item.at("pair_id").get<long>();
            auto get = [&item](const char* key) -> std::optional<Verdict> {
                if (!item.contains(key) || item.at(key).is_null()) return std::nullopt;
                return verdict_from_word(item.at(key).get<std::string>());
            };
            rec.verdict_a = get("verdict_a");
            rec.verdict_b = get("verdict_b");
            rec.tiebreak = get("tiebreak");
            rec.final = get("final");
            records.push_back(rec);
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed merged file: ") + e.what());
    }
    double rate = inconsistency_rate(records);
    long inconsistent = 0;
    for (const AnnotationRecord& rec : records) {
        if (rec.final && *rec.final == Verdict::Inconsistent) ++inconsistent;
    }
    json report;
    report["total"] = records.size();
    report["inconsistent"] = inconsistent;
    report["rate_percent"] = rate;
    report["disagreements"] = doc.value("disagreements", json::array());
    report["fingerprint"] = content_hash(slurp(merged_file));
    std::cout << report.dump(2) << "\n";
    if (write_out) {
        fs::create_directories(config.out_dir);
        std::ofstream out(config.out_dir / "consistency_report.json", std::ios::binary);
        out << report.dump(2) << "\n";
    }
    return 0;
}

int cmd_report_aggregate(const RunConfig& config, const std::string& reports_dir) {
    std::vector<fs::path> files;
    if (!fs::is_directory(reports_dir)) throw DataError("not a directory: " + reports_dir);
    for (const auto& entry : fs::directory_iterator(reports_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw DataError("no report JSON files in " + reports_dir);
    std::vector<DeveloperReport> reports;
    for (const fs::path& file : files) reports.push_back(read_report_json(file));

    const std::string fp = reports.front().run_fingerprint;
    MeanTable table = aggregate_developers(reports);
    fs::create_directories(config.out_dir);
    write_aggregate_csv(config.out_dir / "aggregate.csv", table, fp);
    for (ReadabilityLabel label : kAllLabels) {
        std::string lower(label_word(label));
        for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        write_distribution_csv(config.out_dir / ("f1_" + lower + ".csv"),
                               export_f1_distribution(reports, label), fp);
    }
    std::cout << "aggregated " << reports.size() << " developer reports into "
              << config.out_dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"readlab: personalized code readability assessment workbench"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_file;
    std::string gateway_spec;

    auto add_common = [&](CLI::App* cmd, bool with_out) {
        cmd->add_option("--dataset", config.dataset_path, "Dataset directory")->required();
        if (with_out) {
            cmd->add_option("--out", config.out_dir, "Output directory (all artifacts go here)")
                ->required();
        }
        cmd->add_option("--seed", config.seed, "Seed for every random choice in the run");
        cmd->add_option("--config", config_file, "Key=value config file (flags override it)");
    };
    auto add_gateway = [&](CLI::App* cmd) {
        cmd->add_option("--gateway", gateway_spec,
                        "Gateway spec: stub:constant:<Label>, stub:majority-echo, "
                        "stub:shot-echo or remote");
        cmd->add_option("--model", config.gateway.model_name, "Model name for the remote backend");
        cmd->add_option("--endpoint", config.gateway.endpoint,
                        "Chat-completion endpoint URL (remote backend)");
        cmd->add_option("--cache-dir", config.gateway.cache_dir,
                        "On-disk completion cache directory");
        cmd->add_option("--max-retries", config.gateway.max_retries,
                        "Retry budget for transport failures and unparseable completions");
        cmd->add_option("--jobs", config.jobs, "Max concurrent per-developer evaluations");
    };

    std::string dataset_arg;
    CLI::App* validate = app.add_subcommand("validate", "Load a dataset and print its dimensions");
    validate->add_option("dataset", dataset_arg, "Dataset directory")->required();

    CLI::App* features = app.add_subcommand("features", "Feature extraction commands");
    CLI::App* features_export =
        features->add_subcommand("export", "Extract the feature catalog for every snippet as CSV");
    add_common(features_export, true);

    CLI::App* run = app.add_subcommand("run", "Evaluation protocol runs");
    std::string method_word;
    CLI::App* run_generalist = run->add_subcommand(
        "generalist", "Evaluate generalist predictors against every developer's own labels");
    add_common(run_generalist, true);
    add_gateway(run_generalist);
    run_generalist->add_option("--method", method_word, "Predictor: feature, llm or oracle")
        ->required();
    run_generalist->add_flag("--oracle-excludes-target", config.oracle_excludes_target,
                             "Exclude the target developer's own vote from the oracle mode");
    run_generalist->add_option("--learning-rate", config.hp.learning_rate,
                               "Gradient-descent learning rate (feature method)");
    run_generalist->add_option("--l2", config.hp.l2_strength, "L2 regularization strength");
    run_generalist->add_option("--max-epochs", config.hp.max_epochs, "Gradient-descent epoch cap");
    run_generalist->add_option("--tolerance", config.hp.convergence_tolerance,
                               "Stop when the loss improves less than this");

    std::string ssa_word;
    CLI::App* run_personalized = run->add_subcommand(
        "personalized", "Few-shot personalized evaluation over the shot-exclusion test set");
    add_common(run_personalized, true);
    add_gateway(run_personalized);
    run_personalized->add_option("--ssa", ssa_word, "Shot selection algorithm: hv, hvl or r")
        ->required();
    run_personalized->add_option("--k", config.k_shots, "Number of shots per developer");

    CLI::App* shots = app.add_subcommand("shots", "Shot selection inspection");
    std::string developer_id;
    std::string dump_prompt_for;
    std::string shots_ssa_word;
    CLI::App* shots_show =
        shots->add_subcommand("show", "Print one developer's selected shots as JSON");
    add_common(shots_show, false);
    shots_show->add_option("--ssa", shots_ssa_word, "Shot selection algorithm: hv, hvl or r")
        ->required();
    shots_show->add_option("--developer", developer_id, "Developer id")->required();
    shots_show->add_option("--k", config.k_shots, "Number of shots per developer");
    shots_show->add_option("--dump-prompt-for", dump_prompt_for,
                           "Also print the personalized prompt for this target snippet");

    CLI::App* consistency = app.add_subcommand("consistency", "Rating consistency audit tooling");
    long pair_count = 384;
    bool unique_pairs = false;
    CLI::App* c_sample = consistency->add_subcommand(
        "sample", "Draw snippet pairs with one developer's two ratings each");
    add_common(c_sample, true);
    c_sample->add_option("--n", pair_count, "Number of pairs to draw");
    c_sample->add_flag("--unique-pairs", unique_pairs,
                       "Never draw the same unordered snippet pair twice");

    std::string pairs_file, annotator_id;
    CLI::App* c_annotate =
        consistency->add_subcommand("annotate", "Interactive consistency annotation session");
    add_common(c_annotate, true);
    c_annotate->add_option("--pairs", pairs_file, "pairs.json from `consistency sample`")
        ->required();
    c_annotate->add_option("--annotator", annotator_id, "Annotator id")->required();

    std::string file_a, file_b, file_t;
    CLI::App* c_merge = consistency->add_subcommand(
        "merge", "Merge two annotators' verdicts, resolving disagreements with tiebreaks");
    c_merge->add_option("--a", file_a, "First annotator's verdict file")->required();
    c_merge->add_option("--b", file_b, "Second annotator's verdict file")->required();
    c_merge->add_option("--tiebreaks", file_t, "Tiebreaker's verdict file");
    c_merge->add_option("--out", config.out_dir, "Output directory")->required();

    std::string merged_file;
    CLI::App* c_report =
        consistency->add_subcommand("report", "Inconsistency statistics from a merged file");
    c_report->add_option("--merged", merged_file, "merged.json from `consistency merge`")
        ->required();
    c_report->add_option("--out", config.out_dir, "Also write consistency_report.json here");

    CLI::App* report = app.add_subcommand("report", "Report post-processing");
    std::string reports_dir;
    CLI::App* report_aggregate = report->add_subcommand(
        "aggregate", "Mean table and F1 distributions from per-developer report JSONs");
    report_aggregate->add_option("--reports", reports_dir, "Directory of report JSON files")
        ->required();
    report_aggregate->add_option("--out", config.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        // Config-file values fill in whatever flags the user did not pass.
        if (!config_file.empty()) {
            CLI::App* active = nullptr;
            for (CLI::App* cmd : {features_export, run_generalist, run_personalized, shots_show,
                                  c_sample, c_annotate}) {
                if (cmd->parsed()) active = cmd;
            }
            std::map<std::string, std::string> entries = parse_config_file(config_file);
            if (active) {
                static const std::pair<const char*, const char*> kFlagKeys[] = {
                    {"--seed", "seed"},
                    {"--jobs", "jobs"},
                    {"--k", "k_shots"},
                    {"--learning-rate", "learning_rate"},
                    {"--l2", "l2_strength"},
                    {"--max-epochs", "max_epochs"},
                    {"--tolerance", "convergence_tolerance"},
                    {"--model", "model"},
                    {"--endpoint", "endpoint"},
                    {"--max-retries", "max_retries"},
                    {"--cache-dir", "cache_dir"},
                    {"--oracle-excludes-target", "oracle_excludes_target"},
                };
                for (const auto& [flag, key] : kFlagKeys) {
                    const CLI::Option* opt = active->get_option_no_throw(flag);
                    if (opt != nullptr && opt->count() > 0) entries.erase(key);
                }
            }
            apply_config_entries(config, entries);
        }

        auto resolve_gateway = [&](StubPolicy::Kind default_kind) {
            if (!gateway_spec.empty()) {
                GatewayConfig parsed = parse_gateway_spec(gateway_spec);
                parsed.cache_dir = config.gateway.cache_dir;
                parsed.max_retries = config.gateway.max_retries;
                parsed.request_timeout = config.gateway.request_timeout;
                parsed.max_concurrent_requests = config.gateway.max_concurrent_requests;
                if (parsed.backend == GatewayConfig::Backend::RemoteHttp) {
                    parsed.endpoint = config.gateway.endpoint;
                    if (config.gateway.model_name != "stub") {
                        parsed.model_name = config.gateway.model_name;
                    }
                }
                config.gateway = parsed;
            } else if (!config.gateway.stub_policy) {
                // no network call ever happens without an explicit remote spec
                config.gateway.stub_policy = StubPolicy{default_kind, "Readable"};
            }
        };

        if (validate->parsed()) return cmd_validate(dataset_arg);
        if (features_export->parsed()) return cmd_features_export(config);
        if (run_generalist->parsed()) {
            resolve_gateway(StubPolicy::Kind::MajorityEcho);
            config.command = "run-generalist";
            return cmd_run_generalist(config, method_word);
        }
        if (run_personalized->parsed()) {
            resolve_gateway(StubPolicy::Kind::ShotEcho);
            config.command = "run-personalized";
            return cmd_run_personalized(config, ssa_word);
        }
        if (shots_show->parsed()) {
            return cmd_shots_show(config, shots_ssa_word, developer_id, dump_prompt_for);
        }
        if (c_sample->parsed()) {
            config.command = "consistency";
            return cmd_consistency_sample(config, pair_count, unique_pairs);
        }
        if (c_annotate->parsed()) {
            config.command = "consistency";
            return cmd_consistency_annotate(config, pairs_file, annotator_id);
        }
        if (c_merge->parsed()) return cmd_consistency_merge(config, file_a, file_b, file_t);
        if (c_report->parsed()) {
            return cmd_consistency_report(config, merged_file, !config.out_dir.empty());
        }
        if (report_aggregate->parsed()) {
            config.command = "report-aggregate";
            return cmd_report_aggregate(config, reports_dir);
        }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const GatewayError& e) {
        std::cerr << "gateway error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
