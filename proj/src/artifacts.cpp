#include "readlab/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "readlab/hash.hpp"
#include "readlab/prompts.hpp"

namespace readlab {

using json = nlohmann::json;

std::string artifact_fingerprint(const std::string& run_fingerprint,
                                 const std::string& artifact_name) {
    return content_hash(run_fingerprint + "|" + artifact_name);
}

DeveloperReport make_report(const GeneralistRun& run, const std::string& run_fingerprint) {
    if (run.predictions.size() != run.truth.size()) {
        throw DataError("make_report: prediction/truth key sets differ");
    }
    std::vector<ReadabilityLabel> truth, predictions;
    truth.reserve(run.truth.size());
    predictions.reserve(run.truth.size());
    for (const auto& [snippet_id, truth_label] : run.truth) {
        auto it = run.predictions.find(snippet_id);
        if (it == run.predictions.end()) {
            throw DataError("make_report: prediction missing for snippet '" + snippet_id + "'");
        }
        truth.push_back(truth_label);
        predictions.push_back(it->second);
    }
    ConfusionMatrix cm = confusion(truth, predictions);

    DeveloperReport report;
    report.developer_id = run.developer_id;
    report.dataset_id = run.dataset_id;
    report.method = run.method;
    report.run_fingerprint = run_fingerprint;
    for (ReadabilityLabel label : kAllLabels) {
        report.per_label[static_cast<std::size_t>(label)] = label_metrics(cm, label);
    }
    report.macro_precision = (report.per_label[0].precision + report.per_label[1].precision +
                              report.per_label[2].precision) /
                             3.0;
    report.macro_recall =
        (report.per_label[0].recall + report.per_label[1].recall + report.per_label[2].recall) / 3.0;
    report.macro_f1 = (report.per_label[0].f1 + report.per_label[1].f1 + report.per_label[2].f1) / 3.0;
    report.accuracy = cm.total() == 0
                          ? 0.0
                          : static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
    report.abstention_count = static_cast<long>(run.abstentions.size());
    return report;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write artifact: " + path.string());
    out << body;
}

json label_map_to_json(const std::map<std::string, ReadabilityLabel>& labels) {
    json out = json::object();
    for (const auto& [id, label] : labels) out[id] = std::string(label_word(label));
    return out;
}

std::string fmt6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

void write_run_json(const std::filesystem::path& path, const GeneralistRun& run,
                    const RunConfig& config, const ShotSet* shots) {
    json doc;
    doc["dataset"] = run.dataset_id;
    doc["developer"] = run.developer_id;
    doc["method"] = run.method;
    doc["run_fingerprint"] = config.fingerprint();
    doc["fingerprint"] = artifact_fingerprint(config.fingerprint(), path.filename().string());
    doc["predictions"] = label_map_to_json(run.predictions);
    doc["truth"] = label_map_to_json(run.truth);
    doc["abstentions"] = run.abstentions;
    doc["config"] = {
        {"seed", config.seed},
        {"gateway", config.gateway.describe()},
        {"prompt_schema_hash", prompt_schema_hash()},
        {"hyperparams",
         {{"learning_rate", config.hp.learning_rate},
          {"l2_strength", config.hp.l2_strength},
          {"max_epochs", config.hp.max_epochs},
          {"convergence_tolerance", config.hp.convergence_tolerance}}},
    };
    if (shots) {
        json list = json::array();
        for (const Shot& shot : shots->shots) {
            list.push_back({{"snippet", shot.snippet_id},
                            {"label", std::string(label_word(shot.label))},
                            {"criterion", shot.criterion}});
        }
        doc["shots"] = std::move(list);
        doc["shot_algorithm"] = std::string(shot_algorithm_word(shots->algorithm));
        if (shots->seed) doc["shot_seed"] = *shots->seed;
    }
    write_text(path, doc.dump(2) + "\n");
}

void write_report_json(const std::filesystem::path& path, const DeveloperReport& report,
                       const RunConfig& config) {
    json labels = json::object();
    for (ReadabilityLabel label : kAllLabels) {
        const LabelMetrics& m = report.per_label[static_cast<std::size_t>(label)];
        labels[std::string(label_word(label))] = {
            {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
    }
    json doc;
    doc["dataset"] = report.dataset_id;
    doc["developer"] = report.developer_id;
    doc["method"] = report.method;
    doc["run_fingerprint"] = report.run_fingerprint;
    doc["fingerprint"] = artifact_fingerprint(report.run_fingerprint, path.filename().string());
    doc["labels"] = std::move(labels);
    doc["macro"] = {{"precision", report.macro_precision},
                    {"recall", report.macro_recall},
                    {"f1", report.macro_f1}};
    doc["accuracy"] = report.accuracy;
    doc["abstentions"] = report.abstention_count;
    (void)config;
    write_text(path, doc.dump(2) + "\n");
}

DeveloperReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open report: " + path.string());
    json doc;
    try {
        doc = json::parse(in);
        DeveloperReport report;
        report.developer_id = doc.at("developer").get<std::string>();
        report.dataset_id = doc.at("dataset").get<std::string>();
        report.method = doc.at("method").get<std::string>();
        report.run_fingerprint = doc.at("run_fingerprint").get<std::string>();
        for (ReadabilityLabel label : kAllLabels) {
            const json& m = doc.at("labels").at(std::string(label_word(label)));
            LabelMetrics& lm = report.per_label[static_cast<std::size_t>(label)];
            lm.precision = m.at("precision").get<double>();
            lm.recall = m.at("recall").get<double>();
            lm.f1 = m.at("f1").get<double>();
            lm.support = m.at("support").get<long>();
        }
        report.macro_precision = doc.at("macro").at("precision").get<double>();
        report.macro_recall = doc.at("macro").at("recall").get<double>();
        report.macro_f1 = doc.at("macro").at("f1").get<double>();
        report.accuracy = doc.at("accuracy").get<double>();
        report.abstention_count = doc.at("abstentions").get<long>();
        return report;
    } catch (const json::exception& e) {
        throw DataError("malformed report " + path.string() + ": " + e.what());
    }
}

void write_aggregate_csv(const std::filesystem::path& path, const MeanTable& table,
                         const std::string& run_fingerprint) {
    static const char* kRows[] = {"Unreadable", "Neutral", "Readable", "Average"};
    std::string body = "# fingerprint=" +
                       artifact_fingerprint(run_fingerprint, path.filename().string()) + "\n";
    body += "label,precision,recall,f1\n";
    for (std::size_t r = 0; r < 4; ++r) {
        body += kRows[r];
        for (std::size_t c = 0; c < 3; ++c) body += "," + fmt6(table.cells[r][c]);
        body += "\n";
    }
    write_text(path, body);
}

void write_distribution_csv(const std::filesystem::path& path,
                            const std::vector<std::pair<std::string, double>>& rows,
                            const std::string& run_fingerprint) {
    std::string body = "# fingerprint=" +
                       artifact_fingerprint(run_fingerprint, path.filename().string()) + "\n";
    body += "developer_id,f1\n";
    for (const auto& [developer_id, f1] : rows) {
        body += developer_id + "," + fmt6(f1) + "\n";
    }
    write_text(path, body);
}

void check_shot_exclusion(const std::vector<GeneralistRun>& runs,
                          const std::vector<ShotSet>& shot_sets) {
    std::set<std::string> shot_ids;
    for (const ShotSet& set : shot_sets) {
        for (const Shot& shot : set.shots) shot_ids.insert(shot.snippet_id);
    }
    for (const GeneralistRun& run : runs) {
        for (const auto& [snippet_id, label] : run.predictions) {
            (void)label;
            if (shot_ids.count(snippet_id)) {
                throw DataError("shot-exclusion violated: snippet '" + snippet_id +
                                "' was evaluated for developer '" + run.developer_id +
                                "' but is a shot");
            }
        }
        for (const std::string& snippet_id : run.abstentions) {
            if (shot_ids.count(snippet_id)) {
                throw DataError("shot-exclusion violated: abstained snippet '" + snippet_id +
                                "' is a shot");
            }
        }
    }
}

}  // namespace readlab
