#include "readlab/evalkit.hpp"

namespace readlab {

long ConfusionMatrix::total() const {
    long n = 0;
    for (const auto& row : counts) {
        for (long c : row) n += c;
    }
    return n;
}

long ConfusionMatrix::trace() const {
    return counts[0][0] + counts[1][1] + counts[2][2];
}

long ConfusionMatrix::row_total(ReadabilityLabel truth) const {
    long n = 0;
    for (long c : counts[static_cast<std::size_t>(truth)]) n += c;
    return n;
}

long ConfusionMatrix::column_total(ReadabilityLabel predicted) const {
    long n = 0;
    for (const auto& row : counts) n += row[static_cast<std::size_t>(predicted)];
    return n;
}

ConfusionMatrix confusion(const std::vector<ReadabilityLabel>& truth,
                          const std::vector<ReadabilityLabel>& predictions) {
    if (truth.size() != predictions.size()) {
        throw DataError("confusion: truth and prediction lengths differ");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++cm.counts[static_cast<std::size_t>(truth[i])][static_cast<std::size_t>(predictions[i])];
    }
    return cm;
}

LabelMetrics label_metrics(const ConfusionMatrix& cm, ReadabilityLabel label) {
    const std::size_t i = static_cast<std::size_t>(label);
    const long tp = cm.counts[i][i];
    const long col = cm.column_total(label);
    const long row = cm.row_total(label);
    LabelMetrics m;
    m.support = row;
    m.precision = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
    m.recall = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
    m.f1 = (m.precision + m.recall) == 0.0 ? 0.0
                                           : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

MeanTable aggregate_developers(const std::vector<DeveloperReport>& reports) {
    if (reports.empty()) throw DataError("aggregate_developers: no reports");
    for (const DeveloperReport& r : reports) {
        if (r.run_fingerprint != reports.front().run_fingerprint) {
            throw DataError("aggregate_developers: mixed run configurations (fingerprints differ)");
        }
    }
    MeanTable table;
    const double n = static_cast<double>(reports.size());
    for (const DeveloperReport& r : reports) {
        for (std::size_t label = 0; label < 3; ++label) {
            table.cells[label][0] += r.per_label[label].precision;
            table.cells[label][1] += r.per_label[label].recall;
            table.cells[label][2] += r.per_label[label].f1;
        }
        table.cells[MeanTable::kAverageRow][0] += r.macro_precision;
        table.cells[MeanTable::kAverageRow][1] += r.macro_recall;
        table.cells[MeanTable::kAverageRow][2] += r.macro_f1;
    }
    for (auto& row : table.cells) {
        for (double& cell : row) cell /= n;
    }
    return table;
}

std::vector<std::pair<std::string, double>> export_f1_distribution(
    const std::vector<DeveloperReport>& reports, ReadabilityLabel label) {
    if (reports.empty()) throw DataError("export_f1_distribution: no reports");
    std::vector<std::pair<std::string, double>> rows;
    rows.reserve(reports.size());
    for (const DeveloperReport& r : reports) {
        rows.emplace_back(r.developer_id, r.per_label[static_cast<std::size_t>(label)].f1);
    }
    return rows;
}

}  // namespace readlab
