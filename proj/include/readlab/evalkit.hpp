#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "readlab/corpus.hpp"

namespace readlab {

struct ConfusionMatrix {
    // counts[truth][predicted]
    std::array<std::array<long, 3>, 3> counts{};

    long total() const;
    long trace() const;
    long row_total(ReadabilityLabel truth) const;
    long column_total(ReadabilityLabel predicted) const;
};

ConfusionMatrix confusion(const std::vector<ReadabilityLabel>& truth,
                          const std::vector<ReadabilityLabel>& predictions);

struct LabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    long support = 0;
};

// Zero-division convention: an undefined precision/recall is reported as 0.
LabelMetrics label_metrics(const ConfusionMatrix& cm, ReadabilityLabel label);

struct DeveloperReport {
    std::string developer_id;
    std::string dataset_id;
    std::string method;
    std::string run_fingerprint;
    std::array<LabelMetrics, 3> per_label{};  // indexed by label enum value
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
    long abstention_count = 0;
};

// Mean table in the report layout: rows Unreadable/Neutral/Readable/Average,
// columns precision/recall/f1, unweighted means across developers.
struct MeanTable {
    std::array<std::array<double, 3>, 4> cells{};

    static constexpr std::size_t kAverageRow = 3;
};

// Throws DataError on an empty input or when reports mix run configurations.
MeanTable aggregate_developers(const std::vector<DeveloperReport>& reports);

std::vector<std::pair<std::string, double>> export_f1_distribution(
    const std::vector<DeveloperReport>& reports, ReadabilityLabel label);

}  // namespace readlab
