#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "readlab/corpus.hpp"

namespace readlab {

struct PairSample {
    long pair_id = 0;
    std::string snippet_x;
    std::string snippet_y;  // always != snippet_x
    std::string developer_id;
    int score_x = 0;
    int score_y = 0;
    ReadabilityLabel label_x = ReadabilityLabel::Neutral;
    ReadabilityLabel label_y = ReadabilityLabel::Neutral;
};

// n pairs of distinct snippets, each annotated with one uniformly drawn
// developer's two scores. Pairs repeat across draws unless unique_pairs is
// set, in which case each unordered snippet pair occurs at most once.
std::vector<PairSample> sample_pairs(const RatingMatrix& matrix, long n, std::uint64_t seed,
                                     bool unique_pairs = false);

void write_pairs_json(std::ostream& out, const std::vector<PairSample>& pairs,
                      const std::string& dataset_id, const std::string& fingerprint = "");
std::vector<PairSample> read_pairs_json(std::istream& in);

enum class Verdict { Consistent, Inconsistent };

std::string_view verdict_word(Verdict v);
Verdict verdict_from_word(std::string_view w);

struct VerdictEntry {
    long pair_id = 0;
    std::string annotator_id;
    Verdict verdict = Verdict::Consistent;
    std::string timestamp;  // informational; not part of merge logic
};

// Verdict files are append-only JSON lines so a session can persist after
// every answer and survive being killed.
std::vector<VerdictEntry> read_verdict_file(const std::filesystem::path& path);
void append_verdict(const std::filesystem::path& path, const VerdictEntry& entry);

struct SessionResult {
    long answered = 0;
    long skipped = 0;
    long already_done = 0;
};

// Interactive annotation loop over `in`/`out` (the CLI wires stdin/stdout).
// Shows both snippet sources with the developer's labels, accepts
// consistent/inconsistent/skip/quit, writes one verdict line per answer, and
// resumes past pairs already present in the verdict file.
SessionResult annotate_session(const std::vector<PairSample>& pairs, const Dataset& dataset,
                               const std::string& annotator_id,
                               const std::filesystem::path& verdict_file, std::istream& in,
                               std::ostream& out);

struct AnnotationRecord {
    long pair_id = 0;
    std::optional<Verdict> verdict_a;
    std::optional<Verdict> verdict_b;
    std::optional<Verdict> tiebreak;
    std::optional<Verdict> final;
};

struct MergeResult {
    std::vector<AnnotationRecord> records;    // pair_id ascending
    std::vector<long> disagreements;          // pairs where a and b differed
    std::vector<long> pending;                // disagreements without a tiebreak
};

// Agreements finalize directly; disagreements finalize from the tiebreaks.
// Throws DataError when the two verdict files cover different pair ids or a
// tiebreak targets a pair the annotators agreed on.
MergeResult merge_with_tiebreak(const std::vector<VerdictEntry>& verdicts_a,
                                const std::vector<VerdictEntry>& verdicts_b,
                                const std::vector<VerdictEntry>& tiebreaks);

// 100 * inconsistent / total. Throws DataError when any record lacks a final
// verdict.
double inconsistency_rate(const std::vector<AnnotationRecord>& records);

}  // namespace readlab
