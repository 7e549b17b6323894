#include "readlab/consistency.hpp"

#include <algorithm>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "readlab/util.hpp"

namespace readlab {

using json = nlohmann::json;

std::vector<PairSample> sample_pairs(const RatingMatrix& matrix, long n, std::uint64_t seed,
                                     bool unique_pairs) {
    if (!matrix.dense()) throw DataError("sample_pairs: matrix must be dense");
    if (matrix.snippet_count() < 2) throw DataError("sample_pairs: need at least 2 snippets");
    if (n <= 0) throw DataError("sample_pairs: n must be positive");
    const std::size_t snippets = matrix.snippet_count();
    const std::size_t devs = matrix.developer_count();
    if (devs == 0) throw DataError("sample_pairs: matrix has no developers");

    const std::size_t max_unique = snippets * (snippets - 1) / 2;
    if (unique_pairs && static_cast<std::size_t>(n) > max_unique) {
        throw DataError("sample_pairs: not enough distinct snippet pairs for unique mode");
    }

    std::mt19937_64 rng(seed);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    std::vector<PairSample> pairs;
    pairs.reserve(static_cast<std::size_t>(n));
    while (pairs.size() < static_cast<std::size_t>(n)) {
        std::size_t x = static_cast<std::size_t>(rng() % snippets);
        std::size_t y = static_cast<std::size_t>(rng() % (snippets - 1));
        if (y >= x) ++y;  // uniform over the n-1 snippets other than x
        std::size_t d = static_cast<std::size_t>(rng() % devs);
        if (unique_pairs) {
            auto key = std::minmax(x, y);
            if (!seen.insert({key.first, key.second}).second) continue;
        }
        PairSample p;
        p.pair_id = static_cast<long>(pairs.size()) + 1;
        p.snippet_x = matrix.snippet_ids()[x];
        p.snippet_y = matrix.snippet_ids()[y];
        p.developer_id = matrix.developer_ids()[d];
        p.score_x = matrix.rating(x, d)->value();
        p.score_y = matrix.rating(y, d)->value();
        p.label_x = map_score_to_label(LikertScore(p.score_x));
        p.label_y = map_score_to_label(LikertScore(p.score_y));
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void write_pairs_json(std::ostream& out, const std::vector<PairSample>& pairs,
                      const std::string& dataset_id, const std::string& fingerprint) {
    json doc;
    doc["dataset"] = dataset_id;
    if (!fingerprint.empty()) doc["fingerprint"] = fingerprint;
    json list = json::array();
    for (const PairSample& p : pairs) {
        list.push_back({
            {"pair_id", p.pair_id},
            {"snippet_x", p.snippet_x},
            {"snippet_y", p.snippet_y},
            {"developer_id", p.developer_id},
            {"score_x", p.score_x},
            {"score_y", p.score_y},
            {"label_x", std::string(label_word(p.label_x))},
            {"label_y", std::string(label_word(p.label_y))},
        });
    }
    doc["pairs"] = std::move(list);
    out << doc.dump(2) << "\n";
}

std::vector<PairSample> read_pairs_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed pairs file: ") + e.what());
    }
    std::vector<PairSample> pairs;
    try {
        for (const json& item : doc.at("pairs")) {
            PairSample p;
            p.pair_id = item.at("pair_id").get<long>();
            p.snippet_x = item.at("snippet_x").get<std::string>();
            p.snippet_y = item.at("snippet_y").get<std::string>();
            p.developer_id = item.at("developer_id").get<std::string>();
            p.score_x = item.at("score_x").get<int>();
            p.score_y = item.at("score_y").get<int>();
            p.label_x = label_from_word(item.at("label_x").get<std::string>());
            p.label_y = label_from_word(item.at("label_y").get<std::string>());
            pairs.push_back(std::move(p));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed pairs file: ") + e.what());
    }
    return pairs;
}

std::string_view verdict_word(Verdict v) {
    return v == Verdict::Consistent ? "consistent" : "inconsistent";
}

Verdict verdict_from_word(std::string_view w) {
    if (w == "consistent") return Verdict::Consistent;
    if (w == "inconsistent") return Verdict::Inconsistent;
    throw DataError("unknown verdict word: '" + std::string(w) + "'");
}

std::vector<VerdictEntry> read_verdict_file(const std::filesystem::path& path) {
    std::vector<VerdictEntry> entries;
    std::ifstream in(path);
    if (!in) return entries;  // absent file = empty session
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            json doc = json::parse(line);
            VerdictEntry e;
            e.pair_id = doc.at("pair_id").get<long>();
            e.annotator_id = doc.at("annotator_id").get<std::string>();
            e.verdict = verdict_from_word(doc.at("verdict").get<std::string>());
            e.timestamp = doc.value("timestamp", "");
            entries.push_back(std::move(e));
        } catch (const json::exception& e) {
            throw DataError("corrupted verdict file " + path.string() + " at line " +
                            std::to_string(line_no) + ": " + e.what());
        }
    }
    return entries;
}

void append_verdict(const std::filesystem::path& path, const VerdictEntry& entry) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw DataError("cannot open verdict file for append: " + path.string());
    json doc = {
        {"pair_id", entry.pair_id},
        {"annotator_id", entry.annotator_id},
        {"verdict", std::string(verdict_word(entry.verdict))},
        {"timestamp", entry.timestamp},
    };
    out << doc.dump() << "\n";
    out.flush();
}

namespace {

std::string now_iso8601() {
    std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

}  // namespace

SessionResult annotate_session(const std::vector<PairSample>& pairs, const Dataset& dataset,
                               const std::string& annotator_id,
                               const std::filesystem::path& verdict_file, std::istream& in,
                               std::ostream& out) {
    if (pairs.empty()) throw DataError("annotate_session: no pairs to annotate");

    std::set<long> answered;
    for (const VerdictEntry& e : read_verdict_file(verdict_file)) {
        if (e.annotator_id != annotator_id) {
            throw DataError("verdict file " + verdict_file.string() + " belongs to annotator '" +
                            e.annotator_id + "'");
        }
        answered.insert(e.pair_id);
    }

    SessionResult result;
    result.already_done = static_cast<long>(answered.size());
    for (const PairSample& pair : pairs) {
        if (answered.count(pair.pair_id)) continue;
        out << "\n=== pair " << pair.pair_id << " of " << pairs.size() << " (developer "
            << pair.developer_id << ") ===\n";
        out << "--- snippet " << pair.snippet_x << " rated " << label_word(pair.label_x) << " ("
            << pair.score_x << "/5) ---\n";
        out << dataset.snippet(pair.snippet_x).source << "\n";
        out << "--- snippet " << pair.snippet_y << " rated " << label_word(pair.label_y) << " ("
            << pair.score_y << "/5) ---\n";
        out << dataset.snippet(pair.snippet_y).source << "\n";

        bool decided = false;
        while (!decided) {
            out << "[c]onsistent / [i]nconsistent / [s]kip / [q]uit > " << std::flush;
            std::string answer;
            if (!std::getline(in, answer)) return result;  // input exhausted = quit
            std::string_view a = trim(answer);
            if (a == "c" || a == "consistent") {
                append_verdict(verdict_file,
                               {pair.pair_id, annotator_id, Verdict::Consistent, now_iso8601()});
                ++result.answered;
                decided = true;
            } else if (a == "i" || a == "inconsistent") {
                append_verdict(verdict_file,
                               {pair.pair_id, annotator_id, Verdict::Inconsistent, now_iso8601()});
                ++result.answered;
                decided = true;
            } else if (a == "s" || a == "skip") {
                ++result.skipped;
                decided = true;
            } else if (a == "q" || a == "quit") {
                return result;
            } else {
                out << "unrecognized input '" << answer << "'\n";
            }
        }
    }
    return result;
}

namespace {

std::map<long, Verdict> verdict_map(const std::vector<VerdictEntry>& entries) {
    std::map<long, Verdict> out;
    for (const VerdictEntry& e : entries) out[e.pair_id] = e.verdict;  // last answer wins
    return out;
}

}  // namespace

MergeResult merge_with_tiebreak(const std::vector<VerdictEntry>& verdicts_a,
                                const std::vector<VerdictEntry>& verdicts_b,
                                const std::vector<VerdictEntry>& tiebreaks) {
    std::map<long, Verdict> a = verdict_map(verdicts_a);
    std::map<long, Verdict> b = verdict_map(verdicts_b);
    std::map<long, Verdict> t = verdict_map(tiebreaks);

    if (a.size() != b.size() ||
        !std::equal(a.begin(), a.end(), b.begin(),
                    [](const auto& x, const auto& y) { return x.first == y.first; })) {
        throw DataError("merge_with_tiebreak: verdict files cover different pair ids");
    }

    MergeResult result;
    for (const auto& [pair_id, va] : a) {
        Verdict vb = b.at(pair_id);
        AnnotationRecord rec;
        rec.pair_id = pair_id;
        rec.verdict_a = va;
        rec.verdict_b = vb;
        if (va == vb) {
            if (t.count(pair_id)) {
                throw DataError("merge_with_tiebreak: tiebreak given for pair " +
                                std::to_string(pair_id) + " where annotators agree");
            }
            rec.final = va;
        } else {
            result.disagreements.push_back(pair_id);
            auto it = t.find(pair_id);
            if (it != t.end()) {
                rec.tiebreak = it->second;
                rec.final = it->second;
            } else {
                result.pending.push_back(pair_id);
            }
        }
        result.records.push_back(rec);
    }
    for (const auto& [pair_id, unused] : t) {
        (void)unused;
        if (!a.count(pair_id)) {
            throw DataError("merge_with_tiebreak: tiebreak for unknown pair " +
                            std::to_string(pair_id));
        }
    }
    return result;
}

double inconsistency_rate(const std::vector<AnnotationRecord>& records) {
    if (records.empty()) throw DataError("inconsistency_rate: no records");
    long inconsistent = 0;
    for (const AnnotationRecord& rec : records) {
        if (!rec.final) {
            throw DataError("inconsistency_rate: pair " + std::to_string(rec.pair_id) +
                            " is still pending");
        }
        if (*rec.final == Verdict::Inconsistent) ++inconsistent;
    }
    return 100.0 * static_cast<double>(inconsistent) / static_cast<double>(records.size());
}

}  // namespace readlab
