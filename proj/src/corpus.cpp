#include "readlab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "readlab/util.hpp"

namespace readlab {

using json = nlohmann::json;

std::string_view granularity_word(Granularity g) {
    return g == Granularity::Fragment ? "fragment" : "method";
}

Granularity granularity_from_word(std::string_view w) {
    if (w == "fragment") return Granularity::Fragment;
    if (w == "method") return Granularity::Method;
    throw DataError("unknown granularity tag: '" + std::string(w) + "'");
}

std::string_view label_word(ReadabilityLabel label) {
    switch (label) {
        case ReadabilityLabel::Unreadable: return "Unreadable";
        case ReadabilityLabel::Neutral: return "Neutral";
        case ReadabilityLabel::Readable: return "Readable";
    }
    throw DataError("invalid label value");
}

ReadabilityLabel label_from_word(std::string_view word) {
    for (ReadabilityLabel l : kAllLabels) {
        if (word == label_word(l)) return l;
    }
    throw DataError("unknown label word: '" + std::string(word) + "'");
}

LikertScore::LikertScore(int value) : value_(value) {
    if (value < 1 || value > 5) {
        throw DataError("Likert score out of range [1,5]: " + std::to_string(value));
    }
}

ReadabilityLabel map_score_to_label(LikertScore score) {
    int v = score.value();
    if (v <= 2) return ReadabilityLabel::Unreadable;
    if (v == 3) return ReadabilityLabel::Neutral;
    return ReadabilityLabel::Readable;
}

namespace {

void check_unique(const std::vector<std::string>& ids, const char* what) {
    std::vector<std::string> sorted(ids);
    std::sort(sorted.begin(), sorted.end());
    auto dup = std::adjacent_find(sorted.begin(), sorted.end());
    if (dup != sorted.end()) {
        throw DataError(std::string("duplicate ") + what + " id: '" + *dup + "'");
    }
}

}  // namespace

RatingMatrix RatingMatrix::build(std::vector<std::string> snippet_ids,
                                 std::vector<std::string> developer_ids,
                                 const std::vector<RatingCell>& cells) {
    check_unique(snippet_ids, "snippet");
    check_unique(developer_ids, "developer");

    RatingMatrix m;
    m.snippet_ids_ = std::move(snippet_ids);
    m.developer_ids_ = std::move(developer_ids);
    for (std::size_t i = 0; i < m.snippet_ids_.size(); ++i) m.snippet_index_[m.snippet_ids_[i]] = i;
    for (std::size_t i = 0; i < m.developer_ids_.size(); ++i) m.developer_index_[m.developer_ids_[i]] = i;
    m.cells_.assign(m.snippet_ids_.size() * m.developer_ids_.size(), 0);

    for (const RatingCell& cell : cells) {
        auto si = m.snippet_index_.find(cell.snippet_id);
        if (si == m.snippet_index_.end()) {
            throw DataError("rating references unknown snippet id '" + cell.snippet_id + "'");
        }
        auto di = m.developer_index_.find(cell.developer_id);
        if (di == m.developer_index_.end()) {
            throw DataError("rating references unknown developer id '" + cell.developer_id + "'");
        }
        LikertScore score(cell.score);
        std::uint8_t& slot = m.cells_[si->second * m.developer_ids_.size() + di->second];
        if (slot != 0) {
            throw DataError("duplicate rating cell (" + cell.snippet_id + ", " + cell.developer_id + ")");
        }
        slot = static_cast<std::uint8_t>(score.value());
        ++m.rating_count_;
    }
    m.dense_ = m.rating_count_ == m.cells_.size();
    return m;
}

bool RatingMatrix::has_snippet(const std::string& id) const {
    return snippet_index_.count(id) != 0;
}

bool RatingMatrix::has_developer(const std::string& id) const {
    return developer_index_.count(id) != 0;
}

std::size_t RatingMatrix::snippet_index(const std::string& id) const {
    auto it = snippet_index_.find(id);
    if (it == snippet_index_.end()) throw DataError("unknown snippet id '" + id + "'");
    return it->second;
}

std::size_t RatingMatrix::developer_index(const std::string& id) const {
    auto it = developer_index_.find(id);
    if (it == developer_index_.end()) throw DataError("unknown developer id '" + id + "'");
    return it->second;
}

std::optional<LikertScore> RatingMatrix::rating(std::size_t snippet, std::size_t developer) const {
    std::uint8_t raw = cells_.at(snippet * developer_ids_.size() + developer);
    if (raw == 0) return std::nullopt;
    return LikertScore(raw);
}

std::optional<LikertScore> RatingMatrix::rating(const std::string& snippet_id,
                                                const std::string& developer_id) const {
    return rating(snippet_index(snippet_id), developer_index(developer_id));
}

bool RatingMatrix::operator==(const RatingMatrix& other) const {
    return snippet_ids_ == other.snippet_ids_ && developer_ids_ == other.developer_ids_ &&
           cells_ == other.cells_ && dense_ == other.dense_;
}

DatasetView::DatasetView(const RatingMatrix& base)
    : base_(&base), excluded_(base.developer_count(), false) {}

std::size_t DatasetView::visible_developer_count() const {
    std::size_t n = 0;
    for (bool e : excluded_) {
        if (!e) ++n;
    }
    return n;
}

std::optional<LikertScore> DatasetView::rating(std::size_t snippet, std::size_t developer) const {
    if (excluded_[developer]) return std::nullopt;
    return base_->rating(snippet, developer);
}

std::vector<LikertScore> DatasetView::visible_scores(const std::string& snippet_id) const {
    std::size_t si = base_->snippet_index(snippet_id);
    std::vector<LikertScore> scores;
    for (std::size_t d = 0; d < base_->developer_count(); ++d) {
        if (excluded_[d]) continue;
        if (auto s = base_->rating(si, d)) scores.push_back(*s);
    }
    return scores;
}

DatasetView remove_developer(const RatingMatrix& matrix, const std::string& developer_id) {
    std::size_t di = matrix.developer_index(developer_id);
    DatasetView view(matrix);
    view.excluded_[di] = true;
    return view;
}

ReadabilityLabel majority_label(const DatasetView& view, const std::string& snippet_id) {
    std::array<int, 3> counts{0, 0, 0};
    int total = 0;
    for (LikertScore s : view.visible_scores(snippet_id)) {
        ++counts[static_cast<std::size_t>(map_score_to_label(s))];
        ++total;
    }
    if (total == 0) {
        throw DataError("snippet '" + snippet_id + "' has no visible rating");
    }
    // Ties break toward the less readable label; scanning in enum order does that.
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] > counts[best]) best = i;
    }
    return static_cast<ReadabilityLabel>(best);
}

double snippet_score_variance(const DatasetView& view, const std::string& snippet_id) {
    std::vector<LikertScore> scores = view.visible_scores(snippet_id);
    if (scores.empty()) {
        throw DataError("snippet '" + snippet_id + "' has no visible rating");
    }
    double mean = 0.0;
    for (LikertScore s : scores) mean += s.value();
    mean /= static_cast<double>(scores.size());
    double ss = 0.0;
    for (LikertScore s : scores) {
        double d = s.value() - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(scores.size());
}

const Snippet& Dataset::snippet(const std::string& id) const {
    for (const Snippet& s : snippets) {
        if (s.id == id) return s;
    }
    throw DataError("unknown snippet id '" + id + "'");
}

namespace {

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int parse_score_field(const std::string& field, std::size_t line_no) {
    std::string_view t = trim(field);
    if (t.empty() || t.size() > 2) {
        throw DataError("ratings.csv line " + std::to_string(line_no) + ": malformed score '" + field + "'");
    }
    for (char c : t) {
        if (c < '0' || c > '9') {
            throw DataError("ratings.csv line " + std::to_string(line_no) + ": malformed score '" + field + "'");
        }
    }
    return std::stoi(std::string(t));
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());

    const fs::path manifest_path = dir / "manifest.json";
    if (!fs::exists(manifest_path)) throw DataError("missing manifest.json in " + dir.string());
    json manifest;
    try {
        manifest = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw DataError("malformed manifest.json: " + std::string(e.what()));
    }
    for (const char* key : {"name", "granularity", "snippets", "developers"}) {
        if (!manifest.contains(key)) throw DataError(std::string("manifest.json missing key '") + key + "'");
    }

    Dataset ds;
    ds.name = manifest.at("name").get<std::string>();
    ds.granularity = granularity_from_word(manifest.at("granularity").get<std::string>());

    const fs::path snippets_dir = dir / "snippets";
    if (!fs::is_directory(snippets_dir)) throw DataError("missing snippets directory in " + dir.string());
    for (const auto& entry : fs::directory_iterator(snippets_dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".src") continue;
        Snippet s;
        s.id = entry.path().stem().string();
        s.source = read_text_file(entry.path());
        s.granularity = ds.granularity;
        if (s.source.empty()) throw DataError("snippet '" + s.id + "' has empty source");
        ds.snippets.push_back(std::move(s));
    }
    std::sort(ds.snippets.begin(), ds.snippets.end(),
              [](const Snippet& a, const Snippet& b) { return a.id < b.id; });

    const fs::path ratings_path = dir / "ratings.csv";
    if (!fs::exists(ratings_path)) throw DataError("missing ratings.csv in " + dir.string());
    std::ifstream ratings(ratings_path);
    std::string line;
    if (!std::getline(ratings, line) || trim(line) != "snippet_id,developer_id,score") {
        throw DataError("ratings.csv: expected header 'snippet_id,developer_id,score'");
    }
    std::vector<RatingCell> cells;
    std::vector<std::string> developer_ids;
    std::size_t line_no = 1;
    while (std::getline(ratings, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields = split(std::string(trim(line)), ',');
        if (fields.size() != 3) {
            throw DataError("ratings.csv line " + std::to_string(line_no) + ": expected 3 fields");
        }
        RatingCell cell;
        cell.snippet_id = std::string(trim(fields[0]));
        cell.developer_id = std::string(trim(fields[1]));
        cell.score = parse_score_field(fields[2], line_no);
        if (cell.snippet_id.empty() || cell.developer_id.empty()) {
            throw DataError("ratings.csv line " + std::to_string(line_no) + ": empty id field");
        }
        developer_ids.push_back(cell.developer_id);
        cells.push_back(std::move(cell));
    }

    std::sort(developer_ids.begin(), developer_ids.end());
    developer_ids.erase(std::unique(developer_ids.begin(), developer_ids.end()), developer_ids.end());

    std::vector<std::string> snippet_ids;
    snippet_ids.reserve(ds.snippets.size());
    for (const Snippet& s : ds.snippets) snippet_ids.push_back(s.id);

    ds.matrix = RatingMatrix::build(std::move(snippet_ids), std::move(developer_ids), cells);

    const auto declared_snippets = manifest.at("snippets").get<std::size_t>();
    const auto declared_developers = manifest.at("developers").get<std::size_t>();
    if (declared_snippets != ds.matrix.snippet_count() || declared_developers != ds.matrix.developer_count()) {
        std::ostringstream msg;
        msg << "manifest declares " << declared_snippets << "x" << declared_developers
            << " but dataset holds " << ds.matrix.snippet_count() << "x" << ds.matrix.developer_count();
        throw DataError(msg.str());
    }
    return ds;
}

}  // namespace readlab
