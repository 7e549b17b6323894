#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "readlab/errors.hpp"

namespace readlab {

enum class Granularity { Fragment, Method };

std::string_view granularity_word(Granularity g);
Granularity granularity_from_word(std::string_view w);

// Label ordering is Unreadable < Neutral < Readable; every tie rule in the
// pipeline breaks toward the smaller (less readable) value.
enum class ReadabilityLabel : int { Unreadable = 0, Neutral = 1, Readable = 2 };

inline constexpr std::array<ReadabilityLabel, 3> kAllLabels = {
    ReadabilityLabel::Unreadable, ReadabilityLabel::Neutral, ReadabilityLabel::Readable};

std::string_view label_word(ReadabilityLabel label);
ReadabilityLabel label_from_word(std::string_view word);  // exact word, throws DataError

/// A 1-5 subjective rating; 1 = highly unreadable, 5 = highly readable.
class LikertScore {
public:
    explicit LikertScore(int value);  // throws DataError outside [1,5]
    int value() const noexcept { return value_; }
    friend bool operator==(LikertScore a, LikertScore b) { return a.value_ == b.value_; }

private:
    int value_;
};

ReadabilityLabel map_score_to_label(LikertScore score);

struct Snippet {
    std::string id;
    std::string source;  // raw text, possibly non-compilable
    Granularity granularity = Granularity::Fragment;
};

struct RatingCell {
    std::string snippet_id;
    std::string developer_id;
    int score;
};

// Immutable snippet x developer grid of optional Likert scores. Missing cells
// are representable so sparse corpora load, but the evaluation protocols all
// demand dense matrices and fail fast otherwise.
class RatingMatrix {
public:
    RatingMatrix() = default;

    static RatingMatrix build(std::vector<std::string> snippet_ids,
                              std::vector<std::string> developer_ids,
                              const std::vector<RatingCell>& cells);

    const std::vector<std::string>& snippet_ids() const { return snippet_ids_; }
    const std::vector<std::string>& developer_ids() const { return developer_ids_; }
    std::size_t snippet_count() const { return snippet_ids_.size(); }
    std::size_t developer_count() const { return developer_ids_.size(); }
    std::size_t rating_count() const { return rating_count_; }
    bool dense() const { return dense_; }

    bool has_snippet(const std::string& id) const;
    bool has_developer(const std::string& id) const;
    std::size_t snippet_index(const std::string& id) const;    // throws DataError
    std::size_t developer_index(const std::string& id) const;  // throws DataError

    std::optional<LikertScore> rating(std::size_t snippet, std::size_t developer) const;
    std::optional<LikertScore> rating(const std::string& snippet_id,
                                      const std::string& developer_id) const;

    bool operator==(const RatingMatrix& other) const;

private:
    std::vector<std::string> snippet_ids_;
    std::vector<std::string> developer_ids_;
    std::unordered_map<std::string, std::size_t> snippet_index_;
    std::unordered_map<std::string, std::size_t> developer_index_;
    std::vector<std::uint8_t> cells_;  // row-major [snippet][developer], 0 = missing
    std::size_t rating_count_ = 0;
    bool dense_ = true;
};

// Read-only window over a RatingMatrix with some developer columns hidden.
// The D-minus-d learning base is remove_developer(matrix, d).
class DatasetView {
public:
    explicit DatasetView(const RatingMatrix& base);

    const RatingMatrix& base() const { return *base_; }
    bool developer_visible(std::size_t developer) const { return !excluded_[developer]; }
    std::size_t visible_developer_count() const;
    std::optional<LikertScore> rating(std::size_t snippet, std::size_t developer) const;
    std::vector<LikertScore> visible_scores(const std::string& snippet_id) const;

    friend DatasetView remove_developer(const RatingMatrix& matrix, const std::string& developer_id);

private:
    const RatingMatrix* base_;
    std::vector<bool> excluded_;
};

DatasetView remove_developer(const RatingMatrix& matrix, const std::string& developer_id);

// Mode of the mapped labels visible through the view; ties break toward the
// less readable label. Throws DataError when the snippet has no visible rating.
ReadabilityLabel majority_label(const DatasetView& view, const std::string& snippet_id);

// Population variance of the raw Likert scores visible through the view.
double snippet_score_variance(const DatasetView& view, const std::string& snippet_id);

struct Dataset {
    std::string name;
    Granularity granularity = Granularity::Fragment;
    std::vector<Snippet> snippets;  // ordered by id
    RatingMatrix matrix;

    const Snippet& snippet(const std::string& id) const;  // throws DataError
};

// Loads the canonical on-disk dataset layout: snippets/<id>.src, ratings.csv
// with header snippet_id,developer_id,score, and manifest.json declaring name,
// granularity and expected dimensions.
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace readlab
