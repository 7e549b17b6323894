#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "readlab/corpus.hpp"

namespace readlab {

enum class TokenKind {
    Identifier,
    Keyword,
    Operator,
    Separator,
    NumericLiteral,
    StringLiteral,
    Comment,
};

std::string_view token_kind_word(TokenKind kind);

struct Token {
    std::string text;
    TokenKind kind;
    int line = 1;              // 1-based
    int column = 1;            // 1-based, counted in characters
    std::size_t offset = 0;    // byte offset of the first character in the source
};

struct TokenStream {
    std::vector<Token> tokens;
    int line_count = 0;
    std::vector<std::string> lines;  // raw line text, '\n' and trailing '\r' stripped
};

// Tokenizes any curly-brace-language text. Never fails on unbalanced
// delimiters, truncated strings or unterminated comments; the only error is
// empty input. Every non-whitespace character lands in exactly one token.
TokenStream tokenize(const std::string& source);  // DataError on empty source

inline constexpr const char* kFeatureSchemaVersion = "fv1";

// The fixed 16-feature catalog, in export order.
const std::vector<std::string>& feature_catalog();

struct FeatureVector {
    std::string schema_version;
    std::vector<std::pair<std::string, double>> values;  // catalog order

    double at(std::string_view name) const;  // throws DataError on unknown name
};

FeatureVector extract_features(const Snippet& snippet);

// Shannon entropy (bits) of the non-comment token text distribution.
double token_entropy(const TokenStream& stream);  // DataError without non-comment tokens

// N * log2(eta) with operands = identifiers + literals and operators =
// keywords + operators + separators; 0 when the vocabulary has a single entry.
double halstead_volume(const TokenStream& stream);  // DataError without non-comment tokens

// CSV export: header `snippet_id,<catalog names>`, one row per snippet,
// values printed with 6 decimal digits.
void write_features_csv(std::ostream& out, const std::vector<Snippet>& snippets,
                        const std::string& fingerprint);

}  // namespace readlab
