#include "readlab/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace readlab {

std::string_view token_kind_word(TokenKind kind) {
    switch (kind) {
        case TokenKind::Identifier: return "identifier";
        case TokenKind::Keyword: return "keyword";
        case TokenKind::Operator: return "operator";
        case TokenKind::Separator: return "separator";
        case TokenKind::NumericLiteral: return "numeric_literal";
        case TokenKind::StringLiteral: return "string_literal";
        case TokenKind::Comment: return "comment";
    }
    return "unknown";
}

namespace {

// Fixed keyword table for a Java-flavored curly-brace language. true/false/null
// are classified as keywords by this table.
const std::unordered_set<std::string_view> kKeywords = {
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class",
    "const", "continue", "default", "do", "double", "else", "enum", "extends", "false",
    "final", "finally", "float", "for", "goto", "if", "implements", "import",
    "instanceof", "int", "interface", "long", "native", "new", "null", "package",
    "private", "protected", "public", "return", "short", "static", "strictfp", "super",
    "switch", "synchronized", "this", "throw", "throws", "transient", "true", "try",
    "var", "void", "volatile", "while",
};

const std::unordered_set<std::string_view> kBranchKeywords = {
    "if", "else", "for", "while", "do", "switch", "case", "catch",
};

// Longest-match-first multi-character operator table.
const std::array<std::string_view, 24> kMultiCharOps = {
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "==", "!=", "<=", ">=", "&&", "||",
    "++",   "--",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", "<<", ">>",
};

bool is_separator_char(char c) {
    switch (c) {
        case '(': case ')': case '{': case '}': case '[': case ']':
        case ';': case ',': case '.': case '@':
            return true;
        default:
            return false;
    }
}

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}

bool is_ident_char(char c) {
    return is_ident_start(c) || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Tokenizer {
public:
    explicit Tokenizer(const std::string& source) : src_(source) {}

    std::vector<Token> run() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v') {
                advance();
                continue;
            }
            if (c == '/' && peek(1) == '/') {
                line_comment();
            } else if (c == '/' && peek(1) == '*') {
                block_comment();
            } else if (c == '"' || c == '\'') {
                string_literal(c);
            } else if (is_digit(c) || (c == '.' && is_digit(peek(1)))) {
                numeric_literal();
            } else if (is_ident_start(c)) {
                identifier();
            } else {
                punctuation();
            }
        }
        return std::move(tokens_);
    }

private:
    char peek(std::size_t ahead) const {
        return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            column_ = 1;
        } else {
            ++column_;
        }
        ++pos_;
    }

    void emit(TokenKind kind, std::size_t start, int start_line, int start_column) {
        Token tok;
        tok.text = src_.substr(start, pos_ - start);
        tok.kind = kind;
        tok.line = start_line;
        tok.column = start_column;
        tok.offset = start;
        tokens_.push_back(std::move(tok));
    }

    void line_comment() {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
        emit(TokenKind::Comment, start, sl, sc);
    }

    void block_comment() {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        advance();  // '/'
        advance();  // '*'
        while (pos_ < src_.size()) {
            if (src_[pos_] == '*' && peek(1) == '/') {
                advance();
                advance();
                break;
            }
            advance();
        }
        // An unterminated comment runs to end of input.
        emit(TokenKind::Comment, start, sl, sc);
    }

    void string_literal(char quote) {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        advance();  // opening quote
        while (pos_ < src_.size() && src_[pos_] != quote && src_[pos_] != '\n') {
            if (src_[pos_] == '\\' && pos_ + 1 < src_.size() && src_[pos_ + 1] != '\n') {
                advance();
            }
            advance();
        }
        if (pos_ < src_.size() && src_[pos_] == quote) advance();
        // An unterminated literal stops at the newline.
        emit(TokenKind::StringLiteral, start, sl, sc);
    }

    void numeric_literal() {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (is_ident_char(c) || c == '.') {
                advance();
            } else if ((c == '+' || c == '-') && pos_ > start) {
                char prev = src_[pos_ - 1];
                if (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P') {
                    advance();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        emit(TokenKind::NumericLiteral, start, sl, sc);
    }

    void identifier() {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        while (pos_ < src_.size() && is_ident_char(src_[pos_])) advance();
        std::string_view text(src_.data() + start, pos_ - start);
        emit(kKeywords.count(text) ? TokenKind::Keyword : TokenKind::Identifier, start, sl, sc);
    }

    void punctuation() {
        std::size_t start = pos_;
        int sl = line_, sc = column_;
        std::string_view rest(src_.data() + pos_, src_.size() - pos_);
        for (std::string_view op : kMultiCharOps) {
            if (rest.substr(0, op.size()) == op) {
                for (std::size_t i = 0; i < op.size(); ++i) advance();
                emit(op == "::" ? TokenKind::Separator : TokenKind::Operator, start, sl, sc);
                return;
            }
        }
        char c = src_[pos_];
        advance();
        // Any character outside the fixed tables still becomes a token so that
        // arbitrary byte soup tokenizes totally; it is classified as operator.
        emit(is_separator_char(c) ? TokenKind::Separator : TokenKind::Operator, start, sl, sc);
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int column_ = 1;
    std::vector<Token> tokens_;
};

std::vector<std::string> split_lines(const std::string& source) {
    std::vector<std::string> lines;
    std::string current;
    for (char c : source) {
        if (c == '\n') {
            if (!current.empty() && current.back() == '\r') current.pop_back();
            lines.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    if (!current.empty() || lines.empty()) {
        if (!current.empty() && current.back() == '\r') current.pop_back();
        lines.push_back(std::move(current));
    }
    return lines;
}

}  // namespace

TokenStream tokenize(const std::string& source) {
    if (source.empty()) throw DataError("cannot tokenize empty source");
    TokenStream stream;
    stream.tokens = Tokenizer(source).run();
    stream.lines = split_lines(source);
    stream.line_count = static_cast<int>(stream.lines.size());
    return stream;
}

const std::vector<std::string>& feature_catalog() {
    static const std::vector<std::string> names = {
        "loc",
        "avg_line_length",
        "max_line_length",
        "blank_line_ratio",
        "comment_line_ratio",
        "indentation_mean",
        "indentation_stddev",
        "identifiers_per_line_avg",
        "identifier_length_avg",
        "identifier_length_max",
        "keyword_density",
        "operator_density",
        "numeric_literal_density",
        "branch_keyword_count_per_line",
        "halstead_volume",
        "token_entropy",
    };
    return names;
}

double FeatureVector::at(std::string_view name) const {
    for (const auto& [n, v] : values) {
        if (n == name) return v;
    }
    throw DataError("unknown feature name: '" + std::string(name) + "'");
}

namespace {

bool is_blank_line(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](char c) { return c == ' ' || c == '\t' || c == '\f' || c == '\v'; });
}

double indentation_columns(const std::string& line) {
    double cols = 0.0;
    for (char c : line) {
        if (c == ' ') {
            cols += 1.0;
        } else if (c == '\t') {
            cols += 4.0;  // tab = 4 columns
        } else {
            break;
        }
    }
    return cols;
}

struct EntropyVolume {
    double entropy = 0.0;
    double volume = 0.0;
    std::size_t non_comment_tokens = 0;
};

EntropyVolume entropy_and_volume(const TokenStream& stream) {
    EntropyVolume out;
    std::unordered_map<std::string_view, std::size_t> text_counts;
    std::unordered_set<std::string_view> vocabulary;
    for (const Token& t : stream.tokens) {
        if (t.kind == TokenKind::Comment) continue;
        ++out.non_comment_tokens;
        ++text_counts[t.text];
        vocabulary.insert(t.text);
    }
    if (out.non_comment_tokens == 0) return out;

    const double n = static_cast<double>(out.non_comment_tokens);
    for (const auto& [text, count] : text_counts) {
        double p = static_cast<double>(count) / n;
        out.entropy -= p * std::log2(p);
    }
    if (out.entropy < 0.0) out.entropy = 0.0;  // clamp -0.0 from the degenerate case

    if (vocabulary.size() > 1) {
        out.volume = n * std::log2(static_cast<double>(vocabulary.size()));
    }
    return out;
}

}  // namespace

double token_entropy(const TokenStream& stream) {
    EntropyVolume ev = entropy_and_volume(stream);
    if (ev.non_comment_tokens == 0) throw DataError("no non-comment tokens");
    return ev.entropy;
}

double halstead_volume(const TokenStream& stream) {
    EntropyVolume ev = entropy_and_volume(stream);
    if (ev.non_comment_tokens == 0) throw DataError("no non-comment tokens");
    return ev.volume;
}

FeatureVector extract_features(const Snippet& snippet) {
    TokenStream stream = tokenize(snippet.source);

    const std::size_t total_lines = stream.lines.size();
    std::size_t blank_lines = 0;
    double length_sum = 0.0;
    double max_length = 0.0;
    for (const std::string& line : stream.lines) {
        length_sum += static_cast<double>(line.size());
        max_length = std::max(max_length, static_cast<double>(line.size()));
        if (is_blank_line(line)) ++blank_lines;
    }

    // A line counts as comment when comment tokens touch it and no code does.
    std::vector<bool> has_code(total_lines + 1, false);
    std::vector<bool> has_comment(total_lines + 1, false);
    std::size_t identifier_count = 0, keyword_count = 0, operator_count = 0;
    std::size_t numeric_count = 0, branch_count = 0, non_comment_tokens = 0;
    double ident_length_sum = 0.0, ident_length_max = 0.0;
    for (const Token& t : stream.tokens) {
        if (t.kind == TokenKind::Comment) {
            std::size_t span = static_cast<std::size_t>(std::count(t.text.begin(), t.text.end(), '\n'));
            for (std::size_t l = static_cast<std::size_t>(t.line);
                 l <= std::min(total_lines, static_cast<std::size_t>(t.line) + span); ++l) {
                has_comment[l] = true;
            }
            continue;
        }
        has_code[static_cast<std::size_t>(t.line)] = true;
        ++non_comment_tokens;
        switch (t.kind) {
            case TokenKind::Identifier:
                ++identifier_count;
                ident_length_sum += static_cast<double>(t.text.size());
                ident_length_max = std::max(ident_length_max, static_cast<double>(t.text.size()));
                break;
            case TokenKind::Keyword:
                ++keyword_count;
                if (kBranchKeywords.count(t.text)) ++branch_count;
                break;
            case TokenKind::Operator:
                ++operator_count;
                break;
            case TokenKind::NumericLiteral:
                ++numeric_count;
                break;
            default:
                break;
        }
    }

    std::size_t comment_lines = 0;
    std::size_t loc = 0;
    double indent_sum = 0.0;
    std::vector<double> indents;
    for (std::size_t l = 1; l <= total_lines; ++l) {
        if (is_blank_line(stream.lines[l - 1])) continue;
        ++loc;
        if (has_comment[l] && !has_code[l]) ++comment_lines;
        double ind = indentation_columns(stream.lines[l - 1]);
        indent_sum += ind;
        indents.push_back(ind);
    }

    double indent_mean = indents.empty() ? 0.0 : indent_sum / static_cast<double>(indents.size());
    double indent_var = 0.0;
    for (double v : indents) indent_var += (v - indent_mean) * (v - indent_mean);
    double indent_stddev = indents.empty() ? 0.0 : std::sqrt(indent_var / static_cast<double>(indents.size()));

    const double lines_d = static_cast<double>(total_lines);
    const double nct = static_cast<double>(non_comment_tokens);
    EntropyVolume ev = entropy_and_volume(stream);

    FeatureVector fv;
    fv.schema_version = kFeatureSchemaVersion;
    fv.values = {
        {"loc", static_cast<double>(loc)},
        {"avg_line_length", length_sum / lines_d},
        {"max_line_length", max_length},
        {"blank_line_ratio", static_cast<double>(blank_lines) / lines_d},
        {"comment_line_ratio", static_cast<double>(comment_lines) / lines_d},
        {"indentation_mean", indent_mean},
        {"indentation_stddev", indent_stddev},
        {"identifiers_per_line_avg", static_cast<double>(identifier_count) / lines_d},
        {"identifier_length_avg",
         identifier_count == 0 ? 0.0 : ident_length_sum / static_cast<double>(identifier_count)},
        {"identifier_length_max", ident_length_max},
        {"keyword_density", non_comment_tokens == 0 ? 0.0 : static_cast<double>(keyword_count) / nct},
        {"operator_density", non_comment_tokens == 0 ? 0.0 : static_cast<double>(operator_count) / nct},
        {"numeric_literal_density",
         non_comment_tokens == 0 ? 0.0 : static_cast<double>(numeric_count) / nct},
        {"branch_keyword_count_per_line", static_cast<double>(branch_count) / lines_d},
        {"halstead_volume", ev.volume},
        {"token_entropy", ev.entropy},
    };
    return fv;
}

void write_features_csv(std::ostream& out, const std::vector<Snippet>& snippets,
                        const std::string& fingerprint) {
    if (!fingerprint.empty()) out << "# fingerprint=" << fingerprint << "\n";
    out << "snippet_id";
    for (const std::string& name : feature_catalog()) out << "," << name;
    out << "\n";
    char buf[64];
    for (const Snippet& s : snippets) {
        out << s.id;
        FeatureVector fv = extract_features(s);
        for (const auto& [name, value] : fv.values) {
            std::snprintf(buf, sizeof(buf), "%.6f", value);
            out << "," << buf;
        }
        out << "\n";
    }
}

}  // namespace readlab
