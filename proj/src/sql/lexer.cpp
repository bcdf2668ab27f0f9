#include <algorithm>
#include <array>
#include <charconv>
#include <string>

#include "multitab/sql/parser.hpp"

namespace multitab::sql {

namespace {

constexpr std::array kKeywords = {
    "ALL",    "AND",   "AS",    "ASC",    "BETWEEN", "BY",       "CASE",   "CROSS",  "DESC",
    "DISTINCT", "ELSE", "END",  "EXCEPT", "EXISTS",  "FROM",     "FULL",   "GROUP",  "HAVING",
    "IN",     "INNER", "INTERSECT", "IS", "JOIN",    "LEFT",     "LIKE",   "LIMIT",  "NATURAL",
    "NOT",    "NULL",  "OFFSET", "ON",    "OR",      "ORDER",    "OUTER",  "OVER",   "RIGHT",
    "SELECT", "THEN",  "UNION", "USING",  "WHEN",    "WHERE",    "WITH",
};

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string upper(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
    }
    return out;
}

// Reads a delimited run (string or quoted identifier) where the delimiter is
// escaped by doubling. Returns the unescaped body and advances `i` past the
// closing delimiter.
std::string read_delimited(std::string_view s, std::size_t& i, char delim, std::string_view what) {
    const std::size_t start = i;
    std::string body;
    ++i;
    while (true) {
        if (i >= s.size()) throw ParseError(start, "closing " + std::string(1, delim), "unterminated " + std::string(what));
        if (s[i] == delim) {
            if (i + 1 < s.size() && s[i + 1] == delim) {
                body.push_back(delim);
                i += 2;
                continue;
            }
            ++i;
            return body;
        }
        body.push_back(s[i++]);
    }
}

}  // namespace

ParseError::ParseError(std::size_t position, std::string expected, std::string found)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": expected " + expected +
                         ", found '" + found + "'"),
      position_(position),
      expected_(std::move(expected)),
      found_(std::move(found)) {}

bool is_keyword(std::string_view word) {
    const std::string u = upper(word);
    return std::find(kKeywords.begin(), kKeywords.end(), u) != kKeywords.end();
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char c = s[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
            ++i;
            continue;
        }
        Token tok;
        tok.position = i;
        if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && is_ident_char(s[j])) ++j;
            std::string_view word = s.substr(i, j - i);
            if (is_keyword(word)) {
                tok.kind = TokenKind::Keyword;
                tok.text = upper(word);
            } else {
                tok.kind = TokenKind::Identifier;
                tok.text = std::string(word);
            }
            i = j;
        } else if (c == '"') {
            tok.kind = TokenKind::Identifier;
            tok.text = read_delimited(s, i, '"', "quoted identifier");
            tok.quoted = true;
        } else if (c == '\'') {
            tok.kind = TokenKind::String;
            tok.text = read_delimited(s, i, '\'', "string literal");
            tok.value = Value(tok.text);
        } else if (is_digit(c) || (c == '.' && i + 1 < s.size() && is_digit(s[i + 1]))) {
            std::size_t j = i;
            bool real = false;
            while (j < s.size() && is_digit(s[j])) ++j;
            if (j < s.size() && s[j] == '.') {
                real = true;
                ++j;
                while (j < s.size() && is_digit(s[j])) ++j;
            }
            if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
                if (k < s.size() && is_digit(s[k])) {
                    real = true;
                    j = k;
                    while (j < s.size() && is_digit(s[j])) ++j;
                }
            }
            tok.text = std::string(s.substr(i, j - i));
            if (!real) {
                std::int64_t v = 0;
                auto res = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
                if (res.ec == std::errc()) {
                    tok.kind = TokenKind::Integer;
                    tok.value = Value(v);
                } else {
                    real = true;  // out of int64 range
                }
            }
            if (real) {
                double d = 0;
                std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), d);
                tok.kind = TokenKind::Real;
                tok.value = Value(d);
            }
            i = j;
            if (i < s.size() && is_ident_start(s[i])) {
                throw ParseError(i, "separator after number", std::string(1, s[i]));
            }
        } else {
            static constexpr std::array<std::string_view, 4> kTwoChar = {"!=", "<>", "<=", ">="};
            std::string_view two = s.substr(i, 2);
            if (std::find(kTwoChar.begin(), kTwoChar.end(), two) != kTwoChar.end()) {
                tok.kind = TokenKind::Symbol;
                tok.text = two == "<>" ? "!=" : std::string(two);
                i += 2;
            } else if (std::string_view(",.()*=<>;-").find(c) != std::string_view::npos) {
                tok.kind = TokenKind::Symbol;
                tok.text = std::string(1, c);
                ++i;
            } else {
                throw ParseError(i, "token", std::string(1, c));
            }
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.kind = TokenKind::End;
    end.position = s.size();
    out.push_back(std::move(end));
    return out;
}

}  // namespace multitab::sql
