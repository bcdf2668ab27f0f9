#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "multitab/sql/ast.hpp"

namespace multitab::sql {

enum class TokenKind { Keyword, Identifier, String, Integer, Real, Symbol, End };

struct Token {
    TokenKind kind = TokenKind::End;
    std::string text;  // keywords upper-cased, identifiers unquoted, strings unescaped
    Value value;       // literal payload for String/Integer/Real
    std::size_t position = 0;
    bool quoted = false;  // identifier was written in double quotes

    friend bool operator==(const Token&, const Token&) = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, std::string expected, std::string found);

    std::size_t position() const { return position_; }
    const std::string& expected() const { return expected_; }
    const std::string& found() const { return found_; }

private:
    std::size_t position_;
    std::string expected_;
    std::string found_;
};

/// Always ends with an End token positioned at the input length.
std::vector<Token> tokenize(std::string_view sql);

Query parse(std::string_view sql);

bool is_keyword(std::string_view word);

}  // namespace multitab::sql
