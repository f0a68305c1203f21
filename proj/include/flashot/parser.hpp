#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "flashot/diagram.hpp"
#include "flashot/errors.hpp"

namespace flashot::dsl {

enum class ParseErrorKind { lexical, syntax, reference };
std::string_view parse_error_kind_name(ParseErrorKind k);

class ParseError : public DomainError {
public:
    ParseError(ParseErrorKind kind, SourceLoc loc, const std::string& message);

    ParseErrorKind kind() const { return kind_; }
    SourceLoc loc() const { return loc_; }
    const std::string& message() const { return message_; }

private:
    ParseErrorKind kind_;
    SourceLoc loc_;
    std::string message_;
};

enum class TokenKind { identifier, string, number, arrow, comma, colon, equals, newline, end };

struct Token {
    TokenKind kind;
    std::string text;  // identifier name, unescaped string, or number spelling
    double number = 0.0;
    SourceLoc loc;
};

/// Splits source text into tokens. Comments vanish, each line break becomes
/// a newline token, and the list always ends with `end`. Accepts LF and CRLF.
std::vector<Token> tokenize(std::string_view source);

/// Parses a complete .flashot document. Tickers, pools and contracts must be
/// declared before use, and instances must be produced before they are used;
/// violations raise ParseError(reference).
Diagram parse(std::string_view source);

/// Reads and parses a file; I/O failures raise std::runtime_error.
Diagram parse_file(const std::string& path);

}  // namespace flashot::dsl
