#include <cctype>
#include <charconv>
#include <cmath>

#include "flashot/parser.hpp"

namespace flashot::dsl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            const SourceLoc here{line_, col()};
            if (c == ' ' || c == '\t') {
                ++pos_;
            } else if (c == '\r' && peek(1) == '\n') {
                ++pos_;
            } else if (c == '\n') {
                out.push_back({TokenKind::newline, "\n", 0.0, here});
                ++pos_;
                ++line_;
                line_start_ = pos_;
            } else if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
            } else if (c == '-' && peek(1) == '>') {
                out.push_back({TokenKind::arrow, "->", 0.0, here});
                pos_ += 2;
            } else if (c == ',') {
                out.push_back({TokenKind::comma, ",", 0.0, here});
                ++pos_;
            } else if (c == ':') {
                out.push_back({TokenKind::colon, ":", 0.0, here});
                ++pos_;
            } else if (c == '=') {
                out.push_back({TokenKind::equals, "=", 0.0, here});
                ++pos_;
            } else if (c == '"') {
                out.push_back(string_literal());
            } else if (digit(c) || ((c == '-' || c == '.') && (digit(peek(1)) || peek(1) == '.'))) {
                out.push_back(number());
            } else if (ident_start(c)) {
                out.push_back(identifier());
            } else {
                throw ParseError(ParseErrorKind::lexical, here, describe(c));
            }
        }
        out.push_back({TokenKind::end, "", 0.0, {line_, col()}});
        return out;
    }

private:
    char peek(std::size_t ahead) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }
    int col() const { return static_cast<int>(pos_ - line_start_) + 1; }

    static std::string describe(char c) {
        if (std::isprint(static_cast<unsigned char>(c))) return std::string("unexpected character '") + c + "'";
        return "unexpected byte " + std::to_string(static_cast<unsigned char>(c));
    }

    Token identifier() {
        const SourceLoc here{line_, col()};
        const std::size_t start = pos_;
        // a '-' directly followed by '>' is an arrow, not part of the name
        while (pos_ < src_.size() && ident_char(src_[pos_]) && !(src_[pos_] == '-' && peek(1) == '>')) ++pos_;
        return {TokenKind::identifier, std::string(src_.substr(start, pos_ - start)), 0.0, here};
    }

    Token number() {
        const SourceLoc here{line_, col()};
        const std::size_t start = pos_;
        if (src_[pos_] == '-') ++pos_;
        while (pos_ < src_.size() && (ident_char(src_[pos_]) || src_[pos_] == '.' || src_[pos_] == '+')) {
            if (src_[pos_] == '-' && peek(1) == '>') break;
            // signs only belong right after an exponent marker
            if ((src_[pos_] == '+' || src_[pos_] == '-') && !(src_[pos_ - 1] == 'e' || src_[pos_ - 1] == 'E')) break;
            ++pos_;
        }
        const std::string_view text = src_.substr(start, pos_ - start);
        if (!well_formed(text)) throw ParseError(ParseErrorKind::lexical, here, "bad number '" + std::string(text) + "'");
        double value = 0.0;
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value))
            throw ParseError(ParseErrorKind::lexical, here, "number out of range '" + std::string(text) + "'");
        return {TokenKind::number, std::string(text), value, here};
    }

    // -?digits(.digits)?([eE][+-]?digits)?
    static bool well_formed(std::string_view t) {
        std::size_t i = 0;
        auto digits = [&] {
            const std::size_t s = i;
            while (i < t.size() && digit(t[i])) ++i;
            return i > s;
        };
        if (i < t.size() && t[i] == '-') ++i;
        if (!digits()) return false;
        if (i < t.size() && t[i] == '.') {
            ++i;
            if (!digits()) return false;
        }
        if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
            ++i;
            if (i < t.size() && (t[i] == '+' || t[i] == '-')) ++i;
            if (!digits()) return false;
        }
        return i == t.size();
    }

    Token string_literal() {
        const SourceLoc here{line_, col()};
        ++pos_;
        std::string value;
        while (true) {
            if (pos_ >= src_.size() || src_[pos_] == '\n' || (src_[pos_] == '\r' && peek(1) == '\n'))
                throw ParseError(ParseErrorKind::lexical, here, "unterminated string");
            const char c = src_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                value += c;
                continue;
            }
            const char e = pos_ < src_.size() ? src_[pos_++] : '\0';
            switch (e) {
                case '"': value += '"'; break;
                case '\\': value += '\\'; break;
                case 'n': value += '\n'; break;
                case 't': value += '\t'; break;
                default:
                    throw ParseError(ParseErrorKind::lexical, {line_, col() - 2},
                                     std::string("unknown escape '\\") + e + "'");
            }
        }
        return {TokenKind::string, std::move(value), 0.0, here};
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_start_ = 0;
    int line_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) {
    // a leading UTF-8 byte-order mark is tolerated
    if (source.substr(0, 3) == "\xEF\xBB\xBF") source.remove_prefix(3);
    return Lexer(source).run();
}

}  // namespace flashot::dsl
