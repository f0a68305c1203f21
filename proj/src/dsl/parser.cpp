#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "flashot/parser.hpp"

namespace flashot::dsl {

namespace {

std::string format_error(ParseErrorKind kind, SourceLoc loc, const std::string& message) {
    return std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " +
           std::string(parse_error_kind_name(kind)) + " error: " + message;
}

std::string_view token_name(TokenKind k) {
    switch (k) {
        case TokenKind::identifier: return "identifier";
        case TokenKind::string: return "string";
        case TokenKind::number: return "number";
        case TokenKind::arrow: return "'->'";
        case TokenKind::comma: return "','";
        case TokenKind::colon: return "':'";
        case TokenKind::equals: return "'='";
        case TokenKind::newline: return "end of line";
        case TokenKind::end: return "end of file";
    }
    return "token";
}

struct InstanceInfo {
    std::string ticker;
    bool is_debt;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    Diagram run() {
        bool seen_content = false;
        while (!at(TokenKind::end)) {
            if (at(TokenKind::newline)) {
                ++pos_;
                continue;
            }
            const Token& kw = expect(TokenKind::identifier, "a keyword");
            if (kw.text == "flashot") {
                if (seen_content) syntax(kw.loc, "the 'flashot' header must come first and only once");
                d_.title = expect(TokenKind::string, "a quoted title").text;
            } else if (kw.text == "asset") {
                asset(kw.loc);
            } else if (kw.text == "pool") {
                const Token& id = expect(TokenKind::identifier, "a pool id");
                d_.pools.push_back({id.text, expect(TokenKind::string, "a quoted pool name").text, kw.loc});
                pools_.insert(id.text);
            } else if (kw.text == "contract") {
                const Token& id = expect(TokenKind::identifier, "a contract id");
                d_.contracts.push_back({id.text, expect(TokenKind::string, "a quoted contract name").text, kw.loc});
                contracts_.insert(id.text);
            } else if (kw.text == "loan") {
                loan(kw.loc);
            } else if (kw.text == "transform") {
                transform(kw.loc);
            } else if (kw.text == "split") {
                split(kw.loc);
            } else if (kw.text == "merge") {
                merge(kw.loc);
            } else if (kw.text == "repay") {
                repay(kw.loc);
            } else if (kw.text == "proceed") {
                const std::string id = instance_ref();
                d_.statements.push_back({Proceed{id}, kw.loc});
            } else if (kw.text == "ratio") {
                const std::string label = expect(TokenKind::string, "a quoted label").text;
                expect(TokenKind::equals, "'='");
                d_.ratios.push_back({label, expect(TokenKind::number, "a number").number, kw.loc});
            } else {
                syntax(kw.loc, "unknown keyword '" + kw.text + "'");
            }
            seen_content = true;
            end_of_statement();
        }
        return std::move(d_);
    }

private:
    bool at(TokenKind k) const { return toks_[pos_].kind == k; }
    bool at_word(std::string_view w) const { return at(TokenKind::identifier) && toks_[pos_].text == w; }

    [[noreturn]] static void syntax(SourceLoc loc, const std::string& msg) {
        throw ParseError(ParseErrorKind::syntax, loc, msg);
    }
    [[noreturn]] static void reference(SourceLoc loc, const std::string& msg) {
        throw ParseError(ParseErrorKind::reference, loc, msg);
    }

    const Token& expect(TokenKind k, std::string_view what) {
        const Token& t = toks_[pos_];
        if (t.kind != k) syntax(t.loc, "expected " + std::string(what) + ", found " + describe(t));
        ++pos_;
        return t;
    }

    void expect_word(std::string_view w) {
        const Token& t = toks_[pos_];
        if (t.kind != TokenKind::identifier || t.text != w)
            syntax(t.loc, "expected '" + std::string(w) + "', found " + describe(t));
        ++pos_;
    }

    static std::string describe(const Token& t) {
        if (t.kind == TokenKind::identifier || t.kind == TokenKind::number) return "'" + t.text + "'";
        if (t.kind == TokenKind::string) return "\"" + t.text + "\"";
        return std::string(token_name(t.kind));
    }

    void end_of_statement() {
        if (at(TokenKind::end)) return;
        const Token& t = toks_[pos_];
        if (t.kind != TokenKind::newline) syntax(t.loc, "unexpected " + describe(t) + " after statement");
        ++pos_;
    }

    void asset(SourceLoc loc) {
        AssetDecl a;
        a.ticker = expect(TokenKind::identifier, "a ticker").text;
        a.loc = loc;
        if (at(TokenKind::string)) a.name = toks_[pos_++].text;
        if (at_word("debt")) {
            a.is_debt = true;
            ++pos_;
        }
        tickers_[a.ticker] = a.is_debt;
        d_.assets.push_back(std::move(a));
    }

    std::string declared(const std::set<std::string>& ids, std::string_view what) {
        const Token& t = expect(TokenKind::identifier, std::string("a ") + std::string(what) + " id");
        if (!ids.count(t.text)) reference(t.loc, "undeclared " + std::string(what) + " '" + t.text + "'");
        return t.text;
    }

    std::string instance_ref() {
        const Token& t = expect(TokenKind::identifier, "an asset instance id");
        if (!instances_.count(t.text)) reference(t.loc, "asset instance '" + t.text + "' has not been produced");
        return t.text;
    }

    std::vector<std::string> instance_list() {
        std::vector<std::string> ids{instance_ref()};
        while (at(TokenKind::comma)) {
            ++pos_;
            ids.push_back(instance_ref());
        }
        return ids;
    }

    // <id>: <TICKER> <amount>
    AssetInstance typed_output() {
        const Token& id = expect(TokenKind::identifier, "an asset instance id");
        expect(TokenKind::colon, "':'");
        const Token& ticker = expect(TokenKind::identifier, "a ticker");
        const auto it = tickers_.find(ticker.text);
        if (it == tickers_.end()) reference(ticker.loc, "undeclared asset '" + ticker.text + "'");
        const Token& amount = expect(TokenKind::number, "an amount");
        return {id.text, ticker.text, amount.number, it->second, id.loc};
    }

    // <id>: <amount>, ticker inherited
    AssetInstance inherited_output(const InstanceInfo& from) {
        const Token& id = expect(TokenKind::identifier, "an asset instance id");
        expect(TokenKind::colon, "':'");
        const Token& amount = expect(TokenKind::number, "an amount");
        return {id.text, from.ticker, amount.number, from.is_debt, id.loc};
    }

    void produce(const AssetInstance& a) { instances_[a.id] = {a.ticker, a.is_debt}; }

    void loan(SourceLoc loc) {
        Loan l;
        l.pool = declared(pools_, "pool");
        expect(TokenKind::arrow, "'->'");
        l.out = typed_output();
        expect_word("via");
        l.via = declared(contracts_, "contract");
        produce(l.out);
        d_.statements.push_back({std::move(l), loc});
    }

    void transform(SourceLoc loc) {
        Transform t;
        t.inputs = instance_list();
        expect_word("via");
        t.via = declared(contracts_, "contract");
        if (at_word("pool")) {
            ++pos_;
            t.pool = declared(pools_, "pool");
        }
        expect(TokenKind::arrow, "'->'");
        t.outputs.push_back(typed_output());
        while (at(TokenKind::comma)) {
            ++pos_;
            t.outputs.push_back(typed_output());
        }
        for (const auto& o : t.outputs) produce(o);
        d_.statements.push_back({std::move(t), loc});
    }

    void split(SourceLoc loc) {
        Split s;
        s.input = instance_ref();
        const InstanceInfo from = instances_.at(s.input);
        expect(TokenKind::arrow, "'->'");
        s.outputs.push_back(inherited_output(from));
        while (at(TokenKind::comma)) {
            ++pos_;
            s.outputs.push_back(inherited_output(from));
        }
        for (const auto& o : s.outputs) produce(o);
        d_.statements.push_back({std::move(s), loc});
    }

    void merge(SourceLoc loc) {
        Merge m;
        m.inputs = instance_list();
        expect(TokenKind::arrow, "'->'");
        // the bulk takes the first part's asset; mixed parts are a validation finding
        m.output = inherited_output(instances_.at(m.inputs.front()));
        produce(m.output);
        d_.statements.push_back({std::move(m), loc});
    }

    void repay(SourceLoc loc) {
        Repay r;
        r.input = instance_ref();
        expect(TokenKind::arrow, "'->'");
        r.pool = declared(pools_, "pool");
        expect_word("via");
        r.via = declared(contracts_, "contract");
        d_.statements.push_back({std::move(r), loc});
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    Diagram d_;
    std::map<std::string, bool> tickers_;
    std::set<std::string> pools_;
    std::set<std::string> contracts_;
    std::map<std::string, InstanceInfo> instances_;
};

}  // namespace

std::string_view parse_error_kind_name(ParseErrorKind k) {
    switch (k) {
        case ParseErrorKind::lexical: return "lexical";
        case ParseErrorKind::syntax: return "syntax";
        case ParseErrorKind::reference: return "reference";
    }
    return "parse";
}

ParseError::ParseError(ParseErrorKind kind, SourceLoc loc, const std::string& message)
    : DomainError(format_error(kind, loc, message)), kind_(kind), loc_(loc), message_(message) {}

Diagram parse(std::string_view source) { return Parser(tokenize(source)).run(); }

Diagram parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("cannot read " + path);
    return parse(buf.str());
}

}  // namespace flashot::dsl
