#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace flashot::dsl {

/// 1-based position in the source text; {0, 0} for programmatically built nodes.
struct SourceLoc {
    int line = 0;
    int column = 0;
};

struct AssetDecl {
    std::string ticker;
    std::string name;  // optional display name
    bool is_debt = false;
    SourceLoc loc;
};

struct PoolDecl {
    std::string id;
    std::string name;
    SourceLoc loc;
};

struct ContractDecl {
    std::string id;
    std::string name;
    SourceLoc loc;
};

/// A sum of one asset. Debt instances carry a positive amount; the sign is
/// a rendering concern only.
struct AssetInstance {
    std::string id;
    std::string ticker;
    double amount = 0.0;
    bool is_debt = false;
    SourceLoc loc;
};

struct Loan {
    std::string pool;
    AssetInstance out;
    std::string via;
};

struct Transform {
    std::vector<std::string> inputs;
    std::vector<AssetInstance> outputs;
    std::string via;
    std::optional<std::string> pool;
};

struct Split {
    std::string input;
    std::vector<AssetInstance> outputs;
};

struct Merge {
    std::vector<std::string> inputs;
    AssetInstance output;
};

struct Repay {
    std::string input;
    std::string pool;
    std::string via;
};

struct Proceed {
    std::string instance;
};

using StatementBody = std::variant<Loan, Transform, Split, Merge, Repay, Proceed>;

struct Statement {
    StatementBody body;
    SourceLoc loc;
};

struct Ratio {
    std::string label;
    double value = 0.0;
    SourceLoc loc;
};

struct Diagram {
    std::string title;
    std::vector<AssetDecl> assets;
    std::vector<PoolDecl> pools;
    std::vector<ContractDecl> contracts;
    std::vector<Statement> statements;
    std::vector<Ratio> ratios;
};

/// Keyword of the statement ("loan", "transform", ...).
std::string_view statement_keyword(const Statement& s);

/// Instances a statement creates, in source order.
std::vector<const AssetInstance*> produced_instances(const Statement& s);
/// Instance ids a statement uses up (a proceed marks rather than consumes).
std::vector<std::string> consumed_instances(const Statement& s);

/// Structure only: source locations are ignored, declarations compare as
/// sets keyed by id, statements and ratios compare in order.
bool structurally_equal(const Diagram& a, const Diagram& b);

}  // namespace flashot::dsl
