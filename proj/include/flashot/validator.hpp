#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flashot/diagram.hpp"

namespace flashot::dsl {

enum class Severity { error, warning };

/// Stable finding codes; the CLI and tests match on these strings.
namespace code {
inline constexpr std::string_view undeclared_reference = "UNDECLARED_REFERENCE";
inline constexpr std::string_view duplicate_declaration = "DUPLICATE_DECLARATION";
inline constexpr std::string_view duplicate_instance = "DUPLICATE_INSTANCE";
inline constexpr std::string_view double_spend = "DOUBLE_SPEND";
inline constexpr std::string_view split_conservation = "SPLIT_CONSERVATION";
inline constexpr std::string_view merge_conservation = "MERGE_CONSERVATION";
inline constexpr std::string_view ticker_mismatch = "TICKER_MISMATCH";
inline constexpr std::string_view loan_unpaid = "LOAN_UNPAID";
inline constexpr std::string_view loan_underpaid = "LOAN_UNDERPAID";
inline constexpr std::string_view proceed_consumed = "PROCEED_CONSUMED";
inline constexpr std::string_view invalid_amount = "INVALID_AMOUNT";
inline constexpr std::string_view arity = "ARITY";
inline constexpr std::string_view dangling_asset = "DANGLING_ASSET";
inline constexpr std::string_view empty_diagram = "EMPTY_DIAGRAM";
}  // namespace code

struct Finding {
    std::string code;
    std::optional<std::size_t> statement;  // index into Diagram::statements, if tied to one
    std::string message;
    Severity severity = Severity::error;
    SourceLoc loc;
};

struct ValidationReport {
    std::vector<Finding> findings;

    /// No findings of error severity; warnings do not make a diagram invalid.
    bool ok() const;
    std::size_t error_count() const;
    std::size_t warning_count() const;
    bool has(std::string_view code) const;
};

/// Relative tolerance for split and merge balances.
inline constexpr double kConservationTol = 1e-6;

/// Semantic checks on a diagram. Never throws; problems are reported as findings
/// in statement order, declaration problems first.
ValidationReport validate(const Diagram& d);

}  // namespace flashot::dsl
