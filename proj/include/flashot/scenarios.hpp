#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flashot/diagram.hpp"
#include "flashot/simulation.hpp"

namespace flashot {

/// Display names for the pool and contract ids used by trace_to_diagram.
using NamingMap = std::map<std::string, std::string>;

namespace ids {
inline constexpr const char* flash_pool = "FlashPool";
inline constexpr const char* lending_pool = "LendingPool";
inline constexpr const char* amm_pool = "AMM";
inline constexpr const char* margin_vault = "MarginVault";
inline constexpr const char* flash_contract = "FlashLender";
inline constexpr const char* lending_contract = "Lending";
inline constexpr const char* margin_contract = "MarginTrade";
inline constexpr const char* swap_contract = "Swap";
}  // namespace ids

/// Names matching the recorded bZx event (dYdX, Compound, Uniswap, bZx).
NamingMap default_naming();
/// Overlays a JSON object {id: name} on the defaults; unknown ids are rejected.
NamingMap naming_from_json(const nlohmann::json& j);

/// Notation for a simulated attack: loan, collateral and margin transforms,
/// the dump swap, a split that repays the lender, and proceeds for whatever
/// the attacker still holds. Throws DomainError naming the offending step
/// when the trace is malformed.
dsl::Diagram trace_to_diagram(const AttackTrace& trace, const NamingMap& names = default_naming());

enum class EventType { pump_and_arbitrage, oracle_manipulation, reentrancy };
std::string_view event_type_name(EventType t);
/// Accepts the names printed by event_type_name; anything else is a DomainError.
EventType parse_event_type(std::string_view s);

struct EventRecord {
    std::string date;
    std::string label;
    std::vector<std::string> providers;
    std::vector<std::string> protocols;
    EventType type;
    std::string proceeds;  // display string, e.g. "$330K"
};

/// Reads an events catalog. I/O problems raise std::runtime_error, malformed
/// records DomainError.
std::vector<EventRecord> load_events(const std::filesystem::path& path);
std::vector<EventRecord> list_events(const std::filesystem::path& catalog, std::optional<EventType> filter = {});

/// $FLASHOT_FIXTURES when set, otherwise the fixtures shipped with the source tree.
std::filesystem::path fixture_dir();

}  // namespace flashot
