#include <cstdlib>
#include <fstream>

#include "flashot/scenarios.hpp"

namespace flashot {

namespace {

std::vector<std::string> string_list(const nlohmann::json& j, const char* key, std::size_t row) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array() || it->empty())
        throw DomainError("event " + std::to_string(row) + ": '" + key + "' must be a non-empty list");
    std::vector<std::string> out;
    for (const auto& v : *it) {
        if (!v.is_string()) throw DomainError("event " + std::to_string(row) + ": '" + key + "' holds a non-string");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::string text(const nlohmann::json& j, const char* key, std::size_t row) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw DomainError("event " + std::to_string(row) + ": '" + key + "' must be a string");
    return it->get<std::string>();
}

}  // namespace

std::string_view event_type_name(EventType t) {
    switch (t) {
        case EventType::pump_and_arbitrage: return "pump-and-arbitrage";
        case EventType::oracle_manipulation: return "oracle-manipulation";
        case EventType::reentrancy: return "reentrancy";
    }
    return "unknown";
}

EventType parse_event_type(std::string_view s) {
    for (auto t : {EventType::pump_and_arbitrage, EventType::oracle_manipulation, EventType::reentrancy})
        if (event_type_name(t) == s) return t;
    throw DomainError("unknown event type '" + std::string(s) +
                      "' (expected pump-and-arbitrage, oracle-manipulation or reentrancy)");
}

std::vector<EventRecord> load_events(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw DomainError(path.string() + ": " + e.what());
    }
    if (!j.is_array()) throw DomainError(path.string() + ": expected a list of events");
    std::vector<EventRecord> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_object()) throw DomainError("event " + std::to_string(i) + ": expected an object");
        out.push_back({text(e, "date", i), text(e, "label", i), string_list(e, "providers", i),
                       string_list(e, "protocols", i), parse_event_type(text(e, "type", i)),
                       text(e, "proceeds", i)});
    }
    return out;
}

std::vector<EventRecord> list_events(const std::filesystem::path& catalog, std::optional<EventType> filter) {
    auto all = load_events(catalog);
    if (!filter) return all;
    std::vector<EventRecord> out;
    for (auto& e : all)
        if (e.type == *filter) out.push_back(std::move(e));
    return out;
}

std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("FLASHOT_FIXTURES"); env && *env) return env;
    return FLASHOT_FIXTURE_DIR;
}

}  // namespace flashot
