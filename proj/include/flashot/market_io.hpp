#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "flashot/attack_model.hpp"

namespace flashot {

// JSON documents use the flat field names cf, ocr, l, b, e, p, p_m, n_f, n_c, n_b.
MarketParams market_from_json(const nlohmann::json& j);
nlohmann::json market_to_json(const MarketParams& m);

/// Reads and validates a market document. Throws std::runtime_error on I/O
/// or JSON errors and DomainError on invalid values.
MarketParams load_market(const std::filesystem::path& path);
void store_market(const MarketParams& m, const std::filesystem::path& path);

}  // namespace flashot
