#pragma once

#include <string>

#include "flashot/diagram.hpp"

namespace flashot::dsl {

/// Shortest decimal spelling that reads back to the same double, without
/// exponent or trailing zeros ("51.945", "10000000", "0.000001").
std::string format_number(double v);

/// Canonical text: header, declarations grouped as assets, pools, contracts
/// and sorted by id, statements in order, then ratios. LF line endings.
std::string serialize(const Diagram& d);

}  // namespace flashot::dsl
