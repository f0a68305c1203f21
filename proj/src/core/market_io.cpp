#include "flashot/market_io.hpp"

#include <fstream>
#include <stdexcept>

#include "flashot/errors.hpp"

namespace flashot {

namespace {

double required(const nlohmann::json& j, const char* key) {
    if (!j.contains(key)) throw DomainError(std::string("market params: missing field '") + key + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw DomainError(std::string("market params: field '") + key + "' is not a number");
    return v.get<double>();
}

}  // namespace

MarketParams market_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("market params: expected a JSON object");
    MarketParams m{
        required(j, "cf"),
        required(j, "ocr"),
        required(j, "l"),
        CpmmPool("wBTC", "ETH", required(j, "b"), required(j, "e")),
        required(j, "p"),
        required(j, "p_m"),
        required(j, "n_f"),
        required(j, "n_c"),
        required(j, "n_b"),
    };
    m.validate();
    return m;
}

nlohmann::json market_to_json(const MarketParams& m) {
    return nlohmann::json{{"cf", m.cf}, {"ocr", m.ocr}, {"l", m.l},     {"b", m.b()},     {"e", m.e()},
                          {"p", m.p},   {"p_m", m.p_m}, {"n_f", m.n_f}, {"n_c", m.n_c}, {"n_b", m.n_b}};
}

MarketParams load_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& ex) {
        throw std::runtime_error(path.string() + ": " + ex.what());
    }
    return market_from_json(j);
}

void store_market(const MarketParams& m, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << market_to_json(m).dump(2) << '\n';
}

}  // namespace flashot
