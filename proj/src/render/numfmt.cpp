#include <cmath>

#include <fmt/format.h>

#include "flashot/render.hpp"

namespace flashot::render {

std::string format_amount(double v) {
    if (!std::isfinite(v)) return fmt::format("{}", v);
    // below the sixth decimal a fixed rendering would collapse to zero
    if (v != 0 && std::abs(v) < 5e-7) return fmt::format("{:.3g}", v);
    std::string s = fmt::format("{:.6f}", v);
    s.erase(s.find_last_not_of('0') + 1);
    if (s.back() == '.') s.pop_back();
    if (s == "-0") s = "0";

    const bool negative = s[0] == '-';
    const std::size_t int_begin = negative ? 1 : 0;
    const std::size_t dot = s.find('.');
    const std::size_t int_end = dot == std::string::npos ? s.size() : dot;
    std::string out = negative ? "-" : "";
    for (std::size_t i = int_begin; i < int_end; ++i) {
        out += s[i];
        const std::size_t left = int_end - i - 1;
        if (left > 0 && left % 3 == 0) out += ',';
    }
    return out + s.substr(int_end);
}

std::string asset_label(const dsl::AssetInstance& a) {
    return (a.is_debt ? "-" : "") + format_amount(a.amount) + " " + a.ticker;
}

}  // namespace flashot::render
