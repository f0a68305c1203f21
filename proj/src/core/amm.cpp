#include "flashot/amm.hpp"

#include <cassert>
#include <cmath>

#include "flashot/errors.hpp"

namespace flashot {

void AssetAmount::validate() const {
    if (ticker.empty()) throw DomainError("asset amount: empty ticker");
    if (!std::isfinite(quantity)) throw DomainError("asset amount: non-finite quantity for " + ticker);
    if (quantity < 0.0 && !is_debt) throw DomainError("asset amount: negative quantity for non-debt " + ticker);
}

CpmmPool::CpmmPool(std::string ticker_x, std::string ticker_y, double reserve_x, double reserve_y)
    : ticker_x_(std::move(ticker_x)), ticker_y_(std::move(ticker_y)), reserve_x_(reserve_x), reserve_y_(reserve_y) {
    if (ticker_x_.empty() || ticker_y_.empty()) throw DomainError("pool: empty ticker");
    if (!(std::isfinite(reserve_x_) && reserve_x_ > 0.0) || !(std::isfinite(reserve_y_) && reserve_y_ > 0.0))
        throw DomainError("pool: reserves must be finite and positive");
}

SwapResult cpmm_swap(const CpmmPool& pool, double amount_in, SwapSide side) {
    if (!std::isfinite(amount_in) || amount_in < 0.0)
        throw DomainError("cpmm_swap: amount_in must be finite and non-negative");
    if (amount_in == 0.0) return {0.0, pool};

    const bool x_in = side == SwapSide::x_in;
    const double r_in = x_in ? pool.reserve_x() : pool.reserve_y();
    const double r_out = x_in ? pool.reserve_y() : pool.reserve_x();

    const double out = r_out * amount_in / (r_in + amount_in);
    // k / (r_in + amount_in), written to keep the product exact to a few ulps
    const double new_out = r_out * (r_in / (r_in + amount_in));
    assert(out < r_out);

    const double new_in = r_in + amount_in;
    CpmmPool next = x_in ? CpmmPool(pool.ticker_x(), pool.ticker_y(), new_in, new_out)
                         : CpmmPool(pool.ticker_x(), pool.ticker_y(), new_out, new_in);
    return {out, std::move(next)};
}

}  // namespace flashot
