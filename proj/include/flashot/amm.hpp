#pragma once

#include <string>
#include <utility>

namespace flashot {

/// A quantity of one asset. Debt entries carry is_debt and may be negative.
struct AssetAmount {
    std::string ticker;
    double quantity = 0.0;
    bool is_debt = false;

    /// Throws DomainError on an empty ticker, a non-finite quantity, or a
    /// negative quantity on a non-debt entry.
    void validate() const;

    friend bool operator==(const AssetAmount&, const AssetAmount&) = default;
};

/// Which reserve of the pool receives the swap input.
enum class SwapSide { x_in, y_in };

/// Constant-product reserve pair (x * y = k), zero fee.
class CpmmPool {
public:
    CpmmPool(std::string ticker_x, std::string ticker_y, double reserve_x, double reserve_y);

    const std::string& ticker_x() const { return ticker_x_; }
    const std::string& ticker_y() const { return ticker_y_; }
    double reserve_x() const { return reserve_x_; }
    double reserve_y() const { return reserve_y_; }
    double k() const { return reserve_x_ * reserve_y_; }

    /// Marginal price of x quoted in y (reserve_y / reserve_x).
    double price_x_in_y() const { return reserve_y_ / reserve_x_; }

    friend bool operator==(const CpmmPool&, const CpmmPool&) = default;

private:
    std::string ticker_x_;
    std::string ticker_y_;
    double reserve_x_;
    double reserve_y_;
};

struct SwapResult {
    double amount_out;
    CpmmPool pool;
};

/// Sells amount_in into the reserve named by `side`, returning the other
/// reserve's output and the post-trade pool. A zero input is a no-op;
/// a negative or non-finite input throws DomainError.
SwapResult cpmm_swap(const CpmmPool& pool, double amount_in, SwapSide side);

}  // namespace flashot
