#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "flashot/amm.hpp"

namespace flashot {

/// Market constants of the pump-and-arbitrage model. The pool's x side is
/// the pumped asset (wBTC, reserve b) and the y side is ETH (reserve e).
struct MarketParams {
    double cf;   // collateral factor of the lending pool
    double ocr;  // over-collateral ratio of the margin platform
    double l;    // margin leverage
    CpmmPool pool;
    double p;    // collateralized borrowing rate, ETH per wBTC
    double p_m;  // post-attack market price, ETH per wBTC
    double n_f;  // flash-loan capacity, ETH
    double n_c;  // lending-pool wBTC capacity
    double n_b;  // margin-vault ETH capacity

    double b() const { return pool.reserve_x(); }
    double e() const { return pool.reserve_y(); }
    double k() const { return pool.k(); }

    /// Throws DomainError unless every value is finite and positive,
    /// cf <= 1, ocr > 1 and l/ocr > 1.
    void validate() const;
};

/// Decision variables: flash-loan size n and the share n1 posted as collateral.
struct AttackParams {
    MarketParams market;
    double n;
    double n1;
};

enum class Constraint {
    repay,              // delta_e > n
    flash_capacity,     // n <= n_f
    n1_positive,        // 0 < n1
    n1_below_n,         // n1 < n
    compound_capacity,  // cf*n1/p <= n_c
    margin_capacity,    // (l/ocr-1)(n-n1) <= n_b
    market_leverage,    // l/ocr > 1
};

std::string_view constraint_label(Constraint c);

struct Violation {
    Constraint which;
    double slack;  // rhs - lhs oriented so that a satisfied constraint has slack > 0
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<Violation> violations;

    bool violates(Constraint c) const;
};

/// Relative margin applied to strict inequalities; boundary points fail.
inline constexpr double kStrictMargin = 1e-9;

/// True when a > b by more than kStrictMargin relative to max(|a|, |b|).
bool strictly_greater(double a, double b);
/// True when a <= b up to rounding noise.
bool at_most(double a, double b);

// Trade sizes of the individual steps.
double pump_size(const AttackParams& a);              // l(n-n1)/ocr, ETH sold in the pump
double margin_borrow(const AttackParams& a);          // (l/ocr-1)(n-n1), ETH borrowed from the vault
double collateral_borrow_btc(const AttackParams& a);  // cf*n1/p, wBTC borrowed against collateral

/// wBTC bought by the pump swap. Throws DomainError when n <= n1.
double pump_delta_b(const AttackParams& a);

/// ETH received by dumping the borrowed wBTC into the pumped pool.
/// Throws DomainError when n <= n1 or n1 <= 0.
double dump_delta_e(const AttackParams& a);

/// The two sides of the repay condition after substituting the closed form of
/// delta_e; lhs > rhs holds exactly when delta_e > n. Requires n1 > 0.
struct RepaySides {
    double lhs;
    double rhs;
};
RepaySides repay_condition_sides(const AttackParams& a);

/// Evaluates every constraint and lists all that fail. Never throws.
FeasibilityReport check_feasibility(const AttackParams& a);
/// Same verdict as check_feasibility(a).feasible without building the report.
bool is_feasible(const AttackParams& a);

/// Admissible n1 range at a fixed n after eliminating the capacity
/// constraints. Open ends correspond to the strict bounds 0 < n1 and n1 < n.
struct N1Box {
    double lo;
    double hi;
    bool lo_open;
    bool hi_open;

    bool contains(double n1) const;
};

/// Box of admissible n1 at loan size n, or nullopt when none exists.
std::optional<N1Box> n1_box(double n, const MarketParams& m);

/// The raw capacity constraints (n <= n_f, 0 < n1 < n, lending and vault
/// capacity) evaluated directly, without the repay condition.
bool capacity_constraints_hold(double n, double n1, const MarketParams& m);

struct AttackOutcome {
    double delta_b = 0.0;
    double delta_e = 0.0;
    double p_f = 0.0;  // direct proceed, delta_e - n
    double p_p = 0.0;  // p_f + n1 (1 - cf)
    bool feasible = false;
    std::vector<Violation> violations;
};

/// Predictable profit of the six mandatory steps. Infeasible inputs still get
/// a profit figure, flagged through `feasible` and `violations`.
AttackOutcome predictable_profit(const AttackParams& a);
/// Just the p_p figure of predictable_profit.
double predictable_profit_value(const AttackParams& a);

/// Unclamped value of closing the margin position at price p_eval:
/// delta_b * p_eval - l(n-n1)/ocr + (n-n1).
double contingent_pc1_inner(const AttackParams& a, double p_eval);
/// max(0, contingent_pc1_inner).
double contingent_pc1(const AttackParams& a, double p_eval);

struct GrossProfit {
    double p_p;
    double pc1;
    double pc2;
    double p_g;
};

/// p_g = p_p + pc1 + pc2. pc2 is a caller-supplied scenario value.
GrossProfit gross_profit(const AttackParams& a, double pc1, double pc2);
GrossProfit gross_profit(double p_p, double pc1, double pc2);

/// Loss of the margin platform: ETH it sold, less the margin it holds and the
/// market value of the position it received.
double victim_loss(double eth_sold, double margin, double position_btc, double p_market);

struct ArbitrageGain {
    double eth_in;
    double btc_out;
    double gain_btc;  // btc_out - eth_in / target
    double gain_eth;  // gain_btc * target
};

/// Arbitrage that pulls the pool's marginal wBTC price back up to
/// target_price. Throws DomainError when target_price is below the current price.
ArbitrageGain arbitrage_gain(const CpmmPool& pool, double target_price);

}  // namespace flashot
