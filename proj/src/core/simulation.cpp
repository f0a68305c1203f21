#include "flashot/simulation.hpp"

#include <string>

namespace flashot {

namespace {

std::string describe(const FeasibilityReport& r) {
    std::string msg = "infeasible attack parameters:";
    for (const auto& v : r.violations) {
        msg += " [";
        msg += constraint_label(v.which);
        msg += "]";
    }
    return msg;
}

AssetAmount eth(double q) { return {kEth, q, false}; }

}  // namespace

InfeasibleAttack::InfeasibleAttack(FeasibilityReport report)
    : DomainError(describe(report)), report_(std::move(report)) {}

AttackTrace simulate_attack(const AttackParams& a, const SimulationOptions& opt) {
    FeasibilityReport rep = check_feasibility(a);
    if (!rep.feasible) throw InfeasibleAttack(std::move(rep));
    if (!(opt.flash_loan_fee >= 0.0)) throw DomainError("simulate_attack: negative flash-loan fee");
    if (!(opt.collateral_token_rate > 0.0)) throw DomainError("simulate_attack: collateral token rate must be positive");

    const MarketParams& m = a.market;
    const double margin = a.n - a.n1;
    const double vault_borrow = margin_borrow(a);
    const double pump = pump_size(a);
    const double btc_borrowed = collateral_borrow_btc(a);

    AttackTrace t{a, opt, {}, predictable_profit(a)};
    auto& steps = t.steps;

    steps.push_back({1, "borrow flash loan", Venue::flash_pool, {}, {eth(a.n)}, {}, {}, {}});

    steps.push_back({2,
                     "deposit collateral and borrow wBTC",
                     Venue::lending_pool,
                     {eth(a.n1)},
                     {{kCeth, a.n1 * opt.collateral_token_rate, false},
                      {kWbtc, btc_borrowed, false},
                      {kDebtWbtc, btc_borrowed, true}},
                     {},
                     {},
                     {}});

    steps.push_back({3,
                     "deposit margin, vault lends leverage",
                     Venue::margin_vault,
                     {eth(margin)},
                     {},
                     {eth(vault_borrow)},
                     {},
                     {}});

    // Amounts come from the closed forms; the snapshots follow from them.
    const double delta_b = pump_delta_b(a);
    const double delta_e = dump_delta_e(a);
    const CpmmPool pumped(m.pool.ticker_x(), m.pool.ticker_y(), m.b() - delta_b, m.e() + pump);
    const CpmmPool dumped(m.pool.ticker_x(), m.pool.ticker_y(), pumped.reserve_x() + btc_borrowed,
                          pumped.reserve_y() - delta_e);

    steps.push_back({4,
                     "margin short: ETH sold for wBTC",
                     Venue::amm,
                     {},
                     {{kPosition, delta_b, false}},
                     {eth(pump)},
                     m.pool,
                     pumped});

    steps.push_back({5,
                     "dump borrowed wBTC",
                     Venue::amm,
                     {{kWbtc, btc_borrowed, false}},
                     {eth(delta_e)},
                     {},
                     pumped,
                     dumped});

    steps.push_back({6, "repay flash loan", Venue::flash_pool, {eth(a.n + opt.flash_loan_fee)}, {}, {}, {}, {}});

    if (opt.contingent_steps) {
        steps.push_back({7,
                         "close margin position at market price",
                         Venue::margin_vault,
                         {{kPosition, delta_b, false}},
                         {eth(contingent_pc1(a, m.p_m))},
                         {eth(vault_borrow)},
                         {},
                         {}});
        steps.push_back({8,
                         "repay wBTC debt and redeem collateral",
                         Venue::lending_pool,
                         {{kWbtc, btc_borrowed, false}, {kCeth, a.n1 * opt.collateral_token_rate, false}},
                         {eth(a.n1)},
                         {},
                         {},
                         {}});
    }
    return t;
}

void check_trace(const AttackTrace& t) {
    if (t.steps.empty()) throw DomainError("attack trace: no steps");
    int last = 0;
    const CpmmPool* prev_after = nullptr;
    for (const auto& s : t.steps) {
        const std::string where = "attack trace step " + std::to_string(s.step_index);
        if (s.step_index < 1 || s.step_index > 8 || s.step_index <= last)
            throw DomainError(where + ": step indices must increase within 1..8");
        last = s.step_index;
        for (const auto& amt : s.inputs) amt.validate();
        for (const auto& amt : s.outputs) amt.validate();
        if (s.pool_before.has_value() != s.pool_after.has_value())
            throw DomainError(where + ": pool snapshots must come in pairs");
        if (s.pool_before) {
            if (prev_after && !(*prev_after == *s.pool_before))
                throw DomainError(where + ": pool state does not continue from the previous swap");
            prev_after = &*s.pool_after;
        }
    }
}

}  // namespace flashot
