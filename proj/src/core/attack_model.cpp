#include "flashot/attack_model.hpp"

#include <algorithm>
#include <cmath>

#include "flashot/errors.hpp"

namespace flashot {

namespace {

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

// Closed form of the pump swap output for a non-negative trade size x.
double delta_b_closed(const MarketParams& m, double x) {
    const double e = m.e();
    return m.k() * x / (e * (e + x));
}

// Closed form of the dump swap output. x is the pump size, y the wBTC dumped.
double delta_e_closed(const MarketParams& m, double x, double y) {
    const double ex = m.e() + x;
    return y * ex * ex / (m.k() + y * ex);
}

double clamped_pump(const AttackParams& a) { return std::max(0.0, pump_size(a)); }
double clamped_dump(const AttackParams& a) { return std::max(0.0, collateral_borrow_btc(a)); }

}  // namespace

void MarketParams::validate() const {
    const double fields[] = {cf, ocr, l, p, p_m, n_f, n_c, n_b};
    for (double v : fields)
        if (!positive_finite(v)) throw DomainError("market params: every value must be finite and positive");
    if (cf > 1.0) throw DomainError("market params: cf must not exceed 1");
    if (!(ocr > 1.0)) throw DomainError("market params: ocr must exceed 1");
    if (!(l / ocr > 1.0)) throw DomainError("market params: l/ocr must exceed 1");
}

std::string_view constraint_label(Constraint c) {
    switch (c) {
        case Constraint::repay: return "delta_e > n";
        case Constraint::flash_capacity: return "n <= n_f";
        case Constraint::n1_positive: return "0 < n1";
        case Constraint::n1_below_n: return "n1 < n";
        case Constraint::compound_capacity: return "cf*n1/p <= n_c";
        case Constraint::margin_capacity: return "(l/ocr-1)(n-n1) <= n_b";
        case Constraint::market_leverage: return "l/ocr > 1";
    }
    return "?";
}

bool FeasibilityReport::violates(Constraint c) const {
    return std::any_of(violations.begin(), violations.end(), [c](const Violation& v) { return v.which == c; });
}

bool strictly_greater(double a, double b) {
    return a - b > kStrictMargin * std::max(std::abs(a), std::abs(b));
}

bool at_most(double a, double b) {
    return a - b <= 1e-12 * std::max({std::abs(a), std::abs(b), 1.0});
}

double pump_size(const AttackParams& a) { return a.market.l * (a.n - a.n1) / a.market.ocr; }

double margin_borrow(const AttackParams& a) { return (a.market.l / a.market.ocr - 1.0) * (a.n - a.n1); }

double collateral_borrow_btc(const AttackParams& a) { return a.market.cf * a.n1 / a.market.p; }

double pump_delta_b(const AttackParams& a) {
    if (!(std::isfinite(a.n) && std::isfinite(a.n1))) throw DomainError("pump_delta_b: non-finite parameters");
    if (!(a.n > a.n1)) throw DomainError("pump_delta_b: requires n > n1");
    return delta_b_closed(a.market, pump_size(a));
}

double dump_delta_e(const AttackParams& a) {
    if (!(std::isfinite(a.n) && std::isfinite(a.n1))) throw DomainError("dump_delta_e: non-finite parameters");
    if (!(a.n > a.n1)) throw DomainError("dump_delta_e: requires n > n1");
    if (!(a.n1 > 0.0)) throw DomainError("dump_delta_e: requires n1 > 0");
    return delta_e_closed(a.market, pump_size(a), collateral_borrow_btc(a));
}

RepaySides repay_condition_sides(const AttackParams& a) {
    if (!(a.n1 > 0.0)) throw DomainError("repay_condition_sides: requires n1 > 0");
    const MarketParams& m = a.market;
    const double r = m.l / m.ocr;
    const double d = a.n - a.n1;
    const double e = m.e();
    const double lhs = m.cf * r * r * d * d + m.cf * r * (2.0 * e - a.n) * d + m.cf * e * (e - a.n);
    const double rhs = m.p * m.k() * a.n / a.n1;
    return {lhs, rhs};
}

FeasibilityReport check_feasibility(const AttackParams& a) {
    const MarketParams& m = a.market;
    FeasibilityReport rep;
    auto add = [&rep](Constraint c, double slack) {
        rep.feasible = false;
        rep.violations.push_back({c, slack});
    };

    if (!strictly_greater(m.l / m.ocr, 1.0)) add(Constraint::market_leverage, m.l / m.ocr - 1.0);

    const double delta_e = a.n1 > 0.0 ? delta_e_closed(m, clamped_pump(a), clamped_dump(a)) : 0.0;
    if (!strictly_greater(delta_e, a.n)) add(Constraint::repay, delta_e - a.n);
    if (!at_most(a.n, m.n_f)) add(Constraint::flash_capacity, m.n_f - a.n);
    if (!strictly_greater(a.n1, 0.0)) add(Constraint::n1_positive, a.n1);
    if (!strictly_greater(a.n, a.n1)) add(Constraint::n1_below_n, a.n - a.n1);
    const double btc = collateral_borrow_btc(a);
    if (!at_most(btc, m.n_c)) add(Constraint::compound_capacity, m.n_c - btc);
    const double vault = margin_borrow(a);
    if (!at_most(vault, m.n_b)) add(Constraint::margin_capacity, m.n_b - vault);

    if (!(std::isfinite(a.n) && std::isfinite(a.n1))) rep.feasible = false;
    return rep;
}

bool is_feasible(const AttackParams& a) {
    const MarketParams& m = a.market;
    if (!(std::isfinite(a.n) && std::isfinite(a.n1))) return false;
    if (!strictly_greater(m.l / m.ocr, 1.0)) return false;
    if (!strictly_greater(a.n1, 0.0) || !strictly_greater(a.n, a.n1)) return false;
    if (!at_most(a.n, m.n_f) || !at_most(collateral_borrow_btc(a), m.n_c) || !at_most(margin_borrow(a), m.n_b))
        return false;
    return strictly_greater(delta_e_closed(m, clamped_pump(a), clamped_dump(a)), a.n);
}

bool N1Box::contains(double n1) const {
    const bool above = lo_open ? n1 > lo : at_most(lo, n1);
    const bool below = hi_open ? n1 < hi : at_most(n1, hi);
    return above && below;
}

std::optional<N1Box> n1_box(double n, const MarketParams& m) {
    if (!(n > 0.0) || !at_most(n, m.n_f)) return std::nullopt;
    const double excess = m.l / m.ocr - 1.0;
    if (!(excess > 0.0)) return std::nullopt;

    const double vault_floor = n - m.n_b / excess;
    const double lending_cap = m.n_c * m.p / m.cf;
    if (!at_most(vault_floor, lending_cap)) return std::nullopt;

    N1Box box{};
    box.lo_open = !(vault_floor > 0.0);
    box.lo = box.lo_open ? 0.0 : vault_floor;
    box.hi_open = !(lending_cap < n);
    box.hi = box.hi_open ? n : lending_cap;

    const bool degenerate = box.lo > box.hi || (box.lo == box.hi && (box.lo_open || box.hi_open));
    if (degenerate) return std::nullopt;
    return box;
}

bool capacity_constraints_hold(double n, double n1, const MarketParams& m) {
    const AttackParams a{m, n, n1};
    return at_most(n, m.n_f) && n1 > 0.0 && n1 < n && at_most(collateral_borrow_btc(a), m.n_c) &&
           at_most(margin_borrow(a), m.n_b);
}

AttackOutcome predictable_profit(const AttackParams& a) {
    AttackOutcome out;
    out.delta_b = delta_b_closed(a.market, clamped_pump(a));
    out.delta_e = a.n1 > 0.0 ? delta_e_closed(a.market, clamped_pump(a), clamped_dump(a)) : 0.0;
    out.p_f = out.delta_e - a.n;
    out.p_p = out.p_f + a.n1 * (1.0 - a.market.cf);
    FeasibilityReport rep = check_feasibility(a);
    out.feasible = rep.feasible;
    out.violations = std::move(rep.violations);
    return out;
}

double predictable_profit_value(const AttackParams& a) {
    const double delta_e = a.n1 > 0.0 ? delta_e_closed(a.market, clamped_pump(a), clamped_dump(a)) : 0.0;
    return delta_e - a.n + a.n1 * (1.0 - a.market.cf);
}

double contingent_pc1_inner(const AttackParams& a, double p_eval) {
    if (!positive_finite(p_eval)) throw DomainError("contingent_pc1: p_eval must be positive");
    const double delta_b = delta_b_closed(a.market, clamped_pump(a));
    return delta_b * p_eval - pump_size(a) + (a.n - a.n1);
}

double contingent_pc1(const AttackParams& a, double p_eval) {
    return std::max(0.0, contingent_pc1_inner(a, p_eval));
}

GrossProfit gross_profit(double p_p, double pc1, double pc2) {
    if (!(pc1 >= 0.0)) throw DomainError("gross_profit: pc1 must be non-negative");
    return {p_p, pc1, pc2, p_p + pc1 + pc2};
}

GrossProfit gross_profit(const AttackParams& a, double pc1, double pc2) {
    return gross_profit(predictable_profit(a).p_p, pc1, pc2);
}

double victim_loss(double eth_sold, double margin, double position_btc, double p_market) {
    return eth_sold - margin - position_btc * p_market;
}

ArbitrageGain arbitrage_gain(const CpmmPool& pool, double target_price) {
    if (!positive_finite(target_price)) throw DomainError("arbitrage_gain: target price must be positive");
    const double current = pool.price_x_in_y();
    if (target_price < current) throw DomainError("arbitrage_gain: target price below the pool price");
    if (target_price == current) return {0.0, 0.0, 0.0, 0.0};

    // At the target the reserves satisfy y/x = target and x*y = k.
    const double k = pool.k();
    const double eth_in = std::sqrt(k * target_price) - pool.reserve_y();
    const double btc_out = pool.reserve_x() - std::sqrt(k / target_price);
    const double gain_btc = btc_out - eth_in / target_price;
    return {eth_in, btc_out, gain_btc, gain_btc * target_price};
}

}  // namespace flashot
