#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "flashot/attack_model.hpp"
#include "flashot/errors.hpp"
#include "test_support.hpp"

using namespace flashot;
using flashot::testing::attack;
using flashot::testing::random_market;
using flashot::testing::bundled_market;

// Reference values below were evaluated offline from the closed forms at
// 30 significant digits.

TEST(PumpDeltaB, EventAllocation) {
    const double db = pump_delta_b(attack(6800, 5500));
    EXPECT_NEAR(db, 51.39252378035892, 1e-9);
    const auto swap = cpmm_swap(bundled_market().pool, pump_size(attack(6800, 5500)), SwapSide::y_in);
    EXPECT_NEAR(db, swap.amount_out, 1e-9 * db);
}

TEST(PumpDeltaB, OptimalAllocationMatchesSwapSequence) {
    const auto a = attack(4053, 2596.77);
    const auto swap = cpmm_swap(a.market.pool, pump_size(a), SwapSide::y_in);
    EXPECT_NEAR(pump_delta_b(a), swap.amount_out, 1e-9 * swap.amount_out);
    EXPECT_NEAR(pump_delta_b(a), 53.29809814822515, 1e-9);
}

TEST(PumpDeltaB, VanishesAsAllocationReachesLoan) {
    EXPECT_NEAR(pump_delta_b(attack(6800, 6800 - 1e-9)), 0.0, 1e-9);
    EXPECT_THROW(pump_delta_b(attack(6800, 6800)), DomainError);
    EXPECT_THROW(pump_delta_b(attack(100, 200)), DomainError);
}

TEST(DumpDeltaE, EventAllocation) {
    const double de = dump_delta_e(attack(6800, 5500));
    EXPECT_NEAR(de, 6890.025555950153, 1e-8);
}

TEST(DumpDeltaE, OptimalAllocationMatchesTwoSwaps) {
    const auto a = attack(4053, 2596.77);
    const auto pumped = cpmm_swap(a.market.pool, pump_size(a), SwapSide::y_in);
    const auto dumped = cpmm_swap(pumped.pool, collateral_borrow_btc(a), SwapSide::x_in);
    EXPECT_NEAR(dump_delta_e(a), dumped.amount_out, 1e-9 * dumped.amount_out);
    EXPECT_NEAR(dump_delta_e(a), 6318.226897740903, 1e-8);
}

TEST(DumpDeltaE, VanishesWithCollateral) {
    EXPECT_LT(dump_delta_e(attack(6800, 1e-9)), 1e-6);
    EXPECT_THROW(dump_delta_e(attack(6800, 0.0)), DomainError);
    EXPECT_THROW(dump_delta_e(attack(6800, -5.0)), DomainError);
}

TEST(Feasibility, EventPointIsFeasible) {
    const auto r = check_feasibility(attack(6800, 5500));
    EXPECT_TRUE(r.feasible);
    EXPECT_TRUE(r.violations.empty());
}

TEST(Feasibility, TinyCollateralIsInfeasible) {
    const auto r = check_feasibility(attack(6800, 100));
    EXPECT_FALSE(r.feasible);
    // (l/ocr-1)(6800-100) is far above the vault capacity ...
    EXPECT_TRUE(r.violates(Constraint::margin_capacity));
    // ... while the oversized pump would still let the dump repay the loan
    EXPECT_GT(dump_delta_e(attack(6800, 100)), 6800.0);
    EXPECT_FALSE(r.violates(Constraint::repay));
}

TEST(Feasibility, RepayFailsBelowFavorableInterval) {
    const auto r = check_feasibility(attack(6800, 5400 - 100));
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.violates(Constraint::margin_capacity));
    const auto r2 = check_feasibility(attack(6800, 5600));
    EXPECT_FALSE(r2.feasible);
    ASSERT_EQ(r2.violations.size(), 1u);
    EXPECT_EQ(r2.violations[0].which, Constraint::repay);
    EXPECT_LT(r2.violations[0].slack, 0.0);
}

TEST(Feasibility, ZeroAllocationReportsEveryFailure) {
    const auto r = check_feasibility(attack(6800, 0.0));
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.violates(Constraint::n1_positive));
    EXPECT_TRUE(r.violates(Constraint::repay));
    EXPECT_EQ(constraint_label(Constraint::n1_positive), "0 < n1");
}

TEST(Feasibility, CapacityViolations) {
    EXPECT_TRUE(check_feasibility(attack(10001, 5000)).violates(Constraint::flash_capacity));
    EXPECT_TRUE(check_feasibility(attack(9900, 7600)).violates(Constraint::compound_capacity));
    EXPECT_TRUE(check_feasibility(attack(3000, 3000)).violates(Constraint::n1_below_n));
}

TEST(Feasibility, BoundaryCountsAsInfeasible) {
    // find delta_e == n along n = 6800 by bisection and probe right at it
    double lo = 5300, hi = 5343.9;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (dump_delta_e(attack(6800, mid)) > 6800 ? hi : lo) = mid;
    }
    EXPECT_FALSE(check_feasibility(attack(6800, hi)).feasible);
}

TEST(Feasibility, DegenerateLeverageIsInfeasible) {
    MarketParams m = bundled_market();
    m.l = m.ocr;
    const auto r = check_feasibility({m, 6800, 5500});
    EXPECT_FALSE(r.feasible);
    EXPECT_TRUE(r.violates(Constraint::market_leverage));
    EXPECT_FALSE(n1_box(6800, m).has_value());
    EXPECT_THROW(m.validate(), DomainError);
}

TEST(Feasibility, LightweightVerdictAgreesWithReport) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(-10.0, 1.2 * m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> f(-0.1, 1.1);
        const AttackParams a{m, n, n * f(rng)};
        ASSERT_EQ(is_feasible(a), check_feasibility(a).feasible);
    }
}

TEST(PredictableProfit, EventPointNearReportedFigure) {
    const auto o = predictable_profit(attack(6800, 5500));
    EXPECT_TRUE(o.feasible);
    EXPECT_NEAR(o.p_f, 90.02555595015319, 1e-8);
    EXPECT_NEAR(o.p_p, 1465.025555950153, 1e-8);
    EXPECT_NEAR(predictable_profit_value(attack(6800, 5500)), o.p_p, 0.0);
}

TEST(PredictableProfit, ReportedOptimaReproduce) {
    EXPECT_NEAR(predictable_profit(attack(6800, 5343.77)).p_p, 2043.45, 0.5);
    EXPECT_NEAR(predictable_profit(attack(4053, 2596.77)).p_p, 2914.43, 0.5);
}

TEST(PredictableProfit, InfeasibleStillReportsFigure) {
    const auto o = predictable_profit(attack(6800, 100));
    EXPECT_FALSE(o.feasible);
    EXPECT_FALSE(o.violations.empty());
    EXPECT_TRUE(std::isfinite(o.p_p));
}

TEST(ContingentPc1, EventPointInnerValue) {
    const auto a = attack(6800, 5500);
    EXPECT_NEAR(contingent_pc1_inner(a, 39.0), -2333.159048715178, 1e-8);
    EXPECT_EQ(contingent_pc1(a, 39.0), 0.0);
}

TEST(ContingentPc1, FullAllocationLimitIsZero) {
    EXPECT_NEAR(contingent_pc1_inner(attack(6800, 6800), 39.0), 0.0, 1e-12);
    EXPECT_EQ(contingent_pc1(attack(6800, 6800), 39.0), 0.0);
    EXPECT_THROW(contingent_pc1(attack(6800, 5500), 0.0), DomainError);
}

TEST(ContingentPc1, ClampProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> price(1.0, 5000.0);
    for (int i = 0; i < 5000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(1.0, m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> n1_dist(0.0, n);
        const AttackParams a{m, n, n1_dist(rng)};
        const double pe = price(rng);
        const double inner = contingent_pc1_inner(a, pe);
        const double v = contingent_pc1(a, pe);
        ASSERT_GE(v, 0.0);
        if (inner <= 0.0) ASSERT_EQ(v, 0.0);
        else ASSERT_EQ(v, inner);
    }
}

TEST(GrossProfit, RealizedEventBackSolvesPc2) {
    EXPECT_NEAR(gross_profit(1446.41, 0.0, -202.30).p_g, 1244.11, 1e-9);
    EXPECT_NEAR(gross_profit(2914.43, 0.0, 0.0).p_g, 2914.43, 0.0);
    const auto g = gross_profit(attack(6800, 5500), 0.0, 0.0);
    EXPECT_EQ(g.p_g, g.p_p);
    EXPECT_THROW(gross_profit(1.0, -0.5, 0.0), DomainError);
}

TEST(GrossProfit, Additive) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(-1e4, 1e4);
    for (int i = 0; i < 1000; ++i) {
        const double pp = v(rng), pc1 = std::abs(v(rng)), pc2 = v(rng);
        const auto g = gross_profit(pp, pc1, pc2);
        ASSERT_NEAR(g.p_g, pp + pc1 + pc2, 1e-12 * (std::abs(pp) + pc1 + std::abs(pc2)));
        ASSERT_EQ(g.p_p, pp);
    }
}

TEST(VictimLoss, Values) {
    EXPECT_NEAR(victim_loss(5637.62, 1300, 51.346, 39.08), 2331.02, 0.01);
    EXPECT_EQ(victim_loss(700, 700, 0, 39.0), 0.0);
    EXPECT_DOUBLE_EQ(victim_loss(1000, 500, 10, 40), 100.0);
}

TEST(ArbitrageGain, FootnotePool) {
    const auto g = arbitrage_gain(CpmmPool("wBTC", "ETH", 138.76, 1565.21), 39.08);
    EXPECT_NEAR(g.eth_in, 1348.19, 0.01 * 1348.19);
    EXPECT_NEAR(g.btc_out, 64.21, 0.01 * 64.21);
    EXPECT_NEAR(g.gain_btc, 29.72, 0.01 * 29.72);
    EXPECT_NEAR(g.gain_eth, 1161.26, 0.01 * 1161.26);
}

TEST(ArbitrageGain, AlreadyAtTarget) {
    const CpmmPool pool("wBTC", "ETH", 10.0, 400.0);
    const auto g = arbitrage_gain(pool, 40.0);
    EXPECT_EQ(g.eth_in, 0.0);
    EXPECT_EQ(g.gain_btc, 0.0);
    EXPECT_THROW(arbitrage_gain(pool, 39.0), DomainError);
}

TEST(ArbitrageGain, SmallPoolAgainstBisectionOracle) {
    const CpmmPool pool("wBTC", "ETH", 1.0, 100.0);
    const auto g = arbitrage_gain(pool, 400.0);
    // oracle: bisect the ETH input until the post-swap marginal price hits 400
    double lo = 0.0, hi = 1e4;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cpmm_swap(pool, mid, SwapSide::y_in).pool.price_x_in_y() < 400.0 ? lo : hi) = mid;
    }
    const auto swap = cpmm_swap(pool, lo, SwapSide::y_in);
    EXPECT_NEAR(g.eth_in, lo, 1e-9);
    EXPECT_NEAR(g.btc_out, swap.amount_out, 1e-9);
    EXPECT_NEAR(g.eth_in, 100.0, 1e-12);
    EXPECT_NEAR(g.btc_out, 0.5, 1e-12);
    EXPECT_NEAR(g.gain_btc, 0.25, 1e-12);
    EXPECT_NEAR(g.gain_eth, 100.0, 1e-9);
}

// ---- equation equivalences over random markets ----

TEST(EquationProperty, ReserveBounds) {
    std::mt19937_64 rng(101);
    for (int i = 0; i < 5000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(1.0, m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> n1_dist(1e-6 * n, n * (1 - 1e-6));
        const AttackParams a{m, n, n1_dist(rng)};
        const double db = pump_delta_b(a), de = dump_delta_e(a);
        ASSERT_GT(db, 0.0);
        ASSERT_LT(db, m.b());
        ASSERT_GT(de, 0.0);
        ASSERT_LT(de, m.e() + pump_size(a));
    }
}

TEST(EquationProperty, ClosedFormsEqualSwapSequence) {
    std::mt19937_64 rng(202);
    int failures = 0;
    for (int i = 0; i < 2000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(1.0, m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> n1_dist(1e-3 * n, n * (1 - 1e-3));
        const AttackParams a{m, n, n1_dist(rng)};
        const auto pumped = cpmm_swap(m.pool, pump_size(a), SwapSide::y_in);
        const auto dumped = cpmm_swap(pumped.pool, collateral_borrow_btc(a), SwapSide::x_in);
        if (std::abs(pump_delta_b(a) - pumped.amount_out) > 1e-9 * pumped.amount_out) ++failures;
        if (std::abs(dump_delta_e(a) - dumped.amount_out) > 1e-9 * dumped.amount_out) ++failures;
    }
    EXPECT_EQ(failures, 0);
}

TEST(EquationProperty, RepayConditionSidesMatchDirectComparison) {
    std::mt19937_64 rng(303);
    int failures = 0;
    for (int i = 0; i < 5000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(1.0, m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> n1_dist(1e-3 * n, n);
        const AttackParams a{m, n, n1_dist(rng)};
        const auto sides = repay_condition_sides(a);
        const double direct = dump_delta_e(a) - n;
        const double via_sides = sides.lhs - sides.rhs;
        // skip draws sitting on the boundary to rounding precision
        if (std::abs(direct) < 1e-9 * n) continue;
        if ((direct > 0) != (via_sides > 0)) ++failures;
    }
    EXPECT_EQ(failures, 0);
}

TEST(EquationProperty, BoxEqualsRawCapacityConstraints) {
    std::mt19937_64 rng(404);
    int failures = 0;
    for (int i = 0; i < 20000; ++i) {
        const MarketParams m = random_market(rng);
        std::uniform_real_distribution<double> n_dist(-0.1 * m.n_f, 1.2 * m.n_f);
        const double n = n_dist(rng);
        std::uniform_real_distribution<double> n1_dist(-0.2 * std::abs(n), 1.2 * std::abs(n));
        const double n1 = n1_dist(rng);
        const auto box = n1_box(n, m);
        const bool in_box = box && box->contains(n1);
        if (in_box != capacity_constraints_hold(n, n1, m)) ++failures;
    }
    EXPECT_EQ(failures, 0);
}

TEST(N1Box, BundledMarketBounds) {
    // n - n_b/(l/ocr - 1) and n_c p / cf for the bundled market
    const auto box = n1_box(6800, bundled_market());
    ASSERT_TRUE(box);
    EXPECT_NEAR(box->lo, 6800 - 1456.23, 0.01);
    EXPECT_FALSE(box->lo_open);
    EXPECT_EQ(box->hi, 6800);
    EXPECT_TRUE(box->hi_open);

    const auto wide = n1_box(8000, bundled_market());
    ASSERT_TRUE(wide);
    EXPECT_NEAR(wide->hi, 7573.25, 0.01);
    EXPECT_FALSE(wide->hi_open);

    const auto small = n1_box(1000, bundled_market());
    ASSERT_TRUE(small);
    EXPECT_EQ(small->lo, 0.0);
    EXPECT_TRUE(small->lo_open);

    EXPECT_FALSE(n1_box(9100, bundled_market()).has_value());  // beyond 9029.48 the box is empty
    EXPECT_FALSE(n1_box(10001, bundled_market()).has_value());
}
