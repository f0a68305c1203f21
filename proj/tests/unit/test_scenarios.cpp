#include <gtest/gtest.h>

#include <cstdlib>
#include <map>
#include <random>

#include "flashot/parser.hpp"
#include "flashot/scenarios.hpp"
#include "flashot/serializer.hpp"
#include "flashot/validator.hpp"
#include "test_support.hpp"

using namespace flashot;
using flashot::testing::attack;
using flashot::testing::fixture;
using flashot::testing::random_market;

namespace {

std::map<std::string, double> proceeds_by_ticker(const dsl::Diagram& d) {
    std::map<std::string, const dsl::AssetInstance*> by_id;
    for (const auto& s : d.statements)
        for (const auto* a : dsl::produced_instances(s)) by_id[a->id] = a;
    std::map<std::string, double> out;
    for (const auto& s : d.statements)
        if (const auto* p = std::get_if<dsl::Proceed>(&s.body)) {
            const auto* a = by_id.at(p->instance);
            out[a->ticker] += a->amount;
        }
    return out;
}

const dsl::AssetInstance* find_instance(const dsl::Diagram& d, const std::string& id) {
    for (const auto& s : d.statements)
        for (const auto* a : dsl::produced_instances(s))
            if (a->id == id) return a;
    return nullptr;
}

}  // namespace

TEST(TraceToDiagram, EventPoint) {
    const auto t = simulate_attack(attack(6800, 5500));
    const auto d = trace_to_diagram(t);
    const auto r = dsl::validate(d);
    EXPECT_TRUE(r.findings.empty()) << r.findings.front().message;
    EXPECT_EQ(std::get<dsl::Loan>(d.statements[0].body).out.amount, 6800);
    EXPECT_EQ(find_instance(d, "eth_repay")->amount, 6800);
    const auto proceeds = proceeds_by_ticker(d);
    EXPECT_NEAR(proceeds.at("ETH"), t.outcome.p_f, 1e-9 * t.outcome.p_f);
    EXPECT_EQ(proceeds.at("cETH"), 5500);
    EXPECT_EQ(proceeds.at("sETHwBTC5x"), t.outcome.delta_b);
    EXPECT_EQ(d.pools[0].name, "dYdX");
}

TEST(TraceToDiagram, FeeRaisesTheRepayment) {
    SimulationOptions opt;
    opt.flash_loan_fee = 1e-11;
    const auto t = simulate_attack(attack(6800, 5500), opt);
    const auto d = trace_to_diagram(t);
    EXPECT_TRUE(dsl::validate(d).ok());
    EXPECT_EQ(find_instance(d, "eth_repay")->amount, 6800 + 1e-11);
}

TEST(TraceToDiagram, ContingentStepsBecomeRedemption) {
    SimulationOptions opt;
    opt.contingent_steps = true;
    const auto d = trace_to_diagram(simulate_attack(attack(6800, 5500), opt));
    const auto r = dsl::validate(d);
    EXPECT_TRUE(r.findings.empty());
    const auto proceeds = proceeds_by_ticker(d);
    EXPECT_EQ(proceeds.count("cETH"), 0u);
    // the position closes under water at 39.08 and is therefore kept
    EXPECT_EQ(proceeds.count("sETHwBTC5x"), 1u);
}

TEST(TraceToDiagram, RoundTripsThroughText) {
    const auto d = trace_to_diagram(simulate_attack(attack(4053, 2596.77)));
    EXPECT_TRUE(dsl::structurally_equal(d, dsl::parse(dsl::serialize(d))));
}

TEST(TraceToDiagram, MalformedTraces) {
    auto t = simulate_attack(attack(6800, 5500));
    auto broken = t;
    broken.steps.clear();
    EXPECT_THROW(trace_to_diagram(broken), DomainError);

    broken = t;
    broken.steps.erase(broken.steps.begin() + 4);
    try {
        trace_to_diagram(broken);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("step 5"), std::string::npos) << e.what();
    }

    broken = t;
    broken.steps[5].inputs[0].quantity = 6000;
    try {
        trace_to_diagram(broken);
        FAIL();
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("step 6"), std::string::npos) << e.what();
    }
}

TEST(TraceToDiagram, NamingMap) {
    const auto names = naming_from_json(nlohmann::json{{"FlashPool", "Aave"}});
    const auto d = trace_to_diagram(simulate_attack(attack(6800, 5500)), names);
    EXPECT_EQ(d.pools[0].name, "Aave");
    EXPECT_EQ(d.pools[1].name, "Compound");
    EXPECT_THROW(naming_from_json(nlohmann::json{{"Nowhere", "x"}}), DomainError);
    EXPECT_THROW(naming_from_json(nlohmann::json::array()), DomainError);
}

TEST(TraceToDiagramProperty, FeasibleDrawsValidateAndConserveEth) {
    std::mt19937_64 rng(1001);
    int checked = 0;
    while (checked < 100) {
        const MarketParams m = random_market(rng);
        const double n = std::uniform_real_distribution<double>(1.0, m.n_f)(rng);
        const AttackParams a{m, n, std::uniform_real_distribution<double>(0.0, n)(rng)};
        if (!is_feasible(a)) continue;
        ++checked;
        const auto t = simulate_attack(a);
        const auto d = trace_to_diagram(t);
        const auto r = dsl::validate(d);
        ASSERT_EQ(r.error_count(), 0u) << r.findings.front().code << ": " << r.findings.front().message;
        ASSERT_NEAR(proceeds_by_ticker(d).at("ETH"), t.outcome.p_f, 1e-9 * std::abs(t.outcome.p_f));
    }
}

TEST(Events, FullCatalog) {
    const auto all = list_events(fixture("events.json"));
    ASSERT_EQ(all.size(), 9u);
    EXPECT_EQ(all.front().date, "2020-02-15");
    EXPECT_EQ(all.front().label, "bZx Pump Attack");
    EXPECT_EQ(all.front().proceeds, "$330K");
    EXPECT_EQ(all.back().date, "2020-12-18");
    EXPECT_EQ(all.back().label, "Warp Finance Attack");
    EXPECT_EQ(all[6].providers, (std::vector<std::string>{"Aave", "Uniswap V2"}));
}

TEST(Events, Filters) {
    const auto path = fixture("events.json");
    const auto re = list_events(path, EventType::reentrancy);
    ASSERT_EQ(re.size(), 2u);
    EXPECT_EQ(re[0].label, "Akropolis Attack");
    EXPECT_EQ(re[1].label, "OUSD Attack");
    EXPECT_EQ(list_events(path, EventType::oracle_manipulation).size(), 5u);
    EXPECT_EQ(list_events(path, EventType::pump_and_arbitrage).size(), 2u);
    EXPECT_THROW(parse_event_type("bogus"), DomainError);
    EXPECT_EQ(parse_event_type("reentrancy"), EventType::reentrancy);
    EXPECT_THROW(load_events("/nonexistent/events.json"), std::runtime_error);
}

TEST(Events, FixtureDirHonoursEnvironment) {
    ::setenv("FLASHOT_FIXTURES", "/tmp/elsewhere", 1);
    EXPECT_EQ(fixture_dir(), std::filesystem::path("/tmp/elsewhere"));
    ::unsetenv("FLASHOT_FIXTURES");
    EXPECT_EQ(fixture_dir(), std::filesystem::path(FLASHOT_FIXTURE_DIR));
}
