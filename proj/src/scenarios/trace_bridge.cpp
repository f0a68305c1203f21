#include "flashot/scenarios.hpp"

#include <algorithm>

#include "flashot/serializer.hpp"

namespace flashot {

namespace {

using dsl::AssetInstance;

const StepRecord& step(const AttackTrace& t, int index) {
    const auto it = std::find_if(t.steps.begin(), t.steps.end(),
                                 [&](const StepRecord& s) { return s.step_index == index; });
    if (it == t.steps.end()) throw DomainError("trace_to_diagram: step " + std::to_string(index) + " is missing");
    return *it;
}

double amount(const std::vector<AssetAmount>& flows, const char* ticker, int index) {
    double total = 0.0;
    bool found = false;
    for (const auto& f : flows) {
        if (f.ticker != ticker) continue;
        total += f.quantity;
        found = true;
    }
    if (!found)
        throw DomainError("trace_to_diagram: step " + std::to_string(index) + " has no " + std::string(ticker) +
                          " flow");
    return total;
}

AssetInstance inst(std::string id, const char* ticker, double amount, bool debt = false) {
    return {std::move(id), ticker, amount, debt, {}};
}

std::string name_of(const NamingMap& names, const char* id) {
    const auto it = names.find(id);
    return it == names.end() ? id : it->second;
}

}  // namespace

NamingMap default_naming() {
    return {{ids::flash_pool, "dYdX"},
            {ids::lending_pool, "Compound"},
            {ids::amm_pool, "Uniswap"},
            {ids::margin_vault, "bZx vault"},
            {ids::flash_contract, "dYdX"},
            {ids::lending_contract, "Compound Ether"},
            {ids::margin_contract, "bZx"},
            {ids::swap_contract, "Uniswap"}};
}

NamingMap naming_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw DomainError("naming map must be a JSON object");
    NamingMap names = default_naming();
    for (const auto& [id, name] : j.items()) {
        if (!names.count(id)) throw DomainError("naming map: unknown id '" + id + "'");
        if (!name.is_string()) throw DomainError("naming map: name for '" + id + "' must be a string");
        names[id] = name.get<std::string>();
    }
    return names;
}

dsl::Diagram trace_to_diagram(const AttackTrace& t, const NamingMap& names) {
    if (t.steps.empty()) throw DomainError("trace_to_diagram: empty trace");
    check_trace(t);
    for (const auto& s : t.steps)
        if (s.step_index == 7 || s.step_index == 8) {
            if (!t.options.contingent_steps)
                throw DomainError("trace_to_diagram: step " + std::to_string(s.step_index) +
                                  " present without contingent options");
        }

    const double n = amount(step(t, 1).outputs, kEth, 1);
    const auto& s2 = step(t, 2);
    const double n1 = amount(s2.inputs, kEth, 2);
    const double ceth = amount(s2.outputs, kCeth, 2);
    const double btc = amount(s2.outputs, kWbtc, 2);
    const double owed = amount(s2.outputs, kDebtWbtc, 2);
    const double margin = amount(step(t, 3).inputs, kEth, 3);
    const double delta_b = amount(step(t, 4).outputs, kPosition, 4);
    const auto& s5 = step(t, 5);
    if (amount(s5.inputs, kWbtc, 5) != btc)
        throw DomainError("trace_to_diagram: step 5 sells a different wBTC amount than step 2 borrowed");
    const double delta_e = amount(s5.outputs, kEth, 5);
    const double repay = amount(step(t, 6).inputs, kEth, 6);
    if (repay < n) throw DomainError("trace_to_diagram: step 6 repays less than step 1 borrowed");
    if (!(delta_e > repay)) throw DomainError("trace_to_diagram: step 5 proceeds do not cover the step 6 repayment");

    dsl::Diagram d;
    d.title = "pump and arbitrage, n = " + dsl::format_number(n) + " ETH, n1 = " + dsl::format_number(n1) + " ETH";
    d.assets = {{kEth, "Ether", false, {}},
                {kCeth, "collateral token", false, {}},
                {kWbtc, "Wrapped BTC", false, {}},
                {kDebtWbtc, "wBTC owed to the lender", true, {}},
                {kPosition, "leveraged short position", false, {}}};
    for (const char* id : {ids::flash_pool, ids::lending_pool, ids::amm_pool})
        d.pools.push_back({id, name_of(names, id), {}});
    for (const char* id : {ids::flash_contract, ids::lending_contract, ids::margin_contract, ids::swap_contract})
        d.contracts.push_back({id, name_of(names, id), {}});

    auto& st = d.statements;
    // step 1
    st.push_back({dsl::Loan{ids::flash_pool, inst("eth_loan", kEth, n), ids::flash_contract}, {}});
    // the whole loan goes to collateral and margin
    st.push_back({dsl::Split{"eth_loan", {inst("eth_collateral", kEth, n1), inst("eth_margin", kEth, margin)}}, {}});
    // step 2
    st.push_back({dsl::Transform{{"eth_collateral"},
                                 {inst("ceth", kCeth, ceth), inst("wbtc_borrowed", kWbtc, btc),
                                  inst("wbtc_owed", kDebtWbtc, owed, true)},
                                 ids::lending_contract,
                                 ids::lending_pool},
                  {}});
    // steps 3 and 4: the vault's leverage is internal to the margin contract
    st.push_back({dsl::Transform{{"eth_margin"}, {inst("position", kPosition, delta_b)}, ids::margin_contract,
                                 ids::amm_pool},
                  {}});
    // step 5
    st.push_back({dsl::Transform{{"wbtc_borrowed"}, {inst("eth_dumped", kEth, delta_e)}, ids::swap_contract,
                                 ids::amm_pool},
                  {}});
    // step 6: the dump alone covers the loan, so the bulk is split rather than merged
    st.push_back({dsl::Split{"eth_dumped", {inst("eth_repay", kEth, repay), inst("eth_profit", kEth, delta_e - repay)}},
                  {}});
    st.push_back({dsl::Repay{"eth_repay", ids::flash_pool, ids::flash_contract}, {}});
    st.push_back({dsl::Proceed{"eth_profit"}, {}});

    bool position_held = true;
    bool collateral_held = true;
    if (t.options.contingent_steps) {
        const auto& s7 = step(t, 7);
        const double closed = amount(s7.outputs, kEth, 7);
        // closing under water returns nothing; the position is simply kept
        if (closed > 0) {
            d.pools.push_back({ids::margin_vault, name_of(names, ids::margin_vault), {}});
            st.push_back({dsl::Transform{{"position"}, {inst("eth_closed", kEth, closed)}, ids::margin_contract,
                                         ids::margin_vault},
                          {}});
            st.push_back({dsl::Proceed{"eth_closed"}, {}});
            position_held = false;
        }
        // the debt entry stands for the wBTC handed back
        const double redeemed = amount(step(t, 8).outputs, kEth, 8);
        st.push_back({dsl::Transform{{"ceth", "wbtc_owed"}, {inst("eth_redeemed", kEth, redeemed)},
                                     ids::lending_contract, ids::lending_pool},
                      {}});
        st.push_back({dsl::Proceed{"eth_redeemed"}, {}});
        collateral_held = false;
    }
    if (collateral_held) {
        st.push_back({dsl::Proceed{"ceth"}, {}});
        st.push_back({dsl::Proceed{"wbtc_owed"}, {}});
    }
    if (position_held) st.push_back({dsl::Proceed{"position"}, {}});

    const MarketParams& m = t.params.market;
    d.ratios = {{"wBTC price before the attack (ETH)", m.p, {}},
                {"collateral factor", m.cf, {}},
                {"leverage", m.l, {}},
                {"average pump price (ETH per wBTC)", amount(step(t, 4).internal, kEth, 4) / delta_b, {}},
                {"dump price (ETH per wBTC)", delta_e / btc, {}}};
    if (t.options.flash_loan_fee > 0) d.ratios.push_back({"flash loan fee (ETH)", t.options.flash_loan_fee, {}});
    return d;
}

}  // namespace flashot
