#include "flashot/diagram.hpp"

#include <algorithm>
#include <tuple>

namespace flashot::dsl {

namespace {

template <class... F>
struct overloaded : F... {
    using F::operator()...;
};
template <class... F>
overloaded(F...) -> overloaded<F...>;

bool same(const AssetInstance& a, const AssetInstance& b) {
    return std::tie(a.id, a.ticker, a.amount, a.is_debt) == std::tie(b.id, b.ticker, b.amount, b.is_debt);
}

bool same(const std::vector<AssetInstance>& a, const std::vector<AssetInstance>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](const AssetInstance& x, const AssetInstance& y) { return same(x, y); });
}

bool same(const Statement& a, const Statement& b) {
    if (a.body.index() != b.body.index()) return false;
    return std::visit(
        overloaded{
            [&](const Loan& x) {
                const auto& y = std::get<Loan>(b.body);
                return x.pool == y.pool && x.via == y.via && same(x.out, y.out);
            },
            [&](const Transform& x) {
                const auto& y = std::get<Transform>(b.body);
                return x.inputs == y.inputs && x.via == y.via && x.pool == y.pool && same(x.outputs, y.outputs);
            },
            [&](const Split& x) {
                const auto& y = std::get<Split>(b.body);
                return x.input == y.input && same(x.outputs, y.outputs);
            },
            [&](const Merge& x) {
                const auto& y = std::get<Merge>(b.body);
                return x.inputs == y.inputs && same(x.output, y.output);
            },
            [&](const Repay& x) {
                const auto& y = std::get<Repay>(b.body);
                return x.input == y.input && x.pool == y.pool && x.via == y.via;
            },
            [&](const Proceed& x) { return x.instance == std::get<Proceed>(b.body).instance; },
        },
        a.body);
}

template <class T, class Key, class Eq>
bool same_set(std::vector<T> a, std::vector<T> b, Key key, Eq eq) {
    if (a.size() != b.size()) return false;
    auto by_key = [&](const T& x, const T& y) { return key(x) < key(y); };
    std::stable_sort(a.begin(), a.end(), by_key);
    std::stable_sort(b.begin(), b.end(), by_key);
    return std::equal(a.begin(), a.end(), b.begin(), eq);
}

}  // namespace

std::string_view statement_keyword(const Statement& s) {
    static constexpr std::string_view names[] = {"loan", "transform", "split", "merge", "repay", "proceed"};
    return names[s.body.index()];
}

std::vector<const AssetInstance*> produced_instances(const Statement& s) {
    std::vector<const AssetInstance*> out;
    std::visit(overloaded{
                   [&](const Loan& x) { out.push_back(&x.out); },
                   [&](const Transform& x) {
                       for (const auto& o : x.outputs) out.push_back(&o);
                   },
                   [&](const Split& x) {
                       for (const auto& o : x.outputs) out.push_back(&o);
                   },
                   [&](const Merge& x) { out.push_back(&x.output); },
                   [](const Repay&) {},
                   [](const Proceed&) {},
               },
               s.body);
    return out;
}

std::vector<std::string> consumed_instances(const Statement& s) {
    return std::visit(overloaded{
                          [](const Loan&) { return std::vector<std::string>{}; },
                          [](const Transform& x) { return x.inputs; },
                          [](const Split& x) { return std::vector<std::string>{x.input}; },
                          [](const Merge& x) { return x.inputs; },
                          [](const Repay& x) { return std::vector<std::string>{x.input}; },
                          [](const Proceed&) { return std::vector<std::string>{}; },
                      },
                      s.body);
}

bool structurally_equal(const Diagram& a, const Diagram& b) {
    if (a.title != b.title) return false;
    const bool assets = same_set(
        a.assets, b.assets, [](const AssetDecl& d) { return d.ticker; },
        [](const AssetDecl& x, const AssetDecl& y) {
            return x.ticker == y.ticker && x.name == y.name && x.is_debt == y.is_debt;
        });
    const bool pools = same_set(
        a.pools, b.pools, [](const PoolDecl& d) { return d.id; },
        [](const PoolDecl& x, const PoolDecl& y) { return x.id == y.id && x.name == y.name; });
    const bool contracts = same_set(
        a.contracts, b.contracts, [](const ContractDecl& d) { return d.id; },
        [](const ContractDecl& x, const ContractDecl& y) { return x.id == y.id && x.name == y.name; });
    if (!assets || !pools || !contracts) return false;
    if (!std::equal(a.statements.begin(), a.statements.end(), b.statements.begin(), b.statements.end(),
                    [](const Statement& x, const Statement& y) { return same(x, y); }))
        return false;
    return std::equal(a.ratios.begin(), a.ratios.end(), b.ratios.begin(), b.ratios.end(),
                      [](const Ratio& x, const Ratio& y) { return x.label == y.label && x.value == y.value; });
}

}  // namespace flashot::dsl
