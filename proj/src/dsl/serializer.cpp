#include "flashot/serializer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace flashot::dsl {

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + '"';
}

std::string join(const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) out += (i ? ", " : "") + ids[i];
    return out;
}

std::string typed(const AssetInstance& a) { return a.id + ": " + a.ticker + " " + format_number(a.amount); }
std::string untyped(const AssetInstance& a) { return a.id + ": " + format_number(a.amount); }

template <class T, class Key>
std::vector<const T*> sorted(const std::vector<T>& v, Key key) {
    std::vector<const T*> out;
    for (const auto& x : v) out.push_back(&x);
    std::stable_sort(out.begin(), out.end(), [&](const T* a, const T* b) { return key(*a) < key(*b); });
    return out;
}

std::string line(const Statement& s) {
    if (const auto* l = std::get_if<Loan>(&s.body)) return "loan " + l->pool + " -> " + typed(l->out) + " via " + l->via;
    if (const auto* t = std::get_if<Transform>(&s.body)) {
        std::string out = "transform " + join(t->inputs) + " via " + t->via;
        if (t->pool) out += " pool " + *t->pool;
        out += " -> ";
        for (std::size_t i = 0; i < t->outputs.size(); ++i) out += (i ? ", " : "") + typed(t->outputs[i]);
        return out;
    }
    if (const auto* sp = std::get_if<Split>(&s.body)) {
        std::string out = "split " + sp->input + " -> ";
        for (std::size_t i = 0; i < sp->outputs.size(); ++i) out += (i ? ", " : "") + untyped(sp->outputs[i]);
        return out;
    }
    if (const auto* m = std::get_if<Merge>(&s.body)) return "merge " + join(m->inputs) + " -> " + untyped(m->output);
    if (const auto* r = std::get_if<Repay>(&s.body)) return "repay " + r->input + " -> " + r->pool + " via " + r->via;
    return "proceed " + std::get<Proceed>(s.body).instance;
}

}  // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot format a non-finite number");
    if (v == 0) return "0";  // also folds -0
    char buf[512];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    if (ec != std::errc()) throw std::invalid_argument("number too long to format");
    return std::string(buf, end);
}

std::string serialize(const Diagram& d) {
    std::string out = "flashot " + quoted(d.title) + "\n";
    auto section = [&out](const std::vector<std::string>& lines) {
        if (lines.empty()) return;
        out += "\n";
        for (const auto& l : lines) out += l + "\n";
    };

    std::vector<std::string> decls;
    for (const auto* a : sorted(d.assets, [](const AssetDecl& x) { return x.ticker; })) {
        std::string l = "asset " + a->ticker;
        if (!a->name.empty()) l += " " + quoted(a->name);
        if (a->is_debt) l += " debt";
        decls.push_back(l);
    }
    for (const auto* p : sorted(d.pools, [](const PoolDecl& x) { return x.id; }))
        decls.push_back("pool " + p->id + " " + quoted(p->name));
    for (const auto* c : sorted(d.contracts, [](const ContractDecl& x) { return x.id; }))
        decls.push_back("contract " + c->id + " " + quoted(c->name));
    section(decls);

    std::vector<std::string> body;
    for (const auto& s : d.statements) body.push_back(line(s));
    section(body);

    std::vector<std::string> ratios;
    for (const auto& r : d.ratios) ratios.push_back("ratio " + quoted(r.label) + " = " + format_number(r.value));
    section(ratios);
    return out;
}

}  // namespace flashot::dsl
