#include "flashot/validator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace flashot::dsl {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool balanced(double whole, double parts) {
    return std::abs(whole - parts) <= kConservationTol * std::max(std::abs(whole), std::abs(parts));
}

struct Produced {
    const AssetInstance* inst;
    std::size_t at;
    bool consumed = false;
    bool proceeds = false;
};

class Checker {
public:
    explicit Checker(const Diagram& d) : d_(d) {}

    ValidationReport run() {
        declarations();
        if (d_.statements.empty()) warn(code::empty_diagram, std::nullopt, "empty diagram", {});
        for (std::size_t i = 0; i < d_.statements.size(); ++i) statement(i);
        loans();
        for (const auto& id : order_) {
            const Produced& p = instances_.at(id);
            if (!p.consumed && !p.proceeds)
                warn(code::dangling_asset, p.at, "dangling asset '" + id + "' is neither used nor a proceed",
                     p.inst->loc);
        }
        std::stable_sort(report_.findings.begin(), report_.findings.end(), [](const Finding& a, const Finding& b) {
            // declarations (no statement) first, then statement order
            const auto ka = a.statement ? *a.statement + 1 : 0;
            const auto kb = b.statement ? *b.statement + 1 : 0;
            return ka < kb;
        });
        return std::move(report_);
    }

private:
    void error(std::string_view c, std::optional<std::size_t> at, std::string msg, SourceLoc loc) {
        report_.findings.push_back({std::string(c), at, std::move(msg), Severity::error, loc});
    }
    void warn(std::string_view c, std::optional<std::size_t> at, std::string msg, SourceLoc loc) {
        report_.findings.push_back({std::string(c), at, std::move(msg), Severity::warning, loc});
    }

    template <class Decl, class Key>
    void unique(const std::vector<Decl>& decls, Key key, std::set<std::string>& ids, std::string_view what) {
        for (const auto& x : decls) {
            if (!ids.insert(key(x)).second)
                error(code::duplicate_declaration, std::nullopt,
                      std::string(what) + " '" + key(x) + "' declared more than once", x.loc);
        }
    }

    void declarations() {
        std::set<std::string> tickers;
        unique(d_.assets, [](const AssetDecl& a) { return a.ticker; }, tickers, "asset");
        for (const auto& a : d_.assets) debt_[a.ticker] = a.is_debt;
        unique(d_.pools, [](const PoolDecl& p) { return p.id; }, pools_, "pool");
        unique(d_.contracts, [](const ContractDecl& c) { return c.id; }, contracts_, "contract");
        for (const auto& r : d_.ratios)
            if (!std::isfinite(r.value))
                error(code::invalid_amount, std::nullopt, "ratio \"" + r.label + "\" is not finite", r.loc);
    }

    void need_pool(const std::string& id, std::size_t at, SourceLoc loc) {
        if (!pools_.count(id)) error(code::undeclared_reference, at, "undeclared pool '" + id + "'", loc);
    }
    void need_contract(const std::string& id, std::size_t at, SourceLoc loc) {
        if (!contracts_.count(id)) error(code::undeclared_reference, at, "undeclared contract '" + id + "'", loc);
    }

    void produce(const AssetInstance& a, std::size_t at) {
        if (!debt_.count(a.ticker))
            error(code::undeclared_reference, at, "undeclared asset '" + a.ticker + "'", a.loc);
        if (!std::isfinite(a.amount) || a.amount <= 0)
            error(code::invalid_amount, at, "amount of '" + a.id + "' must be positive, got " + num(a.amount), a.loc);
        if (instances_.count(a.id)) {
            error(code::duplicate_instance, at, "asset instance '" + a.id + "' produced more than once", a.loc);
            return;
        }
        instances_.emplace(a.id, Produced{&a, at});
        order_.push_back(a.id);
    }

    // Returns the instance when the reference is usable.
    const AssetInstance* consume(const std::string& id, std::size_t at, SourceLoc loc) {
        const auto it = instances_.find(id);
        if (it == instances_.end()) {
            error(code::undeclared_reference, at, "asset instance '" + id + "' is used before it is produced", loc);
            return nullptr;
        }
        Produced& p = it->second;
        if (p.proceeds)
            error(code::proceed_consumed, at, "proceed '" + id + "' cannot be used again", loc);
        else if (p.consumed)
            error(code::double_spend, at, "asset instance '" + id + "' is used more than once", loc);
        p.consumed = true;
        return p.inst;
    }

    void statement(std::size_t i) {
        const Statement& s = d_.statements[i];
        const SourceLoc loc = s.loc;
        if (const auto* l = std::get_if<Loan>(&s.body)) {
            need_pool(l->pool, i, loc);
            need_contract(l->via, i, loc);
            produce(l->out, i);
        } else if (const auto* t = std::get_if<Transform>(&s.body)) {
            if (t->inputs.empty() || t->outputs.empty())
                error(code::arity, i, "transform needs at least one input and one output", loc);
            need_contract(t->via, i, loc);
            if (t->pool) need_pool(*t->pool, i, loc);
            for (const auto& in : t->inputs) consume(in, i, loc);
            for (const auto& o : t->outputs) produce(o, i);
        } else if (const auto* sp = std::get_if<Split>(&s.body)) {
            if (sp->outputs.empty()) error(code::arity, i, "split needs at least one part", loc);
            const AssetInstance* in = consume(sp->input, i, loc);
            double parts = 0;
            for (const auto& o : sp->outputs) {
                produce(o, i);
                parts += o.amount;
                if (in && o.ticker != in->ticker)
                    error(code::ticker_mismatch, i,
                          "split part '" + o.id + "' is " + o.ticker + " but '" + in->id + "' is " + in->ticker, o.loc);
            }
            if (in && !sp->outputs.empty() && !balanced(in->amount, parts))
                error(code::split_conservation, i,
                      "split of '" + in->id + "' (" + num(in->amount) + ") into parts summing to " + num(parts), loc);
        } else if (const auto* m = std::get_if<Merge>(&s.body)) {
            if (m->inputs.empty()) error(code::arity, i, "merge needs at least one part", loc);
            double parts = 0;
            bool known = true;
            for (const auto& id : m->inputs) {
                const AssetInstance* in = consume(id, i, loc);
                if (!in) {
                    known = false;
                    continue;
                }
                parts += in->amount;
                if (in->ticker != m->output.ticker)
                    error(code::ticker_mismatch, i,
                          "merge part '" + id + "' is " + in->ticker + " but the bulk is " + m->output.ticker, loc);
            }
            produce(m->output, i);
            if (known && !m->inputs.empty() && !balanced(m->output.amount, parts))
                error(code::merge_conservation, i,
                      "merge into '" + m->output.id + "' (" + num(m->output.amount) + ") of parts summing to " +
                          num(parts),
                      loc);
        } else if (const auto* r = std::get_if<Repay>(&s.body)) {
            need_pool(r->pool, i, loc);
            need_contract(r->via, i, loc);
            if (const AssetInstance* in = consume(r->input, i, loc)) repays_.push_back({i, r->pool, in});
        } else if (const auto* p = std::get_if<Proceed>(&s.body)) {
            const auto it = instances_.find(p->instance);
            if (it == instances_.end()) {
                error(code::undeclared_reference, i, "proceed of unknown instance '" + p->instance + "'", loc);
            } else if (it->second.consumed || it->second.proceeds) {
                error(code::double_spend, i, "'" + p->instance + "' is already used and cannot be a proceed", loc);
            } else {
                it->second.proceeds = true;
            }
        }
    }

    // Each loan takes the first later, unclaimed repay to the same pool in the same asset.
    void loans() {
        std::vector<bool> claimed(repays_.size(), false);
        for (std::size_t i = 0; i < d_.statements.size(); ++i) {
            const auto* l = std::get_if<Loan>(&d_.statements[i].body);
            if (!l) continue;
            bool paid = false;
            for (std::size_t k = 0; k < repays_.size() && !paid; ++k) {
                const RepayRef& r = repays_[k];
                if (claimed[k] || r.at < i || r.pool != l->pool || r.inst->ticker != l->out.ticker) continue;
                claimed[k] = paid = true;
                if (r.inst->amount < l->out.amount)
                    error(code::loan_underpaid, r.at,
                          "repay of '" + r.inst->id + "' (" + num(r.inst->amount) + ") is short of loan '" +
                              l->out.id + "' (" + num(l->out.amount) + ")",
                          d_.statements[r.at].loc);
            }
            if (!paid)
                error(code::loan_unpaid, i,
                      "loan '" + l->out.id + "' from pool '" + l->pool + "' is never repaid to that pool",
                      d_.statements[i].loc);
        }
    }

    struct RepayRef {
        std::size_t at;
        std::string pool;
        const AssetInstance* inst;
    };

    const Diagram& d_;
    ValidationReport report_;
    std::map<std::string, bool> debt_;
    std::set<std::string> pools_;
    std::set<std::string> contracts_;
    std::map<std::string, Produced> instances_;
    std::vector<std::string> order_;
    std::vector<RepayRef> repays_;
};

}  // namespace

bool ValidationReport::ok() const { return error_count() == 0; }

std::size_t ValidationReport::error_count() const {
    return static_cast<std::size_t>(std::count_if(findings.begin(), findings.end(),
                                                  [](const Finding& f) { return f.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return findings.size() - error_count(); }

bool ValidationReport::has(std::string_view c) const {
    return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == c; });
}

ValidationReport validate(const Diagram& d) { return Checker(d).run(); }

}  // namespace flashot::dsl
