#include "flashot/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "flashot/errors.hpp"

namespace flashot {

namespace {

constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

double effective_n_hi(const GridSpec& g, const MarketParams& m) { return g.n_hi > 0.0 ? g.n_hi : m.n_f; }

struct Counter {
    std::size_t evaluations = 0;
};

// objective at (n, n1), or -inf where the attack would revert
double guarded(const Objective& obj, const MarketParams& m, double n, double n1, Counter& c) {
    ++c.evaluations;
    const AttackParams a{m, n, n1};
    return is_feasible(a) ? obj(a) : kMinusInf;
}

// Bisects between an infeasible and a feasible n1 and returns the feasible end.
double bisect_boundary(const MarketParams& m, double n, double infeasible, double feasible, Counter& c) {
    while (std::abs(feasible - infeasible) > kIntervalBisectTol) {
        const double mid = 0.5 * (infeasible + feasible);
        ++c.evaluations;
        if (is_feasible({m, n, mid}))
            feasible = mid;
        else
            infeasible = mid;
    }
    return feasible;
}

std::vector<Interval> scan_intervals(double n, const MarketParams& m, Counter& c) {
    std::vector<Interval> out;
    const auto box = n1_box(n, m);
    if (!box) return out;

    const std::size_t samples = kIntervalScanSamples;
    const double width = box->hi - box->lo;
    auto at = [&](std::size_t i) { return box->lo + width * static_cast<double>(i) / static_cast<double>(samples); };

    bool in_run = false;
    double run_lo = 0.0;
    double prev = at(0);
    for (std::size_t i = 0; i <= samples; ++i) {
        const double x = at(i);
        ++c.evaluations;
        const bool ok = is_feasible({m, n, x});
        if (ok && !in_run) {
            run_lo = i == 0 ? x : bisect_boundary(m, n, prev, x, c);
            in_run = true;
        } else if (!ok && in_run) {
            out.push_back({run_lo, bisect_boundary(m, n, x, prev, c)});
            in_run = false;
        }
        prev = x;
    }
    if (in_run) out.push_back({run_lo, prev});
    return out;
}

struct Candidate {
    double n1;
    double value;
    Interval interval;
};

std::optional<Candidate> best_in_intervals(double n, const MarketParams& m, const GridSpec& g,
                                           const std::vector<Interval>& intervals, const Objective& obj,
                                           Counter& c) {
    std::optional<Candidate> best;
    for (const Interval& iv : intervals) {
        const std::size_t k = iv.hi > iv.lo ? std::max<std::size_t>(g.n1_samples, 2) : 1;
        std::vector<double> xs(k), vs(k);
        for (std::size_t i = 0; i < k; ++i) {
            xs[i] = k == 1 ? iv.lo : iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / static_cast<double>(k - 1);
            vs[i] = guarded(obj, m, n, xs[i], c);
        }
        const double top = *std::max_element(vs.begin(), vs.end());
        if (top == kMinusInf) continue;
        // smallest n1 whose value is within refine_tol of the sampled maximum
        std::size_t pick = 0;
        while (vs[pick] < top - g.refine_tol) ++pick;

        const double a = xs[pick == 0 ? 0 : pick - 1];
        const double b = xs[pick + 1 < k ? pick + 1 : k - 1];
        const LineMaximum lm = golden_section_maximize(
            [&](double x) { return guarded(obj, m, n, x, c); }, a, b, xs[pick], vs[pick], g.refine_tol,
            g.max_refine_iters);

        if (!best || lm.fx > best->value + g.refine_tol) best = Candidate{lm.x, lm.fx, iv};
    }
    return best;
}

OptimizationResult finish(const MarketParams& m, double n, const Candidate& cand, Method method, std::size_t evals) {
    OptimizationResult r;
    r.n = n;
    r.n1 = cand.n1;
    r.p_p = predictable_profit_value({m, n, cand.n1});
    r.objective = cand.value;
    r.evaluations = evals;
    r.feasible_interval_at_n = cand.interval;
    r.method = method;
    return r;
}

std::optional<OptimizationResult> given_n(double n, const MarketParams& m, const GridSpec& g, const Objective& obj,
                                          Counter& c) {
    const auto intervals = scan_intervals(n, m, c);
    const auto cand = best_in_intervals(n, m, g, intervals, obj, c);
    if (!cand) return std::nullopt;
    return finish(m, n, *cand, Method::grid, c.evaluations);
}

}  // namespace

void GridSpec::validate() const {
    if (!(n_step > 0.0)) throw DomainError("grid: n_step must be positive");
    if (!(refine_tol > 0.0)) throw DomainError("grid: refine_tol must be positive");
    if (n1_samples == 0 || max_refine_iters == 0) throw DomainError("grid: sample and iteration counts must be positive");
    if (!(n_lo > 0.0)) throw DomainError("grid: n_lo must be positive");
    if (n_hi > 0.0 && !(n_lo < n_hi)) throw DomainError("grid: n_lo must be below n_hi");
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::grid: return "grid";
        case Method::refined: return "refined";
        case Method::oracle: return "oracle";
    }
    return "?";
}

Objective predictable_profit_objective() {
    return [](const AttackParams& a) { return predictable_profit_value(a); };
}

Objective contingent_inner_objective(double p_eval) {
    if (!(p_eval > 0.0)) throw DomainError("contingent objective: p_eval must be positive");
    return [p_eval](const AttackParams& a) { return contingent_pc1_inner(a, p_eval); };
}

std::vector<Interval> feasible_interval(double n, const MarketParams& market) {
    if (!(n > 0.0) || !at_most(n, market.n_f)) throw DomainError("feasible_interval: n must lie in (0, n_f]");
    Counter c;
    return scan_intervals(n, market, c);
}

std::optional<OptimizationResult> maximize_given_n(double n, const MarketParams& market, const GridSpec& grid,
                                                   const Objective& objective) {
    grid.validate();
    if (!(n > 0.0) || !at_most(n, market.n_f)) throw DomainError("maximize_given_n: n must lie in (0, n_f]");
    Counter c;
    auto r = given_n(n, market, grid, objective, c);
    if (r) r->method = Method::refined;
    return r;
}

std::optional<OptimizationResult> maximize_global(const MarketParams& market, const GridSpec& grid, unsigned workers,
                                                  const Objective& objective) {
    grid.validate();
    const double n_hi = effective_n_hi(grid, market);
    if (n_hi > market.n_f && !at_most(n_hi, market.n_f)) throw DomainError("maximize_global: n_hi exceeds n_f");
    if (!(grid.n_lo <= n_hi)) return std::nullopt;

    const auto count = static_cast<std::size_t>(std::floor((n_hi - grid.n_lo) / grid.n_step + 1e-9)) + 1;
    auto n_at = [&](std::size_t i) { return grid.n_lo + grid.n_step * static_cast<double>(i); };

    std::vector<std::optional<OptimizationResult>> per_n(count);
    auto run = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            Counter c;
            per_n[i] = given_n(n_at(i), market, grid, objective, c);
        }
    };

    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
    if (workers == 1) {
        run(0, count);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (unsigned w = 0; w < workers; ++w) {
            const std::size_t b = std::min(count, w * chunk);
            const std::size_t e = std::min(count, b + chunk);
            pool.emplace_back(run, b, e);
        }
        for (auto& t : pool) t.join();
    }

    // Ordered reduction: smallest n among the values within refine_tol of the best.
    std::size_t evaluations = 0;
    double top = kMinusInf;
    for (const auto& r : per_n) {
        if (!r) continue;
        evaluations += r->evaluations;
        top = std::max(top, r->objective);
    }
    if (top == kMinusInf) return std::nullopt;
    std::size_t pick = 0;
    while (!per_n[pick] || per_n[pick]->objective < top - grid.refine_tol) ++pick;
    OptimizationResult incumbent = *per_n[pick];

    // Local refinement of the profile g(n) = max over n1 of the objective.
    Counter c;
    auto profile = [&](double n) {
        if (!(n > 0.0) || !at_most(n, market.n_f)) return kMinusInf;
        const auto r = given_n(n, market, grid, objective, c);
        return r ? r->objective : kMinusInf;
    };
    const double lo = std::max(grid.n_lo, incumbent.n - grid.n_step);
    const double hi = std::min(n_hi, incumbent.n + grid.n_step);
    const LineMaximum lm =
        golden_section_maximize(profile, lo, hi, incumbent.n, incumbent.objective, grid.refine_tol, grid.max_refine_iters);

    OptimizationResult out = incumbent;
    if (lm.fx > incumbent.objective) {
        Counter once;
        if (auto r = given_n(lm.x, market, grid, objective, once)) out = *r;
    }
    out.method = Method::refined;
    out.evaluations = evaluations + c.evaluations;
    return out;
}

std::optional<OptimizationResult> brute_force_oracle(const MarketParams& market, std::size_t n_points,
                                                     std::size_t n1_points, const Objective& objective) {
    if (n_points < 2 || n1_points < 2) throw DomainError("brute_force_oracle: grid counts must be at least 2");
    std::optional<OptimizationResult> best;
    std::size_t evaluations = 0;
    for (std::size_t i = 1; i <= n_points; ++i) {
        const double n = market.n_f * static_cast<double>(i) / static_cast<double>(n_points);
        for (std::size_t j = 1; j <= n1_points; ++j) {
            const double n1 = n * static_cast<double>(j) / static_cast<double>(n1_points + 1);
            const AttackParams a{market, n, n1};
            ++evaluations;
            const AttackOutcome o = predictable_profit(a);
            if (!o.feasible) continue;
            const double v = objective(a);
            if (!best || v > best->objective) {
                OptimizationResult r;
                r.n = n;
                r.n1 = n1;
                r.p_p = o.p_p;
                r.objective = v;
                r.feasible_interval_at_n = {n1, n1};
                r.method = Method::oracle;
                best = r;
            }
        }
    }
    if (best) best->evaluations = evaluations;
    return best;
}

LineMaximum golden_section_maximize(const std::function<double(double)>& f, double a, double b, double x0, double f0,
                                    double tol, std::size_t max_iters) {
    static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    LineMaximum out{x0, f0, 0, {}};
    if (a > b) std::swap(a, b);

    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    out.evaluations += 2;
    auto offer = [&out](double x, double fx) {
        if (fx > out.fx) {
            out.x = x;
            out.fx = fx;
        }
    };

    for (std::size_t it = 0; it < max_iters && (b - a) > tol; ++it) {
        offer(c, fc);
        offer(d, fd);
        // ties move toward the smaller end
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        ++out.evaluations;
        out.incumbents.push_back(out.fx);
    }
    offer(c, fc);
    offer(d, fd);
    out.incumbents.push_back(out.fx);
    return out;
}

std::vector<CurvePoint> profit_curve(double n, const MarketParams& market, std::size_t samples) {
    std::vector<CurvePoint> out;
    const auto box = n1_box(n, market);
    if (!box || samples < 2) return out;
    out.reserve(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        const double n1 = box->lo + (box->hi - box->lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
        const AttackParams a{market, n, n1};
        out.push_back({n1, predictable_profit_value(a), is_feasible(a)});
    }
    return out;
}

}  // namespace flashot
