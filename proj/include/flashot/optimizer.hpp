#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "flashot/attack_model.hpp"

namespace flashot {

/// Closed range of collateral allocations n1 (ETH) at a fixed loan size.
struct Interval {
    double lo;
    double hi;

    bool contains(double x) const { return lo <= x && x <= hi; }
};

struct GridSpec {
    double n_lo = 1.0;
    double n_hi = 0.0;  // 0 means "up to the flash-loan capacity"
    double n_step = 1.0;
    std::size_t n1_samples = 2000;
    double refine_tol = 1e-3;
    std::size_t max_refine_iters = 200;

    void validate() const;
};

enum class Method { grid, refined, oracle };
std::string_view method_name(Method m);

struct OptimizationResult {
    double n = 0.0;
    double n1 = 0.0;
    double p_p = 0.0;        // predictable profit at (n, n1)
    double objective = 0.0;  // value of the maximized objective (== p_p by default)
    std::size_t evaluations = 0;
    Interval feasible_interval_at_n{};
    Method method = Method::grid;
};

/// Quantity maximized over the feasible region.
using Objective = std::function<double(const AttackParams&)>;

Objective predictable_profit_objective();
/// Unclamped contingent closing value at price p_eval.
Objective contingent_inner_objective(double p_eval);

/// Number of uniform samples used by the interval sign scan.
inline constexpr std::size_t kIntervalScanSamples = 10000;
/// Bisection width for interval endpoints, ETH.
inline constexpr double kIntervalBisectTol = 1e-6;

/// Maximal n1 sub-intervals at loan size n on which the attack does not
/// revert. Endpoints are feasible points within kIntervalBisectTol of the
/// boundary. Throws DomainError unless 0 < n <= n_f.
std::vector<Interval> feasible_interval(double n, const MarketParams& market);

/// Best n1 at a fixed n: dense sampling of every feasible interval, then
/// golden-section refinement around the best sample. nullopt when no n1 is feasible.
std::optional<OptimizationResult> maximize_given_n(double n, const MarketParams& market, const GridSpec& grid,
                                                   const Objective& objective = predictable_profit_objective());

/// Outer scan over n followed by a local refinement of the profile
/// max_n1 objective(n, n1). `workers` > 1 splits the scan across threads;
/// the reduction is ordered so the result does not depend on it.
std::optional<OptimizationResult> maximize_global(const MarketParams& market, const GridSpec& grid,
                                                  unsigned workers = 1,
                                                  const Objective& objective = predictable_profit_objective());

/// Exhaustive rectangular grid n in (0, n_f], n1 in (0, n). Shares nothing
/// with the optimizer beyond the profit and feasibility evaluations.
std::optional<OptimizationResult> brute_force_oracle(const MarketParams& market, std::size_t n_points,
                                                     std::size_t n1_points,
                                                     const Objective& objective = predictable_profit_objective());

struct LineMaximum {
    double x;
    double fx;
    std::size_t evaluations;
    std::vector<double> incumbents;  // best value after each iteration
};

/// Golden-section maximization of f on [a, b] that never gives up the
/// incumbent (x0, f0). Stops when the bracket is narrower than tol.
LineMaximum golden_section_maximize(const std::function<double(double)>& f, double a, double b, double x0,
                                    double f0, double tol, std::size_t max_iters);

struct CurvePoint {
    double n1;
    double p_p;
    bool feasible;
};

/// Predictable profit sampled uniformly over the admissible n1 box at n.
std::vector<CurvePoint> profit_curve(double n, const MarketParams& market, std::size_t samples);

}  // namespace flashot
