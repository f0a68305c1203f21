#pragma once

#include <optional>
#include <string>
#include <vector>

#include "flashot/amm.hpp"
#include "flashot/attack_model.hpp"
#include "flashot/errors.hpp"

namespace flashot {

// Tickers used by simulated traces.
inline constexpr const char* kEth = "ETH";
inline constexpr const char* kWbtc = "wBTC";
inline constexpr const char* kCeth = "cETH";
inline constexpr const char* kDebtWbtc = "debt-wBTC";
inline constexpr const char* kPosition = "sETHwBTC5x";

enum class Venue { flash_pool, lending_pool, margin_vault, amm };

struct StepRecord {
    int step_index = 0;
    std::string description;
    Venue venue = Venue::flash_pool;
    std::vector<AssetAmount> inputs;    // leaving the attacker
    std::vector<AssetAmount> outputs;   // reaching the attacker
    std::vector<AssetAmount> internal;  // protocol-side flows done on the attacker's behalf
    std::optional<CpmmPool> pool_before;
    std::optional<CpmmPool> pool_after;
};

struct SimulationOptions {
    double flash_loan_fee = 0.0;          // ETH added to the repayment
    bool contingent_steps = false;        // append closing (7) and redemption (8)
    double collateral_token_rate = 1.0;   // cETH minted per ETH of collateral
};

struct AttackTrace {
    AttackParams params;
    SimulationOptions options;
    std::vector<StepRecord> steps;
    AttackOutcome outcome;
};

/// Raised by simulate_attack on parameters that would revert.
class InfeasibleAttack : public DomainError {
public:
    explicit InfeasibleAttack(FeasibilityReport report);
    const FeasibilityReport& report() const { return report_; }

private:
    FeasibilityReport report_;
};

/// Replays the attack step by step against the pool. Steps 1-6 always;
/// 7-8 when options.contingent_steps is set.
AttackTrace simulate_attack(const AttackParams& params, const SimulationOptions& options = {});

/// Checks index ordering and pool snapshot continuity. Throws DomainError
/// naming the offending step.
void check_trace(const AttackTrace& trace);

}  // namespace flashot
