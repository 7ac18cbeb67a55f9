#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "collusion/types.hpp"

namespace collusion::fisher {

/// Per-good prices; positive for every good some agent values.
struct PriceVector {
    std::vector<double> p;
};

struct ResidualReport {
    double clearing = 0.0;  // max_g |sum_a x_{a,g} - 1|
    double budget = 0.0;    // max_a |p . x_a - 1|
    double mbb = 0.0;       // worst bang-per-buck gap on positively held goods
};

struct MarketOutcome {
    std::vector<std::vector<double>> allocation;  // n x m
    PriceVector prices;
    ResidualReport residuals;
    int iterations = 0;
};

struct NoConvergence : std::runtime_error {
    ResidualReport residuals;
    explicit NoConvergence(const std::string& what, ResidualReport r)
        : std::runtime_error(what), residuals(r) {}
};

struct PreconditionViolated : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Proportional-response bid dynamics for the linear Fisher market with unit
/// budgets. Stops when the max relative price change drops to tol; throws
/// NoConvergence after max_iter rounds.
MarketOutcome proportional_response_solve(const Instance& inst, double tol = 1e-10,
                                          int max_iter = 1000000);

/// Clearing, budget, and maximum-bang-per-buck residuals of an outcome.
/// Goods priced zero and valued by nobody are skipped in the clearing check
/// only when they carry no allocation mass.
ResidualReport verify_equilibrium(const Instance& inst, const MarketOutcome& outcome,
                                  double tol = 1e-9);

/// How the goods nobody values are distributed; the equilibrium leaves them
/// free.
struct ZeroGoodPolicy {
    enum class Kind { Uniform, ToAgent, Explicit };
    Kind kind = Kind::Uniform;
    int agent = -1;                                   // ToAgent
    std::map<int, std::vector<Rational>> shares;      // Explicit: good -> per-agent shares

    static ZeroGoodPolicy uniform() { return {}; }
    static ZeroGoodPolicy to_agent(int a) { return {Kind::ToAgent, a, {}}; }
    static ZeroGoodPolicy explicit_shares(std::map<int, std::vector<Rational>> s) {
        return {Kind::Explicit, -1, std::move(s)};
    }
};

struct MnwResult {
    FractionalAllocation allocation;  // rationalized, columns sum exactly 1
    MarketOutcome outcome;
};

/// MNW allocation via the Fisher-market equilibrium. Shares are snapped to
/// rationals (denominator <= snap_den, drift <= snap_err) and columns are
/// renormalized to sum exactly 1.
MnwResult mnw_allocate(const Instance& inst, const ZeroGoodPolicy& policy = {},
                       double tol = 1e-10, int max_iter = 1000000,
                       std::int64_t snap_den = 1000000, double snap_err = 1e-6);

struct SpendingMonotonicityReport {
    bool holds = false;
    double decreased_spend_before = 0.0;  // spend on S under (p, x)
    double decreased_spend_after = 0.0;   // spend on S under (p', x')
    double other_spend_before = 0.0;
    double other_spend_after = 0.0;
};

/// Spending shifts toward the goods whose prices dropped: checks
/// sum_{g in S} x_g p_g <= sum_{g in S} x'_g p'_g + tol and the reverse
/// inequality on the complement, for S = {g : p_g > p'_g}. Both bundles must
/// be demand-optimal at their prices (MBB gap <= tol), else
/// PreconditionViolated.
SpendingMonotonicityReport spending_monotonicity_check(
    const Instance& inst, int agent, const std::vector<double>& p,
    const std::vector<double>& p_prime, const std::vector<double>& x,
    const std::vector<double>& x_prime, double tol);

}  // namespace collusion::fisher
