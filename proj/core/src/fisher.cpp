#include "collusion/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collusion::fisher {

namespace {

double mbb_gap(const Instance& inst, const std::vector<double>& p,
               const std::vector<double>& x_row, int agent, double hold_tol) {
    double best = 0.0;
    for (int g = 0; g < inst.m; ++g) {
        double v = to_double(inst.valuations[agent][g]);
        if (v <= 0.0) continue;
        if (p[g] <= 0.0) return std::numeric_limits<double>::infinity();
        best = std::max(best, v / p[g]);
    }
    double worst = 0.0;
    for (int g = 0; g < inst.m; ++g) {
        if (x_row[g] <= hold_tol) continue;
        double v = to_double(inst.valuations[agent][g]);
        double ratio = p[g] > 0.0 ? v / p[g] : 0.0;
        worst = std::max(worst, best - ratio);
    }
    return worst;
}

}  // namespace

MarketOutcome proportional_response_solve(const Instance& inst, double tol, int max_iter) {
    auto valid = validate_instance(inst, /*fisher_use=*/true);
    if (!valid.ok())
        throw PreconditionViolated(std::string("invalid instance: ") +
                                   validation_error_name(valid.error) + ": " + valid.detail);
    if (tol <= 0.0) throw PreconditionViolated("tol must be positive");

    const int n = inst.n, m = inst.m;
    std::vector<std::vector<double>> value(n, std::vector<double>(m));
    for (int a = 0; a < n; ++a)
        for (int g = 0; g < m; ++g) value[a][g] = to_double(inst.valuations[a][g]);

    // b0_{a,g} proportional to v_a(g), normalized to the unit budget.
    std::vector<std::vector<double>> bids(n, std::vector<double>(m, 0.0));
    for (int a = 0; a < n; ++a) {
        double total = 0.0;
        for (int g = 0; g < m; ++g) total += value[a][g];
        for (int g = 0; g < m; ++g) bids[a][g] = value[a][g] / total;
    }

    std::vector<double> prices(m, 0.0), prev_prices(m, 0.0);
    std::vector<std::vector<double>> x(n, std::vector<double>(m, 0.0));
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        for (int g = 0; g < m; ++g) {
            prices[g] = 0.0;
            for (int a = 0; a < n; ++a) prices[g] += bids[a][g];
        }
        for (int a = 0; a < n; ++a)
            for (int g = 0; g < m; ++g)
                x[a][g] = prices[g] > 0.0 ? bids[a][g] / prices[g] : 0.0;
        double price_delta = 0.0;
        if (iter > 0) {
            for (int g = 0; g < m; ++g) {
                if (prices[g] <= 0.0 && prev_prices[g] <= 0.0) continue;
                double base = std::max(prices[g], prev_prices[g]);
                price_delta = std::max(price_delta, std::abs(prices[g] - prev_prices[g]) / base);
            }
        }
        prev_prices = prices;
        // Bid movement must settle too: prices can be stationary (symmetric
        // markets) while spending still redistributes.
        double bid_delta = 0.0;
        for (int a = 0; a < n; ++a) {
            double u = 0.0;
            for (int g = 0; g < m; ++g) u += value[a][g] * x[a][g];
            for (int g = 0; g < m; ++g) {
                double next = u > 0.0 ? value[a][g] * x[a][g] / u : 0.0;
                bid_delta = std::max(bid_delta, std::abs(next - bids[a][g]));
                bids[a][g] = next;
            }
            // Dust on clearly sub-optimal goods decays geometrically and can
            // stall just above any holding threshold; cut it to exactly zero
            // once it is negligible and renormalize the budget.
            double best = 0.0;
            for (int g = 0; g < m; ++g)
                if (value[a][g] > 0.0 && prices[g] > 0.0)
                    best = std::max(best, value[a][g] / prices[g]);
            double kept = 0.0;
            for (int g = 0; g < m; ++g) {
                if (bids[a][g] > 0.0 && bids[a][g] < 1e-7 && prices[g] > 0.0 &&
                    value[a][g] / prices[g] < best * (1.0 - 1e-6))
                    bids[a][g] = 0.0;
                kept += bids[a][g];
            }
            if (kept > 0.0 && kept != 1.0)
                for (int g = 0; g < m; ++g) bids[a][g] /= kept;
        }
        if (iter > 0 && price_delta <= tol && bid_delta <= tol) break;
    }

    // Polish toward the double-precision fixed point so that shares can be
    // snapped back to exact rationals afterwards.
    for (int extra = 0; extra < 20000 && iter < max_iter; ++extra) {
        for (int g = 0; g < m; ++g) {
            prices[g] = 0.0;
            for (int a = 0; a < n; ++a) prices[g] += bids[a][g];
        }
        for (int a = 0; a < n; ++a)
            for (int g = 0; g < m; ++g)
                x[a][g] = prices[g] > 0.0 ? bids[a][g] / prices[g] : 0.0;
        double bid_delta = 0.0;
        for (int a = 0; a < n; ++a) {
            double u = 0.0;
            for (int g = 0; g < m; ++g) u += value[a][g] * x[a][g];
            for (int g = 0; g < m; ++g) {
                double next = u > 0.0 ? value[a][g] * x[a][g] / u : 0.0;
                bid_delta = std::max(bid_delta, std::abs(next - bids[a][g]));
                bids[a][g] = next;
            }
        }
        if (bid_delta <= 1e-15) break;
    }

    MarketOutcome outcome;
    outcome.allocation = x;
    outcome.prices.p = prices;
    outcome.iterations = iter;
    outcome.residuals = verify_equilibrium(inst, outcome);
    if (iter >= max_iter)
        throw NoConvergence("proportional response did not converge in " +
                                std::to_string(max_iter) + " iterations",
                            outcome.residuals);
    return outcome;
}

ResidualReport verify_equilibrium(const Instance& inst, const MarketOutcome& outcome,
                                  double tol) {
    ResidualReport report;
    const int n = inst.n, m = inst.m;
    for (int g = 0; g < m; ++g) {
        double mass = 0.0;
        for (int a = 0; a < n; ++a) mass += outcome.allocation[a][g];
        bool valued = false;
        for (int a = 0; a < n; ++a) valued = valued || inst.valuations[a][g] > 0;
        if (!valued && outcome.prices.p[g] <= 0.0 && mass == 0.0) continue;
        report.clearing = std::max(report.clearing, std::abs(mass - 1.0));
    }
    for (int a = 0; a < n; ++a) {
        double spend = 0.0;
        for (int g = 0; g < m; ++g) spend += outcome.prices.p[g] * outcome.allocation[a][g];
        report.budget = std::max(report.budget, std::abs(spend - 1.0));
        report.mbb = std::max(report.mbb, mbb_gap(inst, outcome.prices.p,
                                                  outcome.allocation[a], a, tol));
    }
    return report;
}

namespace {

// Snap with the tightest window that still contains a simple rational: a wide
// window around an accurate solve can contain a rational that is simpler than
// the true equilibrium share, which silently breaks exact utility ties.
Rational snap_share(double x, std::int64_t max_den, double max_err) {
    for (double w = 1e-12; w < max_err; w *= 10.0) {
        Rational r = snap_to_rational(x, max_den, w);
        if (std::abs(to_double(r) - x) <= w) return r;
    }
    return snap_to_rational(x, max_den, max_err);
}

}  // namespace

MnwResult mnw_allocate(const Instance& inst, const ZeroGoodPolicy& policy, double tol,
                       int max_iter, std::int64_t snap_den, double snap_err) {
    MnwResult result;
    result.outcome = proportional_response_solve(inst, tol, max_iter);
    const int n = inst.n, m = inst.m;
    result.allocation.shares.assign(n, std::vector<Rational>(m, Rational(0)));

    for (int g = 0; g < m; ++g) {
        bool valued = false;
        for (int a = 0; a < n; ++a) valued = valued || inst.valuations[a][g] > 0;
        if (valued) {
            Rational column = 0;
            int top = 0;
            for (int a = 0; a < n; ++a) {
                Rational s = snap_share(result.outcome.allocation[a][g], snap_den, snap_err);
                result.allocation.shares[a][g] = s;
                column += s;
                if (s > result.allocation.shares[top][g]) top = a;
            }
            // Exact renormalization: push the snap drift into the largest share.
            result.allocation.shares[top][g] += Rational(1) - column;
        } else {
            switch (policy.kind) {
                case ZeroGoodPolicy::Kind::Uniform:
                    for (int a = 0; a < n; ++a)
                        result.allocation.shares[a][g] = Rational(1, n);
                    break;
                case ZeroGoodPolicy::Kind::ToAgent:
                    result.allocation.shares[policy.agent][g] = 1;
                    break;
                case ZeroGoodPolicy::Kind::Explicit: {
                    auto it = policy.shares.find(g);
                    if (it == policy.shares.end())
                        throw PreconditionViolated("no explicit shares for zero-valued good " +
                                                   std::to_string(g));
                    Rational column = 0;
                    for (int a = 0; a < n; ++a) {
                        result.allocation.shares[a][g] = it->second[a];
                        column += it->second[a];
                    }
                    if (column != 1)
                        throw PreconditionViolated("explicit shares for good " +
                                                   std::to_string(g) + " do not sum to 1");
                    break;
                }
            }
        }
    }
    return result;
}

SpendingMonotonicityReport spending_monotonicity_check(
    const Instance& inst, int agent, const std::vector<double>& p,
    const std::vector<double>& p_prime, const std::vector<double>& x,
    const std::vector<double>& x_prime, double tol) {
    if (mbb_gap(inst, p, x, agent, tol) > tol)
        throw PreconditionViolated("x is not demand-optimal at p");
    if (mbb_gap(inst, p_prime, x_prime, agent, tol) > tol)
        throw PreconditionViolated("x' is not demand-optimal at p'");

    SpendingMonotonicityReport report;
    for (int g = 0; g < inst.m; ++g) {
        bool decreased = p[g] > p_prime[g];
        if (decreased) {
            report.decreased_spend_before += x[g] * p[g];
            report.decreased_spend_after += x_prime[g] * p_prime[g];
        } else {
            report.other_spend_before += x[g] * p[g];
            report.other_spend_after += x_prime[g] * p_prime[g];
        }
    }
    report.holds = report.decreased_spend_before <= report.decreased_spend_after + tol &&
                   report.other_spend_after <= report.other_spend_before + tol;
    return report;
}

}  // namespace collusion::fisher
