#include "collusion/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace collusion {

const char* validation_error_name(ValidationError e) {
    switch (e) {
        case ValidationError::None: return "None";
        case ValidationError::EmptyInstance: return "EmptyInstance";
        case ValidationError::NegativeValue: return "NegativeValue";
        case ValidationError::ZeroRow: return "ZeroRow";
        case ValidationError::BadShape: return "BadShape";
    }
    return "?";
}

ValidationResult validate_instance(const Instance& inst, bool fisher_use) {
    if (inst.n < 1 || inst.m < 1)
        return {ValidationError::EmptyInstance, "need n >= 1 and m >= 1"};
    if (static_cast<int>(inst.valuations.size()) != inst.n)
        return {ValidationError::BadShape, "valuation matrix has wrong row count"};
    for (int a = 0; a < inst.n; ++a) {
        const auto& row = inst.valuations[a];
        if (static_cast<int>(row.size()) != inst.m)
            return {ValidationError::BadShape,
                    "valuation row " + std::to_string(a) + " has wrong length"};
        bool any_positive = false;
        for (int g = 0; g < inst.m; ++g) {
            if (row[g] < 0)
                return {ValidationError::NegativeValue,
                        "v[" + std::to_string(a) + "][" + std::to_string(g) + "] < 0"};
            if (row[g] > 0) any_positive = true;
        }
        if (fisher_use && !any_positive)
            return {ValidationError::ZeroRow,
                    "agent " + std::to_string(a) + " values no good positively"};
    }
    return {};
}

ValidationResult validate_profile(const OrdinalProfile& profile, int n, int m) {
    if (static_cast<int>(profile.orderings.size()) != n)
        return {ValidationError::BadShape, "profile has wrong agent count"};
    for (int a = 0; a < n; ++a) {
        const auto& ord = profile.orderings[a];
        if (static_cast<int>(ord.size()) != m)
            return {ValidationError::BadShape,
                    "ordering " + std::to_string(a) + " has wrong length"};
        std::vector<bool> seen(m, false);
        for (int g : ord) {
            if (g < 0 || g >= m || seen[g])
                return {ValidationError::BadShape,
                        "ordering " + std::to_string(a) + " is not a permutation"};
            seen[g] = true;
        }
    }
    return {};
}

OrdinalProfile ordinal_from_cardinal(const Instance& inst) {
    OrdinalProfile profile;
    profile.orderings.resize(inst.n);
    for (int a = 0; a < inst.n; ++a) {
        auto& ord = profile.orderings[a];
        ord.resize(inst.m);
        std::iota(ord.begin(), ord.end(), 0);
        const auto& row = inst.valuations[a];
        std::stable_sort(ord.begin(), ord.end(),
                         [&row](int g, int h) { return row[g] > row[h]; });
    }
    return profile;
}

Rational utility(const Instance& inst, int agent, const std::vector<Rational>& shares_row) {
    Rational u = 0;
    for (int g = 0; g < inst.m; ++g) u += inst.valuations[agent][g] * shares_row[g];
    return u;
}

Rational utility(const Instance& inst, int agent, const std::vector<int>& bundle) {
    Rational u = 0;
    for (int g : bundle) u += inst.valuations[agent][g];
    return u;
}

Rational utility_of(const Instance& inst, int agent, const FractionalAllocation& alloc) {
    return utility(inst, agent, alloc.shares[agent]);
}

Rational utility_of(const Instance& inst, int agent, const IntegralAllocation& alloc) {
    return utility(inst, agent, alloc.bundles[agent]);
}

EnvyResult is_envy_free(const Instance& inst, const FractionalAllocation& alloc) {
    for (int a = 0; a < inst.n; ++a) {
        Rational own = utility(inst, a, alloc.shares[a]);
        for (int b = 0; b < inst.n; ++b) {
            if (b == a) continue;
            if (own < utility(inst, a, alloc.shares[b]))
                return {false, EnvyWitness{a, b}};
        }
    }
    return {};
}

EnvyResult is_ef1(const Instance& inst, const IntegralAllocation& alloc) {
    for (int a = 0; a < inst.n; ++a) {
        Rational own = utility(inst, a, alloc.bundles[a]);
        for (int b = 0; b < inst.n; ++b) {
            if (b == a || alloc.bundles[b].empty()) continue;
            Rational other = utility(inst, a, alloc.bundles[b]);
            // Removing the most valuable good is the best case.
            Rational best_drop = 0;
            for (int g : alloc.bundles[b]) best_drop = std::max(best_drop, inst.valuations[a][g]);
            if (own < other - best_drop) return {false, EnvyWitness{a, b}};
        }
    }
    return {};
}

double nash_welfare(const std::vector<Rational>& utilities) {
    double log_sum = 0.0;
    for (const auto& u : utilities) {
        if (u == 0) return 0.0;
        log_sum += std::log(to_double(u));
    }
    return std::exp(log_sum / static_cast<double>(utilities.size()));
}

double nash_welfare(const Instance& inst, const FractionalAllocation& alloc) {
    std::vector<Rational> utils(inst.n);
    for (int a = 0; a < inst.n; ++a) utils[a] = utility(inst, a, alloc.shares[a]);
    return nash_welfare(utils);
}

double nash_welfare(const Instance& inst, const IntegralAllocation& alloc) {
    std::vector<Rational> utils(inst.n);
    for (int a = 0; a < inst.n; ++a) utils[a] = utility(inst, a, alloc.bundles[a]);
    return nash_welfare(utils);
}

Rational snap_to_rational(double x, std::int64_t max_den, double max_err) {
    if (x < 0 && x > -max_err) x = 0.0;
    if (x <= 0) return Rational(0);
    double lo_target = x - max_err;
    double hi_target = x + max_err;
    // Integer part first; Stern-Brocot on the fraction.
    auto whole = static_cast<std::int64_t>(std::floor(x));
    double frac = x - static_cast<double>(whole);
    if (frac <= max_err) return Rational(whole);
    if (frac >= 1.0 - max_err) return Rational(whole + 1);
    std::int64_t lo_n = 0, lo_d = 1, hi_n = 1, hi_d = 1;
    double flo = lo_target - static_cast<double>(whole);
    double fhi = hi_target - static_cast<double>(whole);
    while (lo_d + hi_d <= max_den) {
        std::int64_t med_n = lo_n + hi_n;
        std::int64_t med_d = lo_d + hi_d;
        double med = static_cast<double>(med_n) / static_cast<double>(med_d);
        if (med < flo) {
            lo_n = med_n;
            lo_d = med_d;
        } else if (med > fhi) {
            hi_n = med_n;
            hi_d = med_d;
        } else {
            return Rational(whole) + Rational(med_n, med_d);
        }
    }
    // No simple fraction inside the window; fall back to a fixed grid.
    auto num = static_cast<std::int64_t>(std::llround(frac * static_cast<double>(max_den)));
    return Rational(whole) + Rational(num, max_den);
}

}  // namespace collusion
