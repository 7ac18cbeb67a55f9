#pragma once

#include <optional>
#include <utility>

#include "collusion/types.hpp"

namespace collusion {

/// Strict ordering per agent consistent with the valuations; value ties are
/// broken by ascending good index.
OrdinalProfile ordinal_from_cardinal(const Instance& inst);

/// Additive value of a fractional bundle (one allocation row).
Rational utility(const Instance& inst, int agent, const std::vector<Rational>& shares_row);

/// Additive value of an integral bundle.
Rational utility(const Instance& inst, int agent, const std::vector<int>& bundle);

Rational utility_of(const Instance& inst, int agent, const FractionalAllocation& alloc);
Rational utility_of(const Instance& inst, int agent, const IntegralAllocation& alloc);

struct EnvyWitness {
    int envious = -1;
    int envied = -1;
};

struct EnvyResult {
    bool ok = true;
    std::optional<EnvyWitness> witness;
};

/// v_a(x_a) >= v_a(x_b) for all pairs; exact rational comparison.
EnvyResult is_envy_free(const Instance& inst, const FractionalAllocation& alloc);

/// EF1: for all a,b with A_b nonempty, some g in A_b has
/// v_a(A_a) >= v_a(A_b \ {g}).
EnvyResult is_ef1(const Instance& inst, const IntegralAllocation& alloc);

/// Geometric mean of the utilities, computed in log space; 0 if any utility
/// is 0.
double nash_welfare(const std::vector<Rational>& utilities);
double nash_welfare(const Instance& inst, const FractionalAllocation& alloc);
double nash_welfare(const Instance& inst, const IntegralAllocation& alloc);

}  // namespace collusion
