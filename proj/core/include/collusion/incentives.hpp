#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "collusion/fisher.hpp"
#include "collusion/types.hpp"

namespace collusion {

/// Manipulation gain ratio with an explicit +infinity marker for
/// positive-over-zero. The 0/0 case is 1 by convention.
struct GainRatio {
    bool infinite = false;
    Rational value = 1;  // meaningful only when finite

    static GainRatio inf() { return {true, 0}; }
    static GainRatio finite(Rational v) { return {false, std::move(v)}; }

    bool operator==(const GainRatio&) const = default;
};

GainRatio gain_ratio(const Rational& u_true, const Rational& u_manip);

/// True when a >= b treating +infinity as larger than every finite value.
bool ratio_geq(const GainRatio& a, const GainRatio& b);

enum class OrdinalMechanism { RR, PS };

struct RatioReport {
    std::map<int, GainRatio> per_agent;  // corrupted agents only
    Coalition coalition;
    bool all_weakly_better = false;
    GainRatio min_ratio;
    GainRatio max_ratio;
};

/// Runs the mechanism on the truthful and manipulated profiles and fills the
/// per-corrupted-agent ratios, measured with the true valuations throughout.
RatioReport evaluate_manipulation(OrdinalMechanism mech, const Instance& inst,
                                  const Coalition& coalition);

struct SearchTooLarge : std::runtime_error {
    BigInt evaluations;
    SearchTooLarge(const std::string& what, BigInt count)
        : std::runtime_error(what), evaluations(std::move(count)) {}
};

struct SearchResult {
    std::optional<GainRatio> empirical_ir;    // |C| = 1 specialization
    std::optional<GainRatio> empirical_gir;   // max over manipulations of min corrupted ratio
    std::optional<GainRatio> empirical_sgir;  // max over all-weakly-better manipulations of max
    std::optional<Coalition> argmax_ir, argmax_gir, argmax_sgir;
    std::uint64_t profiles_searched = 0;
    bool infinite_ratio_seen = false;  // +inf ratios are excluded from aggregates
};

struct SearchOptions {
    /// When set, the GIR aggregate also requires every corrupted agent to be
    /// weakly better off (non-literal reading of the definition).
    bool gir_requires_weak_improvement = false;
    /// Evaluation-count guard.
    std::uint64_t max_evaluations = 10000000;
    /// Worker-thread cap; 0 reads COLLUSION_LAB_THREADS, then the hardware.
    unsigned threads = 0;
};

/// Enumerates every coalition of size <= c and every joint strict-ordering
/// misreport. Deterministic: ties in the aggregates keep the earliest
/// manipulation in canonical enumeration order.
SearchResult exhaustive_search(OrdinalMechanism mech, const Instance& inst, int c,
                               const SearchOptions& options = {});

struct BinaryReduction {
    std::vector<int> binary_valuation;  // in preference order: 1 up to the cut, then 0
    GainRatio r_max;
    int prefix = 0;  // largest maximizing prefix length
};

/// Prefix-ratio reduction to a binary valuation that never decreases the
/// gain ratio among valuations consistent with the agent's ordering. The l
/// vectors are the received fractions indexed in preference order.
BinaryReduction binary_reduction(const std::vector<Rational>& l_true,
                                 const std::vector<Rational>& l_manip);

/// Gain ratios for an explicit cardinal manipulation of MNW; no search over
/// the continuous misreport space is attempted.
RatioReport mnw_manipulation_ratio(const Instance& inst, const Coalition& coalition,
                                   const fisher::ZeroGoodPolicy& policy_true,
                                   const fisher::ZeroGoodPolicy& policy_manip,
                                   double tol = 1e-10);

}  // namespace collusion
