#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "collusion/fisher.hpp"
#include "collusion/types.hpp"

namespace collusion {

struct InvalidParams : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TargetMechanism { RR, PS, MNW };

/// A lower-bound construction bundled with its manipulated profile and the
/// closed-form ratios it attains at the chosen parameters.
struct PaperInstance {
    std::string id;
    TargetMechanism mechanism = TargetMechanism::RR;
    Instance instance;
    OrdinalProfile truthful;  // ordinal mechanisms only
    Coalition coalition;
    std::map<int, Rational> expected_ratios;     // corrupted agent -> exact ratio
    std::optional<Rational> expected_limit;      // asymptotic bound; nullopt = unbounded
    fisher::ZeroGoodPolicy policy_truthful;      // MNW only
    fisher::ZeroGoodPolicy policy_manipulated;   // MNW only
};

/// Collusion against MNW where the coalition zeroes out its own goods; every
/// corrupted agent gains 2 - c/n. Requires n > c >= 1.
PaperInstance mnw_gir_instance(int n, int c);

/// Same market, but the freed goods are concentrated on the first corrupted
/// agent while the others stay exactly whole. Requires n > c >= 1.
PaperInstance mnw_sgir_instance(int n, int c);

/// The tiered-goods construction against PS with m = (c+1) n T^c goods.
/// Requires n > c >= 1, T > 1, n | T, and m <= 10^4.
PaperInstance ps_gir_instance(int n, int c, int T);

/// The 3x4 instance on which a two-agent coalition against RR hands agent 2
/// a 1/eps gain. Requires 0 < eps < 1/4.
PaperInstance rr_sgir_instance(const Rational& eps);

enum class ValuationFamily { Binary, UniformRational };

/// Reproducible pseudo-random instance (mt19937_64, fully determined by the
/// seed). UniformRational entries are p/q with p <= 100 and q <= 100.
Instance random_instance(int n, int m, ValuationFamily family, std::uint64_t seed);

// Closed forms behind the generators' expected ratios.
Rational mnw_gir_expected_ratio(int n, int c);
Rational mnw_sgir_leader_expected_ratio(int n, int c);
Rational ps_gir_expected_ratio(int n, int c, int T, int corrupted_agent /* 0-based */);

}  // namespace collusion
