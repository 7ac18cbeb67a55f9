#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collusion/rational.hpp"

namespace collusion {

/// A fair-division instance: n agents, m goods, non-negative additive
/// valuations v[a][g]. `divisible` selects the fractional or integral regime.
struct Instance {
    int n = 0;
    int m = 0;
    std::vector<std::vector<Rational>> valuations;
    bool divisible = false;
};

/// One strict ordering per agent, most preferred first. Good indices are
/// 0-based throughout the code and on the wire.
struct OrdinalProfile {
    std::vector<std::vector<int>> orderings;
};

/// n x m matrix of shares; every column sums to exactly 1.
struct FractionalAllocation {
    std::vector<std::vector<Rational>> shares;

    bool operator==(const FractionalAllocation&) const = default;
};

/// Partition of the goods into per-agent bundles (sorted good indices).
struct IntegralAllocation {
    std::vector<std::vector<int>> bundles;

    bool operator==(const IntegralAllocation&) const = default;
};

/// A coalition of corrupted agents with their joint misreports. Ordinal
/// misreports drive RR/PS, cardinal ones drive MNW; exactly the members
/// carry an entry in the matching map.
struct Coalition {
    std::vector<int> members;
    std::map<int, std::vector<int>> ordinal_misreports;
    std::map<int, std::vector<Rational>> cardinal_misreports;
};

enum class ValidationError {
    None,
    EmptyInstance,
    NegativeValue,
    ZeroRow,
    BadShape,
};

struct ValidationResult {
    ValidationError error = ValidationError::None;
    std::string detail;

    bool ok() const { return error == ValidationError::None; }
};

const char* validation_error_name(ValidationError e);

/// Checks the instance invariants. `fisher_use` additionally requires every
/// agent to value at least one good strictly positively.
ValidationResult validate_instance(const Instance& inst, bool fisher_use = false);

ValidationResult validate_profile(const OrdinalProfile& profile, int n, int m);

}  // namespace collusion
