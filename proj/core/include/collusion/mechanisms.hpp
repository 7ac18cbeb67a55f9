#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "collusion/types.hpp"

namespace collusion {

struct RrStage {
    int agent = -1;
    int good = -1;
};

/// Stage-by-stage record of a Round-Robin run; stage i is served by agent
/// i mod n.
struct RrTrace {
    std::vector<RrStage> stages;
};

/// One step of the eating process: duration, per-good finishing candidates,
/// eater sets, finished goods, and the partial-allocation snapshot at step
/// end.
struct PsStep {
    Rational duration;
    std::map<int, Rational> finish_candidates;   // good -> t^(k)(g), eaten goods only
    std::map<int, std::vector<int>> eaters;      // good -> agents eating it this step
    std::vector<int> finished;                   // goods removed at step end
    std::vector<int> available_after;            // S^(k)
    std::vector<std::vector<Rational>> shares_after;
};

struct PsTrace {
    std::vector<PsStep> steps;

    /// Good eaten by `agent` during 1-based step k.
    int eaten_good(int k, int agent) const;
};

/// Deterministic Round-Robin: stage i is served by agent i mod n, who takes
/// his most preferred remaining good. m need not be divisible by n; the last
/// round may be partial.
std::pair<IntegralAllocation, RrTrace> round_robin(const OrdinalProfile& profile, int n, int m);

/// Combinatorial Probabilistic Serial with exact rationals. All goods that
/// attain the minimum finishing time are removed in the same step.
std::pair<FractionalAllocation, PsTrace> probabilistic_serial(const OrdinalProfile& profile,
                                                              int n, int m);

/// Least T making T * t^(k) integral for every step (lcm of the step-duration
/// denominators). Divides (n!)^m.
BigInt minimal_coupling_T(const PsTrace& trace);

/// T indivisible copies of each good; copy k of good g has id g * T + k.
/// Orderings keep the original order between goods and ascend in copy index
/// within a good.
struct CopyUniverse {
    std::int64_t T = 0;
    int m = 0;
    OrdinalProfile expanded;

    int original_good(int copy_id) const { return static_cast<int>(copy_id / T); }
};

CopyUniverse expand_profile(const OrdinalProfile& profile, std::int64_t T);

struct InvalidT : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PsViaRrResult {
    FractionalAllocation allocation;
    BigInt T;
    CopyUniverse universe;
    RrTrace rr_trace;
    PsTrace ps_trace;  // trace of the direct PS run used to validate T
};

/// Runs Round-Robin on the copy universe and reads shares off the bundle
/// intersections. With no explicit T, the least coupling T is used. An
/// explicit T must satisfy n | mT and make every T * t^(k) integral;
/// otherwise InvalidT is thrown. The materialized universe is capped at
/// max_copies total copy goods.
PsViaRrResult ps_via_rr(const OrdinalProfile& profile, int n, int m,
                        std::optional<BigInt> T = std::nullopt,
                        std::int64_t max_copies = 1000000);

}  // namespace collusion
