#include "collusion/mechanisms.hpp"

#include <algorithm>
#include <cassert>

namespace collusion {

int PsTrace::eaten_good(int k, int agent) const {
    const auto& step = steps.at(k - 1);
    for (const auto& [good, agents] : step.eaters)
        if (std::find(agents.begin(), agents.end(), agent) != agents.end()) return good;
    return -1;
}

std::pair<IntegralAllocation, RrTrace> round_robin(const OrdinalProfile& profile, int n, int m) {
    IntegralAllocation alloc;
    alloc.bundles.resize(n);
    RrTrace trace;
    trace.stages.reserve(m);
    std::vector<bool> taken(m, false);
    // cursor[a] skips over goods already taken in earlier stages.
    std::vector<std::size_t> cursor(n, 0);
    for (int stage = 0; stage < m; ++stage) {
        int agent = stage % n;
        const auto& ord = profile.orderings[agent];
        auto& c = cursor[agent];
        while (taken[ord[c]]) ++c;
        int good = ord[c];
        taken[good] = true;
        alloc.bundles[agent].push_back(good);
        trace.stages.push_back({agent, good});
    }
    for (auto& bundle : alloc.bundles) std::sort(bundle.begin(), bundle.end());
    return {std::move(alloc), std::move(trace)};
}

std::pair<FractionalAllocation, PsTrace> probabilistic_serial(const OrdinalProfile& profile,
                                                              int n, int m) {
    FractionalAllocation alloc;
    alloc.shares.assign(n, std::vector<Rational>(m, Rational(0)));
    PsTrace trace;

    std::vector<bool> available(m, true);
    std::vector<Rational> consumed(m, Rational(0));  // column sums so far
    std::vector<std::size_t> cursor(n, 0);
    int remaining = m;

    while (remaining > 0) {
        PsStep step;
        // Each agent eats his favorite available good.
        for (int a = 0; a < n; ++a) {
            const auto& ord = profile.orderings[a];
            auto& c = cursor[a];
            while (!available[ord[c]]) ++c;
            step.eaters[ord[c]].push_back(a);
        }
        // Finishing candidates for the goods being eaten.
        Rational min_t;
        bool first = true;
        for (const auto& [good, agents] : step.eaters) {
            Rational t = (Rational(1) - consumed[good]) / static_cast<int>(agents.size());
            step.finish_candidates[good] = t;
            if (first || t < min_t) {
                min_t = t;
                first = false;
            }
        }
        step.duration = min_t;
        for (const auto& [good, agents] : step.eaters) {
            for (int a : agents) alloc.shares[a][good] += min_t;
            consumed[good] += min_t * static_cast<int>(agents.size());
            if (step.finish_candidates[good] == min_t) {
                available[good] = false;
                step.finished.push_back(good);
                --remaining;
            }
        }
        for (int g = 0; g < m; ++g)
            if (available[g]) step.available_after.push_back(g);
        step.shares_after = alloc.shares;
        trace.steps.push_back(std::move(step));
    }
    return {std::move(alloc), std::move(trace)};
}

BigInt minimal_coupling_T(const PsTrace& trace) {
    BigInt t = 1;
    for (const auto& step : trace.steps) t = big_lcm(t, rat_den(step.duration));
    return t;
}

CopyUniverse expand_profile(const OrdinalProfile& profile, std::int64_t T) {
    CopyUniverse universe;
    universe.T = T;
    universe.m = profile.orderings.empty() ? 0
                                           : static_cast<int>(profile.orderings.front().size());
    universe.expanded.orderings.reserve(profile.orderings.size());
    for (const auto& ord : profile.orderings) {
        std::vector<int> expanded;
        expanded.reserve(ord.size() * static_cast<std::size_t>(T));
        for (int g : ord)
            for (std::int64_t k = 0; k < T; ++k)
                expanded.push_back(static_cast<int>(g * T + k));
        universe.expanded.orderings.push_back(std::move(expanded));
    }
    return universe;
}

PsViaRrResult ps_via_rr(const OrdinalProfile& profile, int n, int m,
                        std::optional<BigInt> T_opt, std::int64_t max_copies) {
    auto [ps_alloc, ps_trace] = probabilistic_serial(profile, n, m);
    BigInt T = T_opt ? *T_opt : minimal_coupling_T(ps_trace);
    if (T < 1) throw InvalidT("T must be positive");
    if ((BigInt(m) * T) % n != 0)
        throw InvalidT("n must divide m*T (n=" + std::to_string(n) +
                       ", m=" + std::to_string(m) + ", T=" + T.str() + ")");
    for (std::size_t k = 0; k < ps_trace.steps.size(); ++k) {
        Rational scaled = Rational(T) * ps_trace.steps[k].duration;
        if (rat_den(scaled) != 1)
            throw InvalidT("T*t^(" + std::to_string(k + 1) + ") = " + rat_to_string(scaled) +
                           " is not an integer");
    }
    if (BigInt(m) * T > max_copies)
        throw InvalidT("copy universe too large: m*T = " + (BigInt(m) * T).str());

    auto T_small = T.convert_to<std::int64_t>();
    PsViaRrResult result;
    result.T = T;
    result.ps_trace = std::move(ps_trace);
    result.universe = expand_profile(profile, T_small);
    auto [rr_alloc, rr_trace] =
        round_robin(result.universe.expanded, n, static_cast<int>(m * T_small));
    result.rr_trace = std::move(rr_trace);

    result.allocation.shares.assign(n, std::vector<Rational>(m, Rational(0)));
    for (int a = 0; a < n; ++a) {
        std::vector<std::int64_t> counts(m, 0);
        for (int copy : rr_alloc.bundles[a]) ++counts[result.universe.original_good(copy)];
        for (int g = 0; g < m; ++g) result.allocation.shares[a][g] = Rational(counts[g], T_small);
    }
    return result;
}

}  // namespace collusion
