#include "collusion/incentives.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <thread>

#include "collusion/core.hpp"
#include "collusion/mechanisms.hpp"

namespace collusion {

GainRatio gain_ratio(const Rational& u_true, const Rational& u_manip) {
    if (u_true > 0) return GainRatio::finite(u_manip / u_true);
    if (u_manip > 0) return GainRatio::inf();
    return GainRatio::finite(1);  // 0/0 convention
}

bool ratio_geq(const GainRatio& a, const GainRatio& b) {
    if (a.infinite) return true;
    if (b.infinite) return false;
    return a.value >= b.value;
}

namespace {

OrdinalProfile apply_misreports(const OrdinalProfile& truthful,
                                const std::map<int, std::vector<int>>& misreports) {
    OrdinalProfile manipulated = truthful;
    for (const auto& [agent, ordering] : misreports) manipulated.orderings[agent] = ordering;
    return manipulated;
}

std::vector<Rational> run_and_value(OrdinalMechanism mech, const Instance& inst,
                                    const OrdinalProfile& profile) {
    std::vector<Rational> utils(inst.n);
    if (mech == OrdinalMechanism::RR) {
        auto [alloc, trace] = round_robin(profile, inst.n, inst.m);
        for (int a = 0; a < inst.n; ++a) utils[a] = utility(inst, a, alloc.bundles[a]);
    } else {
        auto [alloc, trace] = probabilistic_serial(profile, inst.n, inst.m);
        for (int a = 0; a < inst.n; ++a) utils[a] = utility(inst, a, alloc.shares[a]);
    }
    return utils;
}

RatioReport make_report(const Coalition& coalition, const std::vector<Rational>& u_true,
                        const std::vector<Rational>& u_manip) {
    RatioReport report;
    report.coalition = coalition;
    report.all_weakly_better = true;
    bool first = true;
    for (int a : coalition.members) {
        GainRatio r = gain_ratio(u_true[a], u_manip[a]);
        if (!ratio_geq(r, GainRatio::finite(1))) report.all_weakly_better = false;
        if (first) {
            report.min_ratio = report.max_ratio = r;
            first = false;
        } else {
            if (!ratio_geq(r, report.min_ratio)) report.min_ratio = r;
            if (ratio_geq(r, report.max_ratio) && r != report.max_ratio) report.max_ratio = r;
        }
        report.per_agent[a] = r;
    }
    return report;
}

struct Best {
    bool set = false;
    Rational value;
    std::uint64_t seq = 0;
    Coalition arg;

    void consider(const Rational& v, std::uint64_t s, const Coalition& c) {
        if (!set || v > value || (v == value && s < seq)) {
            set = true;
            value = v;
            seq = s;
            arg = c;
        }
    }

    void merge(const Best& other) {
        if (other.set) consider(other.value, other.seq, other.arg);
    }
};

struct WorkerState {
    Best ir, gir, sgir;
    std::uint64_t evaluated = 0;
    bool infinite_seen = false;
};

unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("COLLUSION_LAB_THREADS")) {
        int cap = std::atoi(env);
        if (cap > 0) hw = std::min<unsigned>(hw, static_cast<unsigned>(cap));
    }
    return hw;
}

void enumerate_coalitions(int n, int c, std::vector<std::vector<int>>& out) {
    std::vector<int> members;
    // All subsets of [n] with 1 <= size <= c, lexicographic.
    auto rec = [&](auto&& self, int start) -> void {
        if (!members.empty()) out.push_back(members);
        if (static_cast<int>(members.size()) == c) return;
        for (int a = start; a < n; ++a) {
            members.push_back(a);
            self(self, a + 1);
            members.pop_back();
        }
    };
    rec(rec, 0);
}

}  // namespace

RatioReport evaluate_manipulation(OrdinalMechanism mech, const Instance& inst,
                                  const Coalition& coalition) {
    OrdinalProfile truthful = ordinal_from_cardinal(inst);
    OrdinalProfile manipulated = apply_misreports(truthful, coalition.ordinal_misreports);
    auto u_true = run_and_value(mech, inst, truthful);
    auto u_manip = run_and_value(mech, inst, manipulated);
    return make_report(coalition, u_true, u_manip);
}

SearchResult exhaustive_search(OrdinalMechanism mech, const Instance& inst, int c,
                               const SearchOptions& options) {
    const int n = inst.n, m = inst.m;
    std::vector<std::vector<int>> perms;
    {
        std::vector<int> perm(m);
        std::iota(perm.begin(), perm.end(), 0);
        do {
            perms.push_back(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    const std::uint64_t perm_count = perms.size();

    std::vector<std::vector<int>> coalitions;
    enumerate_coalitions(n, c, coalitions);

    BigInt total = 0;
    for (const auto& members : coalitions)
        total += pow_big(BigInt(perm_count), static_cast<int>(members.size()));
    if (total > options.max_evaluations)
        throw SearchTooLarge("search would need " + total.str() + " evaluations", total);

    OrdinalProfile truthful = ordinal_from_cardinal(inst);
    auto u_true = run_and_value(mech, inst, truthful);

    // Flatten into (coalition, first-member permutation) tasks; each task
    // sweeps the remaining members' joint permutations.
    struct Task {
        int coalition_idx;
        std::uint64_t first_perm;
        std::uint64_t seq_base;
    };
    std::vector<Task> tasks;
    std::uint64_t seq = 0;
    for (int ci = 0; ci < static_cast<int>(coalitions.size()); ++ci) {
        std::uint64_t inner = 1;
        for (std::size_t i = 1; i < coalitions[ci].size(); ++i) inner *= perm_count;
        for (std::uint64_t p = 0; p < perm_count; ++p) {
            tasks.push_back({ci, p, seq});
            seq += inner;
        }
    }

    unsigned threads = std::min<unsigned>(resolve_threads(options.threads),
                                          std::max<std::size_t>(1, tasks.size()));
    std::vector<WorkerState> states(threads);
    std::atomic<std::size_t> next_task{0};

    auto worker = [&](unsigned tid) {
        WorkerState& state = states[tid];
        OrdinalProfile profile = truthful;
        for (;;) {
            std::size_t ti = next_task.fetch_add(1);
            if (ti >= tasks.size()) break;
            const Task& task = tasks[ti];
            const auto& members = coalitions[task.coalition_idx];
            const std::size_t k = members.size();
            std::vector<std::uint64_t> counter(k, 0);
            counter[0] = task.first_perm;
            std::uint64_t local = 0;
            for (;;) {
                for (std::size_t i = 0; i < k; ++i)
                    profile.orderings[members[i]] = perms[counter[i]];
                auto u_manip = run_and_value(mech, inst, profile);

                Coalition manip;
                manip.members = members;
                for (std::size_t i = 0; i < k; ++i)
                    manip.ordinal_misreports[members[i]] = perms[counter[i]];
                RatioReport report = make_report(manip, u_true, u_manip);
                std::uint64_t s = task.seq_base + local;
                ++state.evaluated;
                ++local;

                if (report.min_ratio.infinite || report.max_ratio.infinite)
                    state.infinite_seen = true;
                if (k == 1 && !report.max_ratio.infinite)
                    state.ir.consider(report.max_ratio.value, s, manip);
                bool gir_eligible =
                    !options.gir_requires_weak_improvement || report.all_weakly_better;
                if (gir_eligible && !report.min_ratio.infinite)
                    state.gir.consider(report.min_ratio.value, s, manip);
                if (report.all_weakly_better && !report.max_ratio.infinite)
                    state.sgir.consider(report.max_ratio.value, s, manip);

                // Mixed-radix increment over members 1..k-1.
                std::size_t pos = k;
                while (pos > 1) {
                    if (++counter[pos - 1] < perm_count) break;
                    counter[pos - 1] = 0;
                    --pos;
                }
                if (pos == 1) break;
            }
            // Restore the truthful orderings for the next task.
            for (int a : members) profile.orderings[a] = truthful.orderings[a];
        }
    };

    if (threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
    }

    SearchResult result;
    WorkerState merged;
    for (const auto& state : states) {
        merged.ir.merge(state.ir);
        merged.gir.merge(state.gir);
        merged.sgir.merge(state.sgir);
        merged.evaluated += state.evaluated;
        merged.infinite_seen = merged.infinite_seen || state.infinite_seen;
    }
    result.profiles_searched = merged.evaluated;
    result.infinite_ratio_seen = merged.infinite_seen;
    if (merged.ir.set) {
        result.empirical_ir = GainRatio::finite(merged.ir.value);
        result.argmax_ir = merged.ir.arg;
    }
    if (merged.gir.set) {
        result.empirical_gir = GainRatio::finite(merged.gir.value);
        result.argmax_gir = merged.gir.arg;
    }
    if (merged.sgir.set) {
        result.empirical_sgir = GainRatio::finite(merged.sgir.value);
        result.argmax_sgir = merged.sgir.arg;
    }
    return result;
}

BinaryReduction binary_reduction(const std::vector<Rational>& l_true,
                                 const std::vector<Rational>& l_manip) {
    const int m = static_cast<int>(l_true.size());
    BinaryReduction reduction;
    GainRatio best = GainRatio::finite(1);  // empty prefix, 0/0 = 1
    int best_prefix = 0;
    Rational sum_true = 0, sum_manip = 0;
    for (int g = 1; g <= m; ++g) {
        sum_true += l_true[g - 1];
        sum_manip += l_manip[g - 1];
        GainRatio r = gain_ratio(sum_true, sum_manip);
        if (ratio_geq(r, best)) {  // largest maximizing prefix wins ties
            best = r;
            best_prefix = g;
        }
    }
    reduction.r_max = best;
    reduction.prefix = best_prefix;
    reduction.binary_valuation.assign(m, 0);
    for (int g = 0; g < best_prefix; ++g) reduction.binary_valuation[g] = 1;
    return reduction;
}

RatioReport mnw_manipulation_ratio(const Instance& inst, const Coalition& coalition,
                                   const fisher::ZeroGoodPolicy& policy_true,
                                   const fisher::ZeroGoodPolicy& policy_manip, double tol) {
    Instance manipulated = inst;
    for (const auto& [agent, row] : coalition.cardinal_misreports)
        manipulated.valuations[agent] = row;

    auto truthful = fisher::mnw_allocate(inst, policy_true, tol);
    auto corrupted = fisher::mnw_allocate(manipulated, policy_manip, tol);

    std::vector<Rational> u_true(inst.n), u_manip(inst.n);
    for (int a = 0; a < inst.n; ++a) {
        u_true[a] = utility(inst, a, truthful.allocation.shares[a]);
        u_manip[a] = utility(inst, a, corrupted.allocation.shares[a]);
    }
    return make_report(coalition, u_true, u_manip);
}

}  // namespace collusion
