#include <doctest.h>

#include <numeric>
#include <random>

#include "collusion/core.hpp"
#include "collusion/mechanisms.hpp"

using namespace collusion;

namespace {

OrdinalProfile profile_of(std::vector<std::vector<int>> orderings) {
    return OrdinalProfile{std::move(orderings)};
}

std::vector<std::vector<int>> all_perms(int m) {
    std::vector<std::vector<int>> perms;
    std::vector<int> p(m);
    std::iota(p.begin(), p.end(), 0);
    do perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return perms;
}

// Visits every ordinal profile on n agents and m goods.
template <typename F>
void for_each_profile(int n, int m, F&& body) {
    auto perms = all_perms(m);
    std::vector<std::size_t> idx(n, 0);
    OrdinalProfile profile;
    profile.orderings.resize(n);
    for (;;) {
        for (int a = 0; a < n; ++a) profile.orderings[a] = perms[idx[a]];
        body(profile);
        int pos = n - 1;
        while (pos >= 0 && ++idx[pos] == perms.size()) idx[pos--] = 0;
        if (pos < 0) break;
    }
}

// Fixed-step eating simulation used as an independent check on the exact PS.
std::vector<std::vector<double>> discrete_eating(const OrdinalProfile& profile, int n, int m,
                                                 double dt = 1.0 / 1000.0) {
    std::vector<std::vector<double>> shares(n, std::vector<double>(m, 0.0));
    std::vector<double> eaten(m, 0.0);
    std::vector<bool> gone(m, false);
    int remaining = m;
    while (remaining > 0) {
        for (int a = 0; a < n; ++a) {
            for (int g : profile.orderings[a]) {
                if (!gone[g]) {
                    shares[a][g] += dt;
                    eaten[g] += dt;
                    break;
                }
            }
        }
        for (int g = 0; g < m; ++g)
            if (!gone[g] && eaten[g] >= 1.0 - 1e-12) {
                gone[g] = true;
                --remaining;
            }
    }
    return shares;
}

OrdinalProfile random_profile(int n, int m, std::mt19937_64& rng) {
    OrdinalProfile profile;
    profile.orderings.assign(n, std::vector<int>(m));
    for (auto& ord : profile.orderings) {
        std::iota(ord.begin(), ord.end(), 0);
        std::shuffle(ord.begin(), ord.end(), rng);
    }
    return profile;
}

// Positive cardinal valuations agreeing with the given strict ordering.
Instance consistent_instance(const OrdinalProfile& profile, int m, std::mt19937_64& rng) {
    Instance inst;
    inst.n = static_cast<int>(profile.orderings.size());
    inst.m = m;
    inst.valuations.assign(inst.n, std::vector<Rational>(m));
    for (int a = 0; a < inst.n; ++a) {
        Rational v = Rational(static_cast<int>(1 + rng() % 5), 1);
        for (int r = m - 1; r >= 0; --r) {
            inst.valuations[a][profile.orderings[a][r]] = v;
            v += static_cast<int>(1 + rng() % 5);
        }
    }
    return inst;
}

}  // namespace

TEST_CASE("round_robin alternates through a shared ordering") {
    auto [alloc, trace] =
        round_robin(profile_of({{0, 1, 2, 3}, {0, 1, 2, 3}}), 2, 4);
    CHECK(alloc.bundles == std::vector<std::vector<int>>{{0, 2}, {1, 3}});
    REQUIRE(trace.stages.size() == 4);
    CHECK(trace.stages[0].agent == 0);
    CHECK(trace.stages[1].agent == 1);
    CHECK(trace.stages[2].agent == 0);
    CHECK(trace.stages[0].good == 0);
}

TEST_CASE("round_robin on the 3x4 table, truthful and manipulated") {
    // Orderings induced by {{1+2e,1+e,1,0},{1/e,1,0,0},{0,0,2,1}}.
    OrdinalProfile truthful = profile_of({{0, 1, 2, 3}, {0, 1, 2, 3}, {2, 3, 0, 1}});
    auto [a1, t1] = round_robin(truthful, 3, 4);
    CHECK(a1.bundles == std::vector<std::vector<int>>{{0, 3}, {1}, {2}});

    OrdinalProfile manipulated = truthful;
    manipulated.orderings[0] = {2, 1, 0, 3};
    auto [a2, t2] = round_robin(manipulated, 3, 4);
    CHECK(a2.bundles == std::vector<std::vector<int>>{{1, 2}, {0}, {3}});
}

TEST_CASE("round_robin handles a partial final round") {
    auto [alloc, trace] = round_robin(profile_of({{0, 1, 2}, {0, 1, 2}}), 2, 3);
    CHECK(alloc.bundles == std::vector<std::vector<int>>{{0, 2}, {1}});
}

TEST_CASE("probabilistic_serial with disjoint favorites") {
    auto [alloc, trace] = probabilistic_serial(profile_of({{0, 1}, {1, 0}}), 2, 2);
    CHECK(alloc.shares[0][0] == 1);
    CHECK(alloc.shares[0][1] == 0);
    CHECK(alloc.shares[1][1] == 1);
}

TEST_CASE("probabilistic_serial splits a shared favorite evenly") {
    auto [alloc, trace] = probabilistic_serial(profile_of({{0, 1}, {0, 1}}), 2, 2);
    for (int a = 0; a < 2; ++a)
        for (int g = 0; g < 2; ++g) CHECK(alloc.shares[a][g] == Rational(1, 2));
}

TEST_CASE("probabilistic_serial three-good hand trace") {
    auto [alloc, trace] = probabilistic_serial(profile_of({{0, 1, 2}, {1, 0, 2}}), 2, 3);
    CHECK(alloc.shares[0] == std::vector<Rational>{1, 0, Rational(1, 2)});
    CHECK(alloc.shares[1] == std::vector<Rational>{0, 1, Rational(1, 2)});
    REQUIRE(trace.steps.size() == 2);
    CHECK(trace.steps[0].duration == 1);
    CHECK(trace.steps[0].finished == std::vector<int>{0, 1});
    CHECK(trace.steps[1].duration == Rational(1, 2));
}

TEST_CASE("probabilistic_serial matches a fixed-step eating simulation") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 20; ++it) {
        int n = 2 + static_cast<int>(rng() % 2), m = 2 + static_cast<int>(rng() % 3);
        auto profile = random_profile(n, m, rng);
        auto [alloc, trace] = probabilistic_serial(profile, n, m);
        auto approx = discrete_eating(profile, n, m);
        for (int a = 0; a < n; ++a)
            for (int g = 0; g < m; ++g)
                CHECK(std::abs(to_double(alloc.shares[a][g]) - approx[a][g]) < 0.02);
    }
}

TEST_CASE("probabilistic_serial trace invariants") {
    std::mt19937_64 rng(23);
    for (int it = 0; it < 60; ++it) {
        int n = 2 + static_cast<int>(rng() % 3), m = 1 + static_cast<int>(rng() % 5);
        auto profile = random_profile(n, m, rng);
        auto [alloc, trace] = probabilistic_serial(profile, n, m);

        // Step durations are positive and sum to m/n; step count <= m.
        Rational total = 0;
        for (const auto& step : trace.steps) {
            CHECK(step.duration > 0);
            total += step.duration;
        }
        CHECK(total == Rational(m, n));
        CHECK(trace.steps.size() <= static_cast<std::size_t>(m));

        // Feasibility: agent mass m/n, column sums exactly 1.
        for (int a = 0; a < n; ++a) {
            Rational mass = 0;
            for (int g = 0; g < m; ++g) mass += alloc.shares[a][g];
            CHECK(mass == Rational(m, n));
        }
        for (int g = 0; g < m; ++g) {
            Rational col = 0;
            for (int a = 0; a < n; ++a) col += alloc.shares[a][g];
            CHECK(col == 1);
        }

        // Step-duration integrality: (n!)^k * t^(k) is an integer.
        BigInt scale = 1;
        BigInt nfact = factorial(n);
        for (const auto& step : trace.steps) {
            scale *= nfact;
            CHECK(rat_den(step.duration * Rational(scale)) == 1);
        }

        // Conservation: cumulative eater-time equals the allocated mass.
        std::vector<Rational> cumulative(m, 0);
        for (const auto& step : trace.steps)
            for (const auto& [good, agents] : step.eaters)
                cumulative[good] += step.duration * static_cast<int>(agents.size());
        for (int g = 0; g < m; ++g) {
            Rational col = 0;
            for (int a = 0; a < n; ++a) col += alloc.shares[a][g];
            CHECK(cumulative[g] == col);
        }
    }
}

TEST_CASE("minimal_coupling_T is the lcm of step denominators") {
    auto [alloc1, t1] = probabilistic_serial(profile_of({{0, 1, 2}, {1, 0, 2}}), 2, 3);
    CHECK(minimal_coupling_T(t1) == 2);  // t = (1, 1/2)

    auto [alloc2, t2] = probabilistic_serial(profile_of({{0, 1}, {0, 1}}), 2, 2);
    CHECK(minimal_coupling_T(t2) == 2);  // t = (1/2, 1/2)
}

TEST_CASE("minimal_coupling_T divides (n!)^m") {
    std::mt19937_64 rng(31);
    for (int it = 0; it < 40; ++it) {
        int n = 2 + static_cast<int>(rng() % 2), m = 1 + static_cast<int>(rng() % 4);
        auto [alloc, trace] = probabilistic_serial(random_profile(n, m, rng), n, m);
        BigInt T = minimal_coupling_T(trace);
        CHECK(pow_big(factorial(n), m) % T == 0);
    }
}

TEST_CASE("expand_profile orders copies within the original order") {
    auto u = expand_profile(profile_of({{1, 0}}), 2);
    CHECK(u.expanded.orderings[0] == std::vector<int>{2, 3, 0, 1});
    CHECK(u.original_good(2) == 1);
    CHECK(u.original_good(1) == 0);

    auto single = expand_profile(profile_of({{0}}), 3);
    CHECK(single.expanded.orderings[0] == std::vector<int>{0, 1, 2});

    auto identity = expand_profile(profile_of({{1, 0}}), 1);
    CHECK(identity.expanded.orderings[0] == std::vector<int>{1, 0});
}

TEST_CASE("ps_via_rr reproduces the shared-favorites split") {
    auto result = ps_via_rr(profile_of({{0, 1}, {0, 1}}), 2, 2, BigInt(2));
    for (int a = 0; a < 2; ++a)
        for (int g = 0; g < 2; ++g) CHECK(result.allocation.shares[a][g] == Rational(1, 2));
    CHECK(result.T == 2);
}

TEST_CASE("ps_via_rr rejects a T that breaks step integrality") {
    // Shared favorites give t^(1) = 1/2; T = 3 leaves 3/2 rounds.
    CHECK_THROWS_AS(ps_via_rr(profile_of({{0, 1}, {0, 1}}), 2, 2, BigInt(3)), InvalidT);
    CHECK_THROWS_AS(ps_via_rr(profile_of({{0, 1}, {0, 1}}), 2, 2, BigInt(0)), InvalidT);
}

TEST_CASE("ps_via_rr coupling: each agent takes T*t^(k) copies of one good per step") {
    std::mt19937_64 rng(41);
    for (int it = 0; it < 20; ++it) {
        int n = 2 + static_cast<int>(rng() % 2), m = 2 + static_cast<int>(rng() % 3);
        auto profile = random_profile(n, m, rng);
        auto result = ps_via_rr(profile, n, m);
        auto T = result.T.convert_to<std::int64_t>();
        std::size_t stage = 0;
        for (std::size_t k = 0; k < result.ps_trace.steps.size(); ++k) {
            const auto& step = result.ps_trace.steps[k];
            auto rounds = (Rational(result.T) * step.duration).convert_to<std::int64_t>();
            std::vector<std::map<int, std::int64_t>> taken(n);
            for (std::int64_t r = 0; r < rounds; ++r)
                for (int a = 0; a < n; ++a) {
                    const auto& s = result.rr_trace.stages[stage++];
                    taken[s.agent][s.good / T] += 1;
                }
            for (int a = 0; a < n; ++a) {
                // All copies this step come from the single good a eats in
                // the coupled PS step.
                REQUIRE(taken[a].size() <= 1);
                if (!taken[a].empty()) {
                    CHECK(taken[a].begin()->second == rounds);
                    CHECK(taken[a].begin()->first == result.ps_trace.eaten_good(
                                                         static_cast<int>(k) + 1, a));
                }
            }
        }
        CHECK(stage == result.rr_trace.stages.size());
    }
}

TEST_CASE("ps_via_rr equals probabilistic_serial on exhaustive small sweeps") {
    for (auto [n, m] : {std::pair{2, 2}, {2, 3}, {3, 2}, {3, 3}}) {
        for_each_profile(n, m, [&](const OrdinalProfile& profile) {
            auto [ps, trace] = probabilistic_serial(profile, n, m);
            CHECK(ps_via_rr(profile, n, m).allocation == ps);
        });
    }
}

TEST_CASE("PS truthful output is envy-free for consistent cardinal valuations") {
    std::mt19937_64 rng(53);
    for (int it = 0; it < 30; ++it) {
        int n = 2 + static_cast<int>(rng() % 2), m = 2 + static_cast<int>(rng() % 4);
        auto profile = random_profile(n, m, rng);
        auto inst = consistent_instance(profile, m, rng);
        auto [alloc, trace] = probabilistic_serial(profile, n, m);
        CHECK(is_envy_free(inst, alloc).ok);
    }
}

TEST_CASE("RR output is EF1 for consistent cardinal valuations") {
    std::mt19937_64 rng(59);
    for (int it = 0; it < 30; ++it) {
        int n = 2 + static_cast<int>(rng() % 2), m = 2 + static_cast<int>(rng() % 5);
        auto profile = random_profile(n, m, rng);
        auto inst = consistent_instance(profile, m, rng);
        auto [alloc, trace] = round_robin(profile, n, m);
        CHECK(is_ef1(inst, alloc).ok);
    }
}
