#include <doctest.h>

#include <numeric>
#include <random>

#include "collusion/core.hpp"
#include "collusion/incentives.hpp"
#include "collusion/instances.hpp"
#include "collusion/mechanisms.hpp"

using namespace collusion;

namespace {

Instance make_instance(std::vector<std::vector<Rational>> rows, bool divisible = true) {
    Instance inst;
    inst.n = static_cast<int>(rows.size());
    inst.m = rows.empty() ? 0 : static_cast<int>(rows.front().size());
    inst.divisible = divisible;
    inst.valuations = std::move(rows);
    return inst;
}

// Received fractions reordered into the agent's preference order.
std::vector<Rational> in_preference_order(const std::vector<Rational>& shares,
                                          const std::vector<int>& ordering) {
    std::vector<Rational> l;
    l.reserve(ordering.size());
    for (int g : ordering) l.push_back(shares[g]);
    return l;
}

std::vector<Rational> integral_as_shares(const std::vector<int>& bundle, int m) {
    std::vector<Rational> shares(m, 0);
    for (int g : bundle) shares[g] = 1;
    return shares;
}

}  // namespace

TEST_CASE("gain_ratio conventions") {
    CHECK(gain_ratio(1, 100) == GainRatio::finite(100));
    CHECK(gain_ratio(0, 0) == GainRatio::finite(1));
    CHECK(gain_ratio(2, 3) == GainRatio::finite(Rational(3, 2)));
    CHECK(gain_ratio(0, 5).infinite);
}

TEST_CASE("ratio_geq treats infinity as the top element") {
    CHECK(ratio_geq(GainRatio::inf(), GainRatio::finite(1000)));
    CHECK(!ratio_geq(GainRatio::finite(1000), GainRatio::inf()));
    CHECK(ratio_geq(GainRatio::finite(2), GainRatio::finite(2)));
}

TEST_CASE("evaluate_manipulation on the 3x4 table") {
    auto paper = rr_sgir_instance(Rational(1, 100));
    auto report = evaluate_manipulation(OrdinalMechanism::RR, paper.instance, paper.coalition);
    CHECK(report.per_agent.at(0) == GainRatio::finite(Rational(201, 102)));
    CHECK(report.per_agent.at(1) == GainRatio::finite(100));
    CHECK(report.all_weakly_better);
    CHECK(report.min_ratio == GainRatio::finite(Rational(201, 102)));
    CHECK(report.max_ratio == GainRatio::finite(100));
}

TEST_CASE("identity manipulation gives ratio 1") {
    auto inst = make_instance({{3, 2, 1}, {1, 3, 2}});
    auto truthful = ordinal_from_cardinal(inst);
    Coalition identity;
    identity.members = {0, 1};
    identity.ordinal_misreports[0] = truthful.orderings[0];
    identity.ordinal_misreports[1] = truthful.orderings[1];
    for (auto mech : {OrdinalMechanism::RR, OrdinalMechanism::PS}) {
        auto report = evaluate_manipulation(mech, inst, identity);
        for (const auto& [agent, r] : report.per_agent) CHECK(r == GainRatio::finite(1));
    }
}

TEST_CASE("exhaustive_search finds no gain on a symmetric instance") {
    auto inst = make_instance({{1, 1}, {1, 1}});
    auto result = exhaustive_search(OrdinalMechanism::PS, inst, 1);
    REQUIRE(result.empirical_ir.has_value());
    CHECK(*result.empirical_ir == GainRatio::finite(1));
    CHECK(result.profiles_searched == 4);  // 2 coalitions x 2 orderings
}

TEST_CASE("exhaustive_search is deterministic across thread counts") {
    auto inst = make_instance({{3, 2, 1}, {1, 3, 2}, {2, 1, 3}});
    SearchOptions single;
    single.threads = 1;
    SearchOptions many;
    many.threads = 4;
    for (auto mech : {OrdinalMechanism::RR, OrdinalMechanism::PS}) {
        auto a = exhaustive_search(mech, inst, 2, single);
        auto b = exhaustive_search(mech, inst, 2, many);
        CHECK(a.empirical_ir == b.empirical_ir);
        CHECK(a.empirical_gir == b.empirical_gir);
        CHECK(a.empirical_sgir == b.empirical_sgir);
        REQUIRE(a.argmax_gir.has_value());
        REQUIRE(b.argmax_gir.has_value());
        CHECK(a.argmax_gir->members == b.argmax_gir->members);
        CHECK(a.argmax_gir->ordinal_misreports == b.argmax_gir->ordinal_misreports);
        CHECK(a.profiles_searched == b.profiles_searched);
    }
}

TEST_CASE("exhaustive_search honors the evaluation guard") {
    auto inst = make_instance({{3, 2, 1}, {1, 3, 2}, {2, 1, 3}});
    SearchOptions options;
    options.max_evaluations = 10;
    CHECK_THROWS_AS(exhaustive_search(OrdinalMechanism::RR, inst, 2, options), SearchTooLarge);
}

TEST_CASE("search aggregates are monotone in the coalition bound") {
    std::mt19937_64 rng(83);
    for (int it = 0; it < 10; ++it) {
        auto inst = random_instance(3, 3, ValuationFamily::Binary, rng());
        for (auto mech : {OrdinalMechanism::RR, OrdinalMechanism::PS}) {
            auto r1 = exhaustive_search(mech, inst, 1);
            auto r2 = exhaustive_search(mech, inst, 2);
            if (r1.empirical_gir && r2.empirical_gir)
                CHECK(ratio_geq(*r2.empirical_gir, *r1.empirical_gir));
            if (r1.empirical_sgir && r2.empirical_sgir)
                CHECK(ratio_geq(*r2.empirical_sgir, *r1.empirical_sgir));
        }
    }
}

TEST_CASE("gir never exceeds sgir when the sgir-feasible set is nonempty") {
    std::mt19937_64 rng(89);
    for (int it = 0; it < 10; ++it) {
        auto inst = random_instance(3, 3, ValuationFamily::UniformRational, rng());
        for (auto mech : {OrdinalMechanism::RR, OrdinalMechanism::PS}) {
            auto r = exhaustive_search(mech, inst, 2);
            if (r.empirical_gir && r.empirical_sgir)
                CHECK(ratio_geq(*r.empirical_sgir, *r.empirical_gir));
        }
    }
}

TEST_CASE("binary_reduction prefix ratios") {
    auto r = binary_reduction({Rational(1, 2), Rational(1, 2)}, {1, 0});
    CHECK(r.r_max == GainRatio::finite(2));
    CHECK(r.prefix == 1);
    CHECK(r.binary_valuation == std::vector<int>{1, 0});

    auto same = binary_reduction({Rational(1, 3), Rational(2, 3)}, {Rational(1, 3), Rational(2, 3)});
    CHECK(same.r_max == GainRatio::finite(1));
    CHECK(same.prefix == 2);  // largest maximizing prefix on ties

    auto inf = binary_reduction({0, 1}, {Rational(1, 2), Rational(1, 2)});
    CHECK(inf.r_max.infinite);
}

TEST_CASE("binary_reduction dominates the cardinal ratio on random manipulations") {
    std::mt19937_64 rng(97);
    int done = 0;
    while (done < 60) {
        auto inst = random_instance(3, 3, ValuationFamily::UniformRational, rng());
        auto truthful = ordinal_from_cardinal(inst);
        int agent = static_cast<int>(rng() % 3);
        Coalition coalition;
        coalition.members = {agent};
        auto mis = truthful.orderings[agent];
        std::shuffle(mis.begin(), mis.end(), rng);
        coalition.ordinal_misreports[agent] = mis;
        auto manipulated = truthful;
        manipulated.orderings[agent] = mis;

        for (auto mech : {OrdinalMechanism::RR, OrdinalMechanism::PS}) {
            std::vector<Rational> s_true, s_manip;
            if (mech == OrdinalMechanism::RR) {
                auto [a_true, t1] = round_robin(truthful, 3, 3);
                auto [a_manip, t2] = round_robin(manipulated, 3, 3);
                s_true = integral_as_shares(a_true.bundles[agent], 3);
                s_manip = integral_as_shares(a_manip.bundles[agent], 3);
            } else {
                auto [a_true, t1] = probabilistic_serial(truthful, 3, 3);
                auto [a_manip, t2] = probabilistic_serial(manipulated, 3, 3);
                s_true = a_true.shares[agent];
                s_manip = a_manip.shares[agent];
            }
            auto cardinal = gain_ratio(utility(inst, agent, s_true), utility(inst, agent, s_manip));
            auto reduction = binary_reduction(in_preference_order(s_true, truthful.orderings[agent]),
                                              in_preference_order(s_manip, truthful.orderings[agent]));
            CHECK(ratio_geq(reduction.r_max, cardinal));
        }
        ++done;
    }
}

TEST_CASE("mnw_manipulation_ratio is 1 under the identity misreport") {
    auto inst = make_instance({{2, 1, 1}, {1, 3, 1}, {1, 1, 2}});
    Coalition identity;
    identity.members = {0};
    identity.cardinal_misreports[0] = inst.valuations[0];
    auto report = mnw_manipulation_ratio(inst, identity, {}, {});
    REQUIRE(!report.per_agent.at(0).infinite);
    CHECK(to_double(report.per_agent.at(0).value) == doctest::Approx(1.0).epsilon(1e-6));
}
