#include "collusion/instances.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "collusion/core.hpp"

namespace collusion {

namespace {

Instance mnw_lower_bound_market(int n, int c) {
    // Corrupted agents value everything at 1; honest agents skip the first c
    // goods.
    Instance inst;
    inst.n = n;
    inst.m = n;
    inst.divisible = true;
    inst.valuations.assign(n, std::vector<Rational>(n, Rational(1)));
    for (int a = c; a < n; ++a)
        for (int g = 0; g < c; ++g) inst.valuations[a][g] = 0;
    return inst;
}

Coalition mnw_lower_bound_coalition(int n, int c) {
    Coalition coalition;
    std::vector<Rational> misreport(n, Rational(1));
    for (int g = 0; g < c; ++g) misreport[g] = 0;
    for (int a = 0; a < c; ++a) {
        coalition.members.push_back(a);
        coalition.cardinal_misreports[a] = misreport;
    }
    return coalition;
}

}  // namespace

Rational mnw_gir_expected_ratio(int n, int c) { return 2 - Rational(c, n); }

Rational mnw_sgir_leader_expected_ratio(int n, int c) {
    // Leader takes c - (c-1)c/n of the freed goods plus the uniform (n-c)/n.
    return 1 + c - Rational(BigInt(c) * c, n);
}

Rational ps_gir_expected_ratio(int n, int c, int T, int corrupted_agent) {
    int a = corrupted_agent + 1;  // closed form indexes corrupted agents from 1
    Rational middle = Rational(1, T - 1) - Rational(1, pow_big(BigInt(T), a - 1) * (T - 1));
    return c - c * middle + Rational(n - c, n);
}

PaperInstance mnw_gir_instance(int n, int c) {
    if (c < 1 || n <= c) throw InvalidParams("need n > c >= 1");
    PaperInstance paper;
    paper.id = "mnw-gir";
    paper.mechanism = TargetMechanism::MNW;
    paper.instance = mnw_lower_bound_market(n, c);
    paper.coalition = mnw_lower_bound_coalition(n, c);
    paper.policy_truthful = fisher::ZeroGoodPolicy::uniform();
    std::map<int, std::vector<Rational>> shares;
    for (int g = 0; g < c; ++g) {
        std::vector<Rational> column(n, Rational(0));
        column[g] = 1;  // freed good g goes wholly to corrupted agent g
        shares[g] = std::move(column);
    }
    paper.policy_manipulated = fisher::ZeroGoodPolicy::explicit_shares(std::move(shares));
    for (int a = 0; a < c; ++a) paper.expected_ratios[a] = mnw_gir_expected_ratio(n, c);
    paper.expected_limit = 2;
    return paper;
}

PaperInstance mnw_sgir_instance(int n, int c) {
    if (c < 1 || n <= c) throw InvalidParams("need n > c >= 1");
    PaperInstance paper;
    paper.id = "mnw-sgir";
    paper.mechanism = TargetMechanism::MNW;
    paper.instance = mnw_lower_bound_market(n, c);
    paper.coalition = mnw_lower_bound_coalition(n, c);
    paper.policy_truthful = fisher::ZeroGoodPolicy::uniform();
    // Freed goods: agents 1..c-1 keep exactly c/n (taken from good a), the
    // leader absorbs the rest.
    std::map<int, std::vector<Rational>> shares;
    for (int g = 0; g < c; ++g) {
        std::vector<Rational> column(n, Rational(0));
        if (g >= 1) {
            column[g] = Rational(c, n);
            column[0] = 1 - Rational(c, n);
        } else {
            column[0] = 1;
        }
        shares[g] = std::move(column);
    }
    paper.policy_manipulated = fisher::ZeroGoodPolicy::explicit_shares(std::move(shares));
    paper.expected_ratios[0] = mnw_sgir_leader_expected_ratio(n, c);
    for (int a = 1; a < c; ++a) paper.expected_ratios[a] = 1;
    paper.expected_limit = c + 1;
    return paper;
}

PaperInstance ps_gir_instance(int n, int c, int T) {
    if (c < 1 || n <= c) throw InvalidParams("need n > c >= 1");
    if (T <= 1 || T % n != 0) throw InvalidParams("need T > 1 with n | T");
    BigInt superscripts = BigInt(c + 1) * pow_big(BigInt(T), c);
    BigInt goods = superscripts * n;
    if (goods > 10000) throw InvalidParams("construction needs " + goods.str() + " goods > 10^4");
    const int P = superscripts.convert_to<int>();
    const int m = goods.convert_to<int>();
    const auto good_id = [P](int i, int p) { return i * P + p; };

    std::vector<std::int64_t> power(c + 2, 1);  // power[k] = T^k, k <= c+1
    for (int k = 1; k <= c + 1; ++k) power[k] = power[k - 1] * T;

    PaperInstance paper;
    paper.id = "ps-gir";
    paper.mechanism = TargetMechanism::PS;
    auto& inst = paper.instance;
    inst.n = n;
    inst.m = m;
    inst.divisible = true;
    inst.valuations.assign(n, std::vector<Rational>(m, Rational(0)));
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < P; ++p) {
                bool one = a < c ? (p < power[a + 1]) : (i >= c || p >= power[c]);
                if (one) inst.valuations[a][good_id(i, p)] = 1;
            }

    // Truthful orderings: value first, then smaller superscript, then own
    // subscript, then smaller subscript.
    paper.truthful.orderings.resize(n);
    for (int a = 0; a < n; ++a) {
        struct Key {
            int value, p, own, i, id;
        };
        std::vector<Key> keys;
        keys.reserve(m);
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < P; ++p) {
                int id = good_id(i, p);
                keys.push_back({inst.valuations[a][id] == 1 ? 1 : 0, p, i == a ? 0 : 1, i, id});
            }
        std::sort(keys.begin(), keys.end(), [](const Key& x, const Key& y) {
            if (x.value != y.value) return x.value > y.value;
            if (x.p != y.p) return x.p < y.p;
            if (x.own != y.own) return x.own < y.own;
            return x.i < y.i;
        });
        auto& ord = paper.truthful.orderings[a];
        ord.reserve(m);
        for (const auto& k : keys) ord.push_back(k.id);
    }

    // Misreports: the shared tier, then the agent's private tier, then the
    // tail tier, then everything else.
    for (int a = 0; a < c; ++a) {
        paper.coalition.members.push_back(a);
        std::int64_t lower = 0;  // T + T^2 + ... + T^a, exclusive lower bound
        for (int k = 1; k <= a; ++k) lower += power[k];
        std::vector<int> shared, own, tail, rest;
        for (int p = 0; p < P; ++p)
            for (int i = 0; i < n; ++i) {
                int id = good_id(i, p);
                if (i >= c && p < power[c]) shared.push_back(id);
                else if (i < c && p >= lower && p < power[a + 1]) own.push_back(id);
                else if (p >= power[c]) tail.push_back(id);
            }
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < P; ++p) {
                int id = good_id(i, p);
                bool in_shared = i >= c && p < power[c];
                bool in_own = i < c && p >= lower && p < power[a + 1];
                bool in_tail = p >= power[c];
                if (!in_shared && !in_own && !in_tail) rest.push_back(id);
            }
        std::vector<int> ordering;
        ordering.reserve(m);
        for (auto* tier : {&shared, &own, &tail, &rest})
            ordering.insert(ordering.end(), tier->begin(), tier->end());
        paper.coalition.ordinal_misreports[a] = std::move(ordering);
        paper.expected_ratios[a] = ps_gir_expected_ratio(n, c, T, a);
    }
    paper.expected_limit = c + 1;
    return paper;
}

PaperInstance rr_sgir_instance(const Rational& eps) {
    if (eps <= 0 || eps >= Rational(1, 4)) throw InvalidParams("need 0 < eps < 1/4");
    PaperInstance paper;
    paper.id = "rr-sgir";
    paper.mechanism = TargetMechanism::RR;
    auto& inst = paper.instance;
    inst.n = 3;
    inst.m = 4;
    inst.divisible = false;
    inst.valuations = {
        {1 + 2 * eps, 1 + eps, 1, 0},
        {1 / eps, 1, 0, 0},
        {0, 0, 2, 1},
    };
    paper.truthful = ordinal_from_cardinal(inst);
    paper.coalition.members = {0, 1};
    paper.coalition.ordinal_misreports[0] = {2, 1, 0, 3};
    paper.coalition.ordinal_misreports[1] = paper.truthful.orderings[1];
    paper.expected_ratios[0] = (2 + eps) / (1 + 2 * eps);
    paper.expected_ratios[1] = 1 / eps;
    paper.expected_limit = std::nullopt;  // unbounded family
    return paper;
}

Instance random_instance(int n, int m, ValuationFamily family, std::uint64_t seed) {
    if (n < 1 || m < 1) throw InvalidParams("need n, m >= 1");
    std::mt19937_64 rng(seed);
    Instance inst;
    inst.n = n;
    inst.m = m;
    inst.divisible = true;
    inst.valuations.assign(n, std::vector<Rational>(m));
    for (int a = 0; a < n; ++a)
        for (int g = 0; g < m; ++g) {
            if (family == ValuationFamily::Binary) {
                inst.valuations[a][g] = static_cast<int>(rng() % 2);
            } else {
                auto num = static_cast<std::int64_t>(rng() % 101);
                auto den = static_cast<std::int64_t>(1 + rng() % 100);
                inst.valuations[a][g] = Rational(num, den);
            }
        }
    return inst;
}

}  // namespace collusion
