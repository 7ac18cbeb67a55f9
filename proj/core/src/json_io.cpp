#include "collusion/json_io.hpp"

#include <nlohmann/json.hpp>

namespace collusion {

using nlohmann::json;

json rational_to_json(const Rational& q) {
    if (rat_den(q) == 1 && rat_num(q) >= INT64_MIN && rat_num(q) <= INT64_MAX)
        return rat_num(q).convert_to<std::int64_t>();
    return rat_to_string(q);
}

Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    if (j.is_string()) return rat_from_string(j.get<std::string>());
    throw std::invalid_argument("rational must be an integer or a \"p/q\" string");
}

json instance_to_json(const Instance& inst) {
    json rows = json::array();
    for (const auto& row : inst.valuations) {
        json r = json::array();
        for (const auto& v : row) r.push_back(rational_to_json(v));
        rows.push_back(std::move(r));
    }
    return {{"n", inst.n}, {"m", inst.m}, {"divisible", inst.divisible},
            {"valuations", std::move(rows)}};
}

Instance instance_from_json(const json& j) {
    Instance inst;
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.divisible = j.value("divisible", false);
    for (const auto& row : j.at("valuations")) {
        std::vector<Rational> r;
        for (const auto& v : row) r.push_back(rational_from_json(v));
        inst.valuations.push_back(std::move(r));
    }
    return inst;
}

json profile_to_json(const OrdinalProfile& profile) {
    return {{"orderings", profile.orderings}};
}

OrdinalProfile profile_from_json(const json& j) {
    OrdinalProfile profile;
    profile.orderings = j.at("orderings").get<std::vector<std::vector<int>>>();
    return profile;
}

json fractional_allocation_to_json(const FractionalAllocation& alloc) {
    json rows = json::array();
    for (const auto& row : alloc.shares) {
        json r = json::array();
        for (const auto& s : row) r.push_back(rational_to_json(s));
        rows.push_back(std::move(r));
    }
    return {{"shares", std::move(rows)}};
}

FractionalAllocation fractional_allocation_from_json(const json& j) {
    FractionalAllocation alloc;
    for (const auto& row : j.at("shares")) {
        std::vector<Rational> r;
        for (const auto& s : row) r.push_back(rational_from_json(s));
        alloc.shares.push_back(std::move(r));
    }
    return alloc;
}

json integral_allocation_to_json(const IntegralAllocation& alloc) {
    return {{"bundles", alloc.bundles}};
}

IntegralAllocation integral_allocation_from_json(const json& j) {
    IntegralAllocation alloc;
    alloc.bundles = j.at("bundles").get<std::vector<std::vector<int>>>();
    return alloc;
}

json ps_trace_to_json(const PsTrace& trace) {
    json steps = json::array();
    for (const auto& step : trace.steps) {
        json eaters = json::object();
        for (const auto& [good, agents] : step.eaters)
            eaters[std::to_string(good)] = agents;
        steps.push_back({{"t", rat_to_string(step.duration)},
                         {"finished", step.finished},
                         {"eaters", std::move(eaters)}});
    }
    return {{"steps", std::move(steps)}};
}

json rr_trace_to_json(const RrTrace& trace) {
    json stages = json::array();
    for (const auto& stage : trace.stages)
        stages.push_back({{"agent", stage.agent}, {"good", stage.good}});
    return {{"stages", std::move(stages)}};
}

json market_outcome_to_json(const fisher::MarketOutcome& outcome) {
    return {{"x", outcome.allocation},
            {"p", outcome.prices.p},
            {"residuals",
             {{"clearing", outcome.residuals.clearing},
              {"budget", outcome.residuals.budget},
              {"mbb", outcome.residuals.mbb}}},
            {"iters", outcome.iterations}};
}

json coalition_to_json(const Coalition& coalition) {
    json j = {{"members", coalition.members}};
    if (!coalition.ordinal_misreports.empty()) {
        json mis = json::object();
        for (const auto& [agent, ordering] : coalition.ordinal_misreports)
            mis[std::to_string(agent)] = ordering;
        j["ordinal_misreports"] = std::move(mis);
    }
    if (!coalition.cardinal_misreports.empty()) {
        json mis = json::object();
        for (const auto& [agent, row] : coalition.cardinal_misreports) {
            json r = json::array();
            for (const auto& v : row) r.push_back(rational_to_json(v));
            mis[std::to_string(agent)] = std::move(r);
        }
        j["cardinal_misreports"] = std::move(mis);
    }
    return j;
}

Coalition coalition_from_json(const json& j) {
    Coalition coalition;
    coalition.members = j.at("members").get<std::vector<int>>();
    if (j.contains("ordinal_misreports"))
        for (const auto& [agent, ordering] : j.at("ordinal_misreports").items())
            coalition.ordinal_misreports[std::stoi(agent)] = ordering.get<std::vector<int>>();
    if (j.contains("cardinal_misreports"))
        for (const auto& [agent, row] : j.at("cardinal_misreports").items()) {
            std::vector<Rational> r;
            for (const auto& v : row) r.push_back(rational_from_json(v));
            coalition.cardinal_misreports[std::stoi(agent)] = std::move(r);
        }
    return coalition;
}

namespace {

json ratio_to_json(const GainRatio& r) {
    if (r.infinite) return "inf";
    return rat_to_string(r.value);
}

}  // namespace

json ratio_report_to_json(const RatioReport& report) {
    json per_agent = json::object();
    for (const auto& [agent, ratio] : report.per_agent)
        per_agent[std::to_string(agent)] = ratio_to_json(ratio);
    return {{"per_agent", std::move(per_agent)},
            {"coalition", coalition_to_json(report.coalition)},
            {"all_weakly_better", report.all_weakly_better},
            {"min_ratio", ratio_to_json(report.min_ratio)},
            {"max_ratio", ratio_to_json(report.max_ratio)}};
}

json search_result_to_json(const SearchResult& result, const std::string& mechanism, int c) {
    auto opt = [](const std::optional<GainRatio>& r) -> json {
        if (!r) return nullptr;
        return ratio_to_json(*r);
    };
    json argmax = json::object();
    if (result.argmax_ir) argmax["ir"] = coalition_to_json(*result.argmax_ir);
    if (result.argmax_gir) argmax["gir"] = coalition_to_json(*result.argmax_gir);
    if (result.argmax_sgir) argmax["sgir"] = coalition_to_json(*result.argmax_sgir);
    return {{"mechanism", mechanism},
            {"c", c},
            {"empirical",
             {{"ir", opt(result.empirical_ir)},
              {"gir", opt(result.empirical_gir)},
              {"sgir", opt(result.empirical_sgir)}}},
            {"argmax", std::move(argmax)},
            {"profiles_searched", result.profiles_searched},
            {"infinite_ratio_seen", result.infinite_ratio_seen}};
}

json paper_instance_to_json(const PaperInstance& paper) {
    const char* mech = paper.mechanism == TargetMechanism::RR   ? "RR"
                       : paper.mechanism == TargetMechanism::PS ? "PS"
                                                                : "MNW";
    json expected = json::object();
    for (const auto& [agent, ratio] : paper.expected_ratios)
        expected[std::to_string(agent)] = rat_to_string(ratio);
    json j = {{"id", paper.id},
              {"mechanism", mech},
              {"instance", instance_to_json(paper.instance)},
              {"coalition", coalition_to_json(paper.coalition)},
              {"expected_ratios", std::move(expected)}};
    if (!paper.truthful.orderings.empty()) j["truthful"] = profile_to_json(paper.truthful);
    j["expected_limit"] =
        paper.expected_limit ? json(rat_to_string(*paper.expected_limit)) : json("inf");
    return j;
}

}  // namespace collusion
