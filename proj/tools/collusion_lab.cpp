// collusion-lab: run fair-division mechanisms, verify the PS/RR coupling and
// market equilibria, and measure coalition manipulation gains.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>

#include "collusion/core.hpp"
#include "collusion/fisher.hpp"
#include "collusion/incentives.hpp"
#include "collusion/instances.hpp"
#include "collusion/json_io.hpp"
#include "collusion/mechanisms.hpp"

namespace {

using nlohmann::json;
using namespace collusion;

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON in ") + path + ": " + e.what());
    }
    return j;
}

void emit(const json& j, const std::string& output_path) {
    if (output_path.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream out(output_path);
        if (!out) throw InputError("cannot write " + output_path);
        out << j.dump(2) << "\n";
    }
}

Instance load_instance(const std::string& path, bool fisher_use) {
    Instance inst;
    try {
        inst = instance_from_json(load_json(path));
    } catch (const json::exception& e) {
        throw InputError(std::string("bad instance JSON: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("bad instance JSON: ") + e.what());
    }
    auto valid = validate_instance(inst, fisher_use);
    if (!valid.ok())
        throw InputError(std::string("invalid instance: ") + validation_error_name(valid.error) +
                         ": " + valid.detail);
    return inst;
}

std::uint64_t factorial_u64(int k) {
    std::uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

std::vector<std::vector<int>> all_permutations(int m) {
    std::vector<std::vector<int>> perms;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return perms;
}

int cmd_run(const std::string& input, const std::string& profile_path,
            const std::string& mechanism, bool paper_T, std::int64_t explicit_T, bool no_trace,
            double tol, const std::string& output) {
    bool needs_fisher = mechanism == "mnw";
    Instance inst;
    OrdinalProfile profile;
    int n = 0, m = 0;
    if (!profile_path.empty()) {
        if (needs_fisher) throw InputError("mnw needs cardinal valuations, not a profile");
        profile = profile_from_json(load_json(profile_path));
        n = static_cast<int>(profile.orderings.size());
        m = n > 0 ? static_cast<int>(profile.orderings.front().size()) : 0;
        auto valid = validate_profile(profile, n, m);
        if (!valid.ok()) throw InputError("invalid profile: " + valid.detail);
    } else if (!input.empty()) {
        inst = load_instance(input, needs_fisher);
        n = inst.n;
        m = inst.m;
        if (mechanism != "mnw") profile = ordinal_from_cardinal(inst);
    } else {
        throw InputError("need --input or --profile");
    }

    json out;
    if (mechanism == "rr") {
        auto [alloc, trace] = round_robin(profile, n, m);
        out["allocation"] = integral_allocation_to_json(alloc);
        if (!no_trace) out["trace"] = rr_trace_to_json(trace);
    } else if (mechanism == "ps") {
        auto [alloc, trace] = probabilistic_serial(profile, n, m);
        out["allocation"] = fractional_allocation_to_json(alloc);
        if (!no_trace) out["trace"] = ps_trace_to_json(trace);
    } else if (mechanism == "ps-via-rr") {
        std::optional<BigInt> T;
        if (paper_T) T = pow_big(factorial(n), m);
        if (explicit_T > 0) T = BigInt(explicit_T);
        auto result = ps_via_rr(profile, n, m, T);
        out["allocation"] = fractional_allocation_to_json(result.allocation);
        out["T"] = result.T.str();
        if (!no_trace) out["trace"] = rr_trace_to_json(result.rr_trace);
    } else if (mechanism == "mnw") {
        auto result = fisher::mnw_allocate(inst, {}, tol);
        out["allocation"] = fractional_allocation_to_json(result.allocation);
        out["outcome"] = market_outcome_to_json(result.outcome);
    } else {
        throw InputError("unknown mechanism '" + mechanism + "'");
    }
    emit(out, output);
    return kExitOk;
}

int cmd_check_equivalence(int n, int m, const std::string& output) {
    std::uint64_t perm_count = factorial_u64(m);
    double profiles = std::pow(static_cast<double>(perm_count), n);
    if (profiles > 1e6)
        throw InputError("(m!)^n = " + std::to_string(profiles) + " exceeds the 10^6 guard");

    auto perms = all_permutations(m);
    std::uint64_t checked = 0;
    std::vector<std::uint64_t> counter(n, 0);
    OrdinalProfile profile;
    profile.orderings.assign(n, perms[0]);
    for (;;) {
        for (int a = 0; a < n; ++a) profile.orderings[a] = perms[counter[a]];
        auto [ps_alloc, ps_trace] = probabilistic_serial(profile, n, m);
        auto via_rr = ps_via_rr(profile, n, m);
        ++checked;
        if (!(ps_alloc == via_rr.allocation)) {
            json out = {{"status", "counterexample"},
                        {"profile", profile_to_json(profile)},
                        {"ps", fractional_allocation_to_json(ps_alloc)},
                        {"ps_via_rr", fractional_allocation_to_json(via_rr.allocation)},
                        {"checked", checked}};
            emit(out, output);
            return kExitViolation;
        }
        int pos = n;
        while (pos > 0) {
            if (++counter[pos - 1] < perm_count) break;
            counter[pos - 1] = 0;
            --pos;
        }
        if (pos == 0) break;
    }
    emit({{"status", "pass"}, {"checked", checked}}, output);
    return kExitOk;
}

std::string ratio_text(const std::optional<GainRatio>& r) {
    if (!r) return "n/a";
    if (r->infinite) return "inf";
    return rat_to_string(r->value);
}

int cmd_search(const std::string& input, const std::string& mechanism, int c,
               bool gir_weak_improvement, const std::string& format,
               const std::string& output) {
    Instance inst = load_instance(input, false);
    OrdinalMechanism mech = mechanism == "rr" ? OrdinalMechanism::RR : OrdinalMechanism::PS;
    SearchOptions options;
    options.gir_requires_weak_improvement = gir_weak_improvement;
    auto result = exhaustive_search(mech, inst, c, options);

    if (format == "csv") {
        std::ostringstream csv;
        csv << "mechanism,c,aggregate,agent,ratio\n";
        auto rows = [&](const char* kind, const std::optional<GainRatio>& value,
                        const std::optional<Coalition>& arg) {
            if (!value || !arg) return;
            RatioReport report = evaluate_manipulation(mech, inst, *arg);
            for (const auto& [agent, ratio] : report.per_agent)
                csv << mechanism << "," << c << "," << kind << "," << agent << ","
                    << (ratio.infinite ? "inf" : rat_to_string(ratio.value)) << "\n";
        };
        rows("ir", result.empirical_ir, result.argmax_ir);
        rows("gir", result.empirical_gir, result.argmax_gir);
        rows("sgir", result.empirical_sgir, result.argmax_sgir);
        if (output.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(output);
            if (!out) throw InputError("cannot write " + output);
            out << csv.str();
        }
    } else {
        emit(search_result_to_json(result, mechanism == "rr" ? "RR" : "PS", c), output);
    }
    return kExitOk;
}

int cmd_reproduce(const std::string& bound, int n, int c, int T, const std::string& eps_text,
                  double tol, const std::string& output) {
    PaperInstance paper;
    RatioReport achieved;
    if (bound == "mnw-gir" || bound == "mnw-sgir") {
        paper = bound == "mnw-gir" ? mnw_gir_instance(n, c) : mnw_sgir_instance(n, c);
        achieved = mnw_manipulation_ratio(paper.instance, paper.coalition, paper.policy_truthful,
                                          paper.policy_manipulated, tol);
    } else if (bound == "ps-gir") {
        paper = ps_gir_instance(n, c, T);
        Instance ordinal_view = paper.instance;
        achieved = [&] {
            OrdinalProfile manipulated = paper.truthful;
            for (const auto& [agent, ordering] : paper.coalition.ordinal_misreports)
                manipulated.orderings[agent] = ordering;
            auto [x_true, t1] =
                probabilistic_serial(paper.truthful, ordinal_view.n, ordinal_view.m);
            auto [x_manip, t2] =
                probabilistic_serial(manipulated, ordinal_view.n, ordinal_view.m);
            RatioReport report;
            report.coalition = paper.coalition;
            report.all_weakly_better = true;
            for (int a : paper.coalition.members) {
                auto r = gain_ratio(utility(ordinal_view, a, x_true.shares[a]),
                                    utility(ordinal_view, a, x_manip.shares[a]));
                report.per_agent[a] = r;
                if (!ratio_geq(r, GainRatio::finite(1))) report.all_weakly_better = false;
            }
            return report;
        }();
    } else if (bound == "rr-sgir") {
        paper = rr_sgir_instance(rat_from_string(eps_text));
        achieved = evaluate_manipulation(OrdinalMechanism::RR, paper.instance, paper.coalition);
    } else {
        throw InputError("unknown bound '" + bound + "'");
    }

    json expected = json::object(), got = json::object();
    for (const auto& [agent, ratio] : paper.expected_ratios)
        expected[std::to_string(agent)] = rat_to_string(ratio);
    for (const auto& [agent, ratio] : achieved.per_agent)
        got[std::to_string(agent)] = ratio.infinite ? "inf" : rat_to_string(ratio.value);
    json out = {{"bound", bound},
                {"expected", std::move(expected)},
                {"achieved", std::move(got)},
                {"limit", paper.expected_limit ? json(rat_to_string(*paper.expected_limit))
                                               : json("inf")}};
    bool match = true;
    for (const auto& [agent, ratio] : paper.expected_ratios) {
        auto it = achieved.per_agent.find(agent);
        if (it == achieved.per_agent.end() || it->second.infinite) {
            match = false;
            continue;
        }
        if (paper.mechanism == TargetMechanism::MNW) {
            double rel = std::abs(to_double(it->second.value) - to_double(ratio)) /
                         std::max(1.0, to_double(ratio));
            match = match && rel <= 1e-5;
        } else {
            match = match && it->second.value == ratio;
        }
    }
    out["match"] = match;
    emit(out, output);
    return match ? kExitOk : kExitViolation;
}

int cmd_gen(const std::string& generator, int n, int m, int c, int T,
            const std::string& eps_text, const std::string& family, std::int64_t seed,
            bool has_seed, const std::string& output) {
    if (generator == "random") {
        if (!has_seed) throw InputError("random generation requires an explicit --seed");
        auto fam = family == "binary" ? ValuationFamily::Binary : ValuationFamily::UniformRational;
        emit(instance_to_json(random_instance(n, m, fam, static_cast<std::uint64_t>(seed))),
             output);
        return kExitOk;
    }
    PaperInstance paper;
    if (generator == "mnw-gir") paper = mnw_gir_instance(n, c);
    else if (generator == "mnw-sgir") paper = mnw_sgir_instance(n, c);
    else if (generator == "ps-gir") paper = ps_gir_instance(n, c, T);
    else if (generator == "rr-sgir") paper = rr_sgir_instance(rat_from_string(eps_text));
    else throw InputError("unknown generator '" + generator + "'");
    emit(paper_instance_to_json(paper), output);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fair-division mechanisms and coalition-manipulation analysis"};
    app.require_subcommand(1);

    std::string input, profile_path, output, mechanism = "rr", format = "json";
    std::string bound, generator, family = "binary", eps_text = "1/100";
    bool paper_T = false, no_trace = false, gir_weak_improvement = false;
    std::int64_t explicit_T = 0, seed = 0;
    int n = 2, m = 2, c = 1, T = 2;
    double tol = 1e-10;

    auto* run = app.add_subcommand("run", "Run a mechanism on an instance or profile");
    run->add_option("--input", input, "Instance JSON path");
    run->add_option("--profile", profile_path, "OrdinalProfile JSON path");
    run->add_option("--mechanism", mechanism, "rr | ps | ps-via-rr | mnw");
    run->add_flag("--paper-T", paper_T, "Use T = (n!)^m in ps-via-rr");
    run->add_option("-T,--copies", explicit_T, "Explicit copy count for ps-via-rr");
    run->add_flag("--no-trace", no_trace, "Suppress trace serialization");
    run->add_option("--tol", tol, "Solver tolerance (mnw)");
    run->add_option("--output", output, "Write JSON here instead of stdout");

    auto* check = app.add_subcommand("check-equivalence",
                                     "Exhaustively compare PS and its RR implementation");
    check->add_option("--n", n, "Agent count")->required();
    check->add_option("--m", m, "Good count")->required();
    check->add_option("--output", output, "Write JSON here instead of stdout");

    auto* search = app.add_subcommand("search", "Exhaustive coalition-manipulation search");
    search->add_option("--input", input, "Instance JSON path")->required();
    search->add_option("--mechanism", mechanism, "rr | ps");
    search->add_option("--c", c, "Coalition size bound");
    search->add_flag("--gir-weak-improvement", gir_weak_improvement,
                     "Restrict the GIR aggregate to weakly-improving manipulations");
    search->add_option("--format", format, "json | csv");
    search->add_option("--output", output, "Write report here instead of stdout");

    auto* reproduce = app.add_subcommand("reproduce", "Replay a lower-bound construction");
    reproduce->add_option("--bound", bound, "mnw-gir | mnw-sgir | ps-gir | rr-sgir")->required();
    reproduce->add_option("--n", n, "Agent count");
    reproduce->add_option("--c", c, "Coalition size");
    reproduce->add_option("--T", T, "Copy parameter (ps-gir)");
    reproduce->add_option("--eps", eps_text, "Epsilon as p/q (rr-sgir)");
    reproduce->add_option("--tol", tol, "Solver tolerance (mnw bounds)");
    reproduce->add_option("--output", output, "Write JSON here instead of stdout");

    auto* gen = app.add_subcommand("gen", "Emit a paper instance or a random instance");
    gen->add_option("--generator", generator,
                    "mnw-gir | mnw-sgir | ps-gir | rr-sgir | random")->required();
    gen->add_option("--n", n, "Agent count");
    gen->add_option("--m", m, "Good count (random)");
    gen->add_option("--c", c, "Coalition size");
    gen->add_option("--T", T, "Copy parameter (ps-gir)");
    gen->add_option("--eps", eps_text, "Epsilon as p/q (rr-sgir)");
    gen->add_option("--family", family, "binary | uniform-rational");
    auto* seed_opt = gen->add_option("--seed", seed, "RNG seed (random)");
    gen->add_option("--output", output, "Write JSON here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(input, profile_path, mechanism, paper_T, explicit_T, no_trace, tol,
                           output);
        if (check->parsed()) return cmd_check_equivalence(n, m, output);
        if (search->parsed())
            return cmd_search(input, mechanism, c, gir_weak_improvement, format, output);
        if (reproduce->parsed())
            return cmd_reproduce(bound, n, c, T, eps_text, tol, output);
        if (gen->parsed())
            return cmd_gen(generator, n, m, c, T, eps_text, family, seed, !seed_opt->empty(),
                           output);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidParams& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const InvalidT& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const SearchTooLarge& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const collusion::fisher::NoConvergence& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
