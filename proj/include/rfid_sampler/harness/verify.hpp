#ifndef RFID_SAMPLER_HARNESS_VERIFY_HPP
#define RFID_SAMPLER_HARNESS_VERIFY_HPP

#include <bit>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "../analysis.hpp"
#include "../cost.hpp"
#include "../select.hpp"
#include "experiments.hpp"

namespace rfid_sampler::harness
{

struct CheckResult
{
    std::string suite;
    std::string name;
    bool passed = false;
    std::string detail;
    nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
};

namespace limits
{
inline constexpr double min_suitable_fraction = 0.40;
inline constexpr double max_mean_seed_tests = 1.5;
inline constexpr std::size_t max_seed_tests = 6;
inline constexpr double uniformity_alpha = 1e-3;
inline constexpr double max_inclusion_z = 4.0;
inline constexpr double refined_cost_low = 0.80;
inline constexpr double refined_cost_high = 1.15;
inline constexpr double ratio_low = 1.0;
inline constexpr double ratio_high = 2.1;
inline constexpr double min_cheaper_fraction = 0.99;
} // namespace limits

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"seeds", "uniformity", "exactness", "cost", "selgen", "monotone"};
    return names;
}

inline std::vector<CheckResult> verify_seeds(std::uint64_t seed)
{
    const auto g = seed_grid(seed_grid_points(), 1000, seed);
    CheckResult r{"seeds", "suitable-seed statistics", false, "", {}};
    r.passed = g.failures == 0 && g.min_suitable_fraction >= limits::min_suitable_fraction &&
               g.max_avg_tests <= limits::max_mean_seed_tests && g.max_tests <= limits::max_seed_tests;
    r.detail = "grid points " + std::to_string(g.points.size()) + ", worst mean tests " + format_real(g.max_avg_tests) +
               ", max tests " + std::to_string(g.max_tests) + ", min suitable fraction " +
               format_real(g.min_suitable_fraction);
    r.metrics = {{"points", g.points.size()},
                 {"trials_per_point", 1000},
                 {"max_avg_tests", g.max_avg_tests},
                 {"max_tests", g.max_tests},
                 {"min_suitable_fraction", g.min_suitable_fraction},
                 {"failures", g.failures}};
    return {r};
}

inline std::vector<CheckResult> verify_uniformity(std::uint64_t seed)
{
    std::vector<CheckResult> out;
    for (auto p : {Protocol::optc, Protocol::random_select}) {
        const auto u = subset_uniformity(p, 6, 2, 100000, derive_seed(seed, {static_cast<std::uint64_t>(p)}));
        CheckResult r{"uniformity", std::string(to_string(p)) + " 2-of-6 subsets", false, "", {}};
        r.passed = u.p_value >= limits::uniformity_alpha && u.max_inclusion_z <= limits::max_inclusion_z;
        r.detail = "chi2 " + format_real(u.chi_square) + " (p " + format_real(u.p_value) + "), max inclusion z " +
                   format_real(u.max_inclusion_z);
        r.metrics = {{"trials", u.trials}, {"chi_square", u.chi_square}, {"p_value", u.p_value},
                     {"max_inclusion_z", u.max_inclusion_z}};
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<CheckResult> verify_exactness(std::uint64_t seed)
{
    struct Case
    {
        Protocol p;
        std::size_t rounds;
        std::uint64_t max_n, max_c;
    };
    std::vector<CheckResult> out;
    for (const auto& cs : {Case{Protocol::optc, 10000, 1000, 100}, Case{Protocol::optc_impl, 2000, 300, 30},
                           Case{Protocol::random_select, 2000, 1000, 100}}) {
        const auto e = exactness_sweep(cs.p, cs.rounds, derive_seed(seed, {static_cast<std::uint64_t>(cs.p)}),
                                       cs.max_n, cs.max_c);
        CheckResult r{"exactness", std::string(to_string(cs.p)) + " exact c_k ready", e.violations == 0, "", {}};
        r.detail = std::to_string(e.violations) + " violations in " + std::to_string(e.rounds) + " rounds";
        if (!e.first_violation.empty()) r.detail += "; first: " + e.first_violation;
        r.metrics = {{"rounds", e.rounds}, {"violations", e.violations}};
        out.push_back(std::move(r));
    }
    return out;
}

inline std::vector<CheckResult> verify_cost(std::uint64_t seed)
{
    std::vector<CheckResult> out;

    for (std::uint64_t c : {10, 50, 100}) {
        const auto rc = refined_cost(c, 1000, seed);
        CheckResult r{"cost", "refined stage bits c=" + std::to_string(c), false, "", {}};
        r.passed = rc.ratio_to_ec >= limits::refined_cost_low && rc.ratio_to_ec <= limits::refined_cost_high;
        r.detail = "mean " + format_real(rc.mean_bits) + " bits = " + format_real(rc.ratio_to_ec) +
                   " e*c (frames alone " + format_real(rc.mean_frame_bits / (std::numbers::e * static_cast<double>(c))) +
                   " e*c)";
        r.metrics = {{"c", c},
                     {"mean_bits", rc.mean_bits},
                     {"mean_frame_bits", rc.mean_frame_bits},
                     {"mean_iterations", rc.mean_iterations},
                     {"ratio_to_ec", rc.ratio_to_ec}};
        out.push_back(std::move(r));
    }

    double previous = 0;
    for (std::uint64_t c : {10, 50}) {
        const auto pts = ratio_sweep({20, 40, 60, 80, 100}, 100, c, 10, seed);
        double mean = 0;
        for (const auto& p : pts) mean += p.mean_ratio;
        mean /= static_cast<double>(pts.size());
        CheckResult r{"cost", "time / lower bound c=" + std::to_string(c), false, "", {}};
        r.passed = mean >= limits::ratio_low && mean <= limits::ratio_high && (previous == 0 || mean < previous);
        r.detail = "mean ratio " + format_real(mean) + ", theoretical " + format_real(pts.front().theoretical_ratio);
        r.metrics = {{"c", c}, {"mean_ratio", mean}, {"theoretical_ratio", pts.front().theoretical_ratio}};
        previous = mean;
        out.push_back(std::move(r));
    }

    const auto b = command_budget_check(100, seed);
    const double cheaper = static_cast<double>(b.cheaper_than_random) / static_cast<double>(b.trials);
    CheckResult r{"cost", "impl command budget", false, "", {}};
    r.passed = b.budget_violations == 0 && cheaper >= limits::min_cheaper_fraction;
    r.detail = std::to_string(b.budget_violations) + " budget violations in " + std::to_string(b.trials) +
               " trials, cheaper than RandomSelect in " + format_real(100 * cheaper) + "%, mean time fraction " +
               format_real(b.mean_time_fraction);
    if (!b.first_violation.empty()) r.detail += "; first: " + b.first_violation;
    r.metrics = {{"trials", b.trials},
                 {"budget_violations", b.budget_violations},
                 {"cheaper_fraction", cheaper},
                 {"mean_time_fraction", b.mean_time_fraction}};
    out.push_back(std::move(r));
    return out;
}

/// Exhaustive SelGen check over every L <= 12 and tau < 2^L, plus Select-level replay for L <= 8.
inline std::vector<CheckResult> verify_selgen()
{
    std::size_t cases = 0;
    std::string failure;
    for (unsigned L = 1; L <= 12 && failure.empty(); ++L) {
        const std::uint64_t top = std::uint64_t{1} << L;
        std::vector<TagId> ids;
        if (L <= 8)
            for (std::uint64_t v = 0; v < top; ++v) ids.push_back(TagId{}.with_bits(41, L, v));
        for (std::uint64_t tau = 0; tau < top && failure.empty(); ++tau) {
            ++cases;
            const auto filters = selgen_filters(tau, L);
            const auto where = "L=" + std::to_string(L) + " tau=" + std::to_string(tau) + ": ";
            const auto budget = static_cast<std::size_t>(std::popcount(tau)) + 1;
            if (filters.size() > budget) failure = where + "too many filters";
            if (tau >= 2 && budget > ceil_log2(tau) + 1) failure = where + "popcount bound exceeds log bound";
            for (std::uint64_t v = 0; v < top && failure.empty(); ++v) {
                std::size_t hits = 0;
                for (const auto& f : filters) hits += f.matches(v) ? 1 : 0;
                if (hits != (v <= tau ? 1U : 0U)) failure = where + "value " + std::to_string(v) + " matched " +
                                                            std::to_string(hits) + " filters";
            }
            if (!ids.empty() && failure.empty()) {
                const auto sl = run_selects(selgen(tau, L, 40), ids);
                for (std::uint64_t v = 0; v < top; ++v)
                    if (sl[v] != (v <= tau)) failure = where + "Select replay differs at " + std::to_string(v);
            }
        }
    }
    CheckResult r{"selgen", "exhaustive L <= 12", failure.empty(), "", {}};
    r.detail = failure.empty() ? std::to_string(cases) + " thresholds checked" : failure;
    r.metrics = {{"thresholds", cases}};
    return {r};
}

inline std::vector<CheckResult> verify_monotone()
{
    std::vector<CheckResult> out;
    auto add = [&](std::string name, bool ok, std::string detail) {
        out.push_back(CheckResult{"monotone", std::move(name), ok, std::move(detail), {}});
    };

    const double mu1 = mu(1), rho1 = rho(1);
    add("mu(1), rho(1) anchors", std::abs(mu1 - 0.3996) <= 1e-4 && std::abs(rho1 - 0.1991) <= 1e-4 &&
                                          std::abs(mu1 + rho1 - 0.5987) <= 1e-4,
        "mu(1) " + format_real(mu1) + ", rho(1) " + format_real(rho1) + ", sum " + format_real(mu1 + rho1));

    bool dec = true;
    for (int c = 1; c < 10000 && dec; ++c) dec = mu(c + 1) < mu(c) && rho(c + 1) < rho(c);
    add("mu, rho strictly decreasing on 1..10^4", dec, dec ? "ok" : "not monotone");

    const auto c44 = reliability_number(0.9, 0.01);
    add("reliability_number(0.9, 0.01) = 44", c44 == 44, "got " + std::to_string(c44));

    const double t96 = transmission_time(96);
    add("transmission_time(96) = 3897.5 us", t96 == 3897.5e-6 && TimingModel::standard().t96_ps == 3'897'500'000ULL,
        "got " + format_real(t96 * 1e6) + " us");

    bool rel = true;
    for (double a = 0.05; a < 0.95 && rel; a += 0.05)
        for (double e = 0.001; e < 0.5 && rel; e *= 2)
            rel = reliability_number(a, e) >= reliability_number(a, std::min(0.99, e * 2)) &&
                  reliability_number(a, e) <= reliability_number(std::min(0.99, a + 0.05), e);
    add("reliability_number monotone in alpha and epsilon", rel, rel ? "ok" : "monotonicity broken");

    bool dom = true;
    for (std::uint64_t n = 1; n <= 40 && dom; ++n)
        for (std::uint64_t m = 0; m <= n && dom; ++m)
            for (std::uint64_t c = 1; c <= n && dom; ++c)
                dom = success_probability(n, m, c) >= success_probability_approx(n, m, c) - 1e-12;
    add("exact success probability dominates 1 - (m/n)^c", dom, dom ? "ok" : "dominance broken");

    // The theoretical ratio falls toward e / log2(e) from above as c grows.
    const double limit = std::numbers::e / std::numbers::log2e;
    bool ratio_ok = true;
    double prev = 1e9;
    for (std::uint64_t c = 10; c <= 100000 && ratio_ok; c = c * 3 / 2) {
        const ProblemSpec spec{{1000000}, {c}};
        const double r = optc_theoretical_bits(spec) / lower_bound_bits(spec.samples);
        ratio_ok = r < prev && r > limit;
        prev = r;
    }
    add("theoretical ratio decreasing toward e/log2(e)", ratio_ok, "last ratio " + format_real(prev));
    return out;
}

inline std::vector<CheckResult> run_suite(const std::string& name, std::uint64_t seed)
{
    if (name == "seeds") return verify_seeds(seed);
    if (name == "uniformity") return verify_uniformity(seed);
    if (name == "exactness") return verify_exactness(seed);
    if (name == "cost") return verify_cost(seed);
    if (name == "selgen") return verify_selgen();
    if (name == "monotone") return verify_monotone();
    if (name == "all") {
        std::vector<CheckResult> out;
        for (const auto& s : suite_names())
            for (auto& r : run_suite(s, seed)) out.push_back(std::move(r));
        return out;
    }
    throw config_error("unknown verification suite '" + name + "'");
}

inline nlohmann::ordered_json to_json(const std::vector<CheckResult>& results)
{
    nlohmann::ordered_json j;
    bool all = true;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        j["checks"].push_back(
            {{"suite", r.suite}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"metrics", r.metrics}});
    }
    j["passed"] = all;
    return j;
}

} // namespace rfid_sampler::harness
#endif
