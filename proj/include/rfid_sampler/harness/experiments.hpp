#ifndef RFID_SAMPLER_HARNESS_EXPERIMENTS_HPP
#define RFID_SAMPLER_HARNESS_EXPERIMENTS_HPP

// Monte-Carlo measurements behind the verification suites. Each function
// only measures; pass/fail thresholds belong to the caller.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "../analysis.hpp"
#include "../baselines.hpp"
#include "../hashing.hpp"
#include "../optc.hpp"
#include "../optc_impl.hpp"
#include "../population.hpp"
#include "results.hpp"
#include "scenario.hpp"

namespace rfid_sampler::harness
{

struct ExactnessStats
{
    std::size_t rounds = 0;
    std::size_t violations = 0;
    std::string first_violation;
};

/// Does the category hold exactly the `ready` tags in Ready state, orders 1..c, everyone else Unselected?
inline bool category_is_exact(std::span<const Tag> tags, std::span<const ReadyTag> ready, std::size_t c)
{
    if (!orders_are_permutation(ready, c)) return false;
    std::size_t in_ready = 0;
    for (const auto& t : tags) {
        if (t.state == TagState::ready) {
            ++in_ready;
            const auto it = std::find_if(ready.begin(), ready.end(), [&](const ReadyTag& r) { return r.id == t.id; });
            if (it == ready.end() || it->order != t.cnt) return false;
        } else if (t.state != TagState::unselected) {
            return false;
        }
    }
    return in_ready == c;
}

/**
 *  Single-category rounds with n drawn from [2, max_n] and c from
 *  [1, min(n, max_c)]. Any protocol error counts as a violation.
 */
inline ExactnessStats exactness_sweep(Protocol protocol, std::size_t rounds, std::uint64_t seed,
                                      std::uint64_t max_n = 1000, std::uint64_t max_c = 100)
{
    ExactnessStats out;
    out.rounds = rounds;
    for (std::size_t i = 0; i < rounds; ++i) {
        Rng rng(derive_seed(seed, {i}));
        const auto n = static_cast<std::uint64_t>(rng.between(2, static_cast<std::int64_t>(max_n)));
        const auto c = static_cast<std::uint64_t>(rng.between(1, static_cast<std::int64_t>(std::min(n, max_c))));
        auto pop = generate_population({CategorySize{n, c}}, rng.fork_seed());
        bool ok = false;
        std::string why;
        try {
            std::vector<ReadyTag> ready;
            switch (protocol) {
            case Protocol::optc: ready = run_optc(pop, TimingModel::standard(), rng).rounds[0].ready; break;
            case Protocol::optc_impl: ready = run_optc_impl(pop, rng, TimingModel::standard()).categories[0].ready; break;
            case Protocol::random_select: ready = run_random_select(pop, rng, TimingModel::standard()).sampled[0]; break;
            case Protocol::naive_threshold:
                ready = run_naive_threshold(pop, rng, TimingModel::standard()).sampled[0];
                break;
            }
            ok = category_is_exact(pop.category(1), ready, c);
            if (!ok) why = "wrong ready set";
        } catch (const std::exception& e) {
            why = e.what();
        }
        if (!ok) {
            if (out.violations == 0)
                out.first_violation = "round " + std::to_string(i) + " (n = " + std::to_string(n) +
                                      ", c = " + std::to_string(c) + "): " + why;
            ++out.violations;
        }
    }
    return out;
}

/// Colex rank of a sorted c-subset of {0, ..., n-1}.
inline std::uint64_t subset_rank(std::span<const std::size_t> sorted)
{
    auto choose = [](std::uint64_t a, std::uint64_t b) -> std::uint64_t {
        if (b > a) return 0;
        std::uint64_t r = 1;
        for (std::uint64_t i = 1; i <= b; ++i) r = r * (a - b + i) / i;
        return r;
    };
    std::uint64_t rank = 0;
    for (std::size_t i = 0; i < sorted.size(); ++i) rank += choose(sorted[i], i + 1);
    return rank;
}

struct UniformityStats
{
    std::uint64_t n = 0, c = 0, trials = 0;
    std::vector<std::uint64_t> subset_counts; ///< indexed by subset_rank
    std::vector<std::uint64_t> inclusion;     ///< per tag position
    double chi_square = 0.0;
    double p_value = 0.0;
    double max_inclusion_z = 0.0; ///< largest |freq - c/n| in standard errors
};

/**
 *  Runs `protocol` on fresh single-category populations and tallies which
 *  c-subset of tag positions (by ascending ID) ends up Ready.
 */
inline UniformityStats subset_uniformity(Protocol protocol, std::uint64_t n, std::uint64_t c, std::size_t trials,
                                         std::uint64_t seed)
{
    UniformityStats out;
    out.n = n;
    out.c = c;
    out.trials = trials;
    std::uint64_t subsets = 1;
    for (std::uint64_t i = 1; i <= c; ++i) subsets = subsets * (n - c + i) / i;
    out.subset_counts.assign(subsets, 0);
    out.inclusion.assign(n, 0);

    std::vector<std::size_t> picked;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, {t}));
        auto pop = generate_population({CategorySize{n, c}}, rng.fork_seed());
        run_protocol(protocol, pop, rng, TimingModel::standard(), ImplThreshold::scaled);
        picked.clear();
        const auto tags = pop.category(1);
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i].state == TagState::ready) picked.push_back(i);
        if (picked.size() != c) throw std::logic_error("uniformity run produced a wrong sample size");
        ++out.subset_counts[subset_rank(picked)];
        for (auto i : picked) ++out.inclusion[i];
    }

    const double expected = static_cast<double>(trials) / static_cast<double>(subsets);
    for (auto k : out.subset_counts) out.chi_square += (static_cast<double>(k) - expected) * (static_cast<double>(k) - expected) / expected;
    if (subsets > 1) {
        const boost::math::chi_squared dist(static_cast<double>(subsets - 1));
        out.p_value = boost::math::cdf(boost::math::complement(dist, out.chi_square));
    } else {
        out.p_value = 1.0;
    }
    const double p = static_cast<double>(c) / static_cast<double>(n);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    for (auto k : out.inclusion) {
        const double z = se > 0 ? std::abs(static_cast<double>(k) / static_cast<double>(trials) - p) / se : 0.0;
        out.max_inclusion_z = std::max(out.max_inclusion_z, z);
    }
    return out;
}

struct SeedGridPoint
{
    std::uint64_t n = 0, c = 0;
    SeedTrialStats stats;
};

struct SeedGridStats
{
    std::vector<SeedGridPoint> points;
    double min_suitable_fraction = 1.0;
    double max_avg_tests = 0.0;
    std::size_t max_tests = 0;
    std::size_t failures = 0;
};

/// The two seed-search grids: n = 1000 with c = 1..100, and c = 50 with n = 100, 120, ..., 1000.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> seed_grid_points()
{
    std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
    for (std::uint64_t c = 1; c <= 100; ++c) out.emplace_back(1000, c);
    for (std::uint64_t n = 100; n <= 1000; n += 20) out.emplace_back(n, 50);
    return out;
}

inline SeedGridStats seed_grid(const std::vector<std::pair<std::uint64_t, std::uint64_t>>& grid, std::size_t trials,
                               std::uint64_t seed)
{
    SeedGridStats out;
    for (auto [n, c] : grid) {
        SeedGridPoint p{n, c, seed_trial_statistics(n, c, trials, seed)};
        out.min_suitable_fraction = std::min(out.min_suitable_fraction, p.stats.suitable_fraction);
        out.max_avg_tests = std::max(out.max_avg_tests, p.stats.avg_tests);
        out.max_tests = std::max(out.max_tests, p.stats.max_tests);
        out.failures += p.stats.failures;
        out.points.push_back(p);
    }
    return out;
}

struct RefinedCostStats
{
    std::uint64_t c = 0;
    std::size_t trials = 0;
    double mean_bits = 0.0;       ///< headers + frames + stop bit
    double mean_frame_bits = 0.0; ///< frames only
    double mean_iterations = 0.0;
    double ratio_to_ec = 0.0;     ///< mean_bits / (e c)
};

/// Refined stage alone on l Selected tags, l uniform over the suitable range [c, c + 6 sqrt c].
inline RefinedCostStats refined_cost(std::uint64_t c, std::size_t trials, std::uint64_t seed)
{
    RefinedCostStats out;
    out.c = c;
    out.trials = trials;
    const auto l_max = static_cast<std::int64_t>(std::floor(suitable_upper_bound(c)));
    double bits = 0, frame_bits = 0, iterations = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(derive_seed(seed, {c, t}));
        const auto l = static_cast<std::uint64_t>(rng.between(static_cast<std::int64_t>(c), l_max));
        auto pop = generate_population({CategorySize{l, c}}, rng.fork_seed());
        auto tags = pop.category(1);
        for (auto& tag : tags) tag.transition(TagState::selected);
        const auto r = optc2_round(tags, c, rng);
        bits += static_cast<double>(r.refined_bits);
        frame_bits += static_cast<double>(r.frame_bits);
        iterations += static_cast<double>(r.iterations);
    }
    out.mean_bits = bits / static_cast<double>(trials);
    out.mean_frame_bits = frame_bits / static_cast<double>(trials);
    out.mean_iterations = iterations / static_cast<double>(trials);
    out.ratio_to_ec = out.mean_bits / (std::numbers::e * static_cast<double>(c));
    return out;
}

struct RatioPoint
{
    std::size_t K = 0;
    std::uint64_t n = 0, c = 0;
    double mean_ratio = 0.0;
    double theoretical_ratio = 0.0; ///< optc_theoretical_bits / lower_bound_bits
};

/// Mean OPT-C time over T_lb for K equal categories of n tags and c samples.
inline std::vector<RatioPoint> ratio_sweep(const std::vector<std::size_t>& ks, std::uint64_t n, std::uint64_t c,
                                           std::size_t trials, std::uint64_t seed)
{
    std::vector<RatioPoint> out;
    for (auto K : ks) {
        const std::vector<CategorySize> sizes(K, CategorySize{n, c});
        const ProblemSpec spec{std::vector<std::uint64_t>(K, n), std::vector<std::uint64_t>(K, c)};
        const double lb = lower_bound_time(spec.samples);
        double total = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            auto pop = generate_population(sizes, derive_seed(seed, {K, n, c, t, 0}));
            Rng rng(derive_seed(seed, {K, n, c, t, 1}));
            total += run_optc(pop, TimingModel::standard(), rng).seconds / lb;
        }
        out.push_back(RatioPoint{K, n, c, total / static_cast<double>(trials),
                                 optc_theoretical_bits(spec) / lower_bound_bits(spec.samples)});
    }
    return out;
}

/// Select budget sum_k (3 ceil(log2 c_k) + 3).
inline std::uint64_t command_budget(std::span<const std::uint64_t> samples)
{
    std::uint64_t total = 0;
    for (auto c : samples) total += 3ULL * ceil_log2(c) + 3;
    return total;
}

struct BudgetStats
{
    std::size_t trials = 0;
    std::size_t budget_violations = 0;
    std::size_t cheaper_than_random = 0; ///< trials where OPT-C_IMPL sent fewer bits
    double mean_time_fraction = 0.0;      ///< mean of impl seconds / random-select seconds
    std::string first_violation;
};

/// Every point of the real-1..3 presets: OPT-C_IMPL against RandomSelect on the same population.
inline BudgetStats command_budget_check(std::size_t trials_per_point, std::uint64_t seed)
{
    BudgetStats out;
    double fraction = 0;
    std::uint64_t s = 0;
    for (const char* name : {"real-1", "real-2", "real-3"}) {
        const auto cfg = preset_config(name);
        for (const auto& sc : cfg.scenarios) {
            const auto points = sc.points();
            for (std::size_t pi = 0; pi < points.size(); ++pi, ++s) {
                const auto& pt = points[pi];
                std::vector<CategorySize> sizes;
                for (std::size_t k = 0; k < pt.k(); ++k) sizes.push_back(CategorySize{pt.sizes[k], pt.samples[k]});
                const auto budget = command_budget(pt.samples);
                for (std::size_t t = 0; t < trials_per_point; ++t) {
                    auto pop = generate_population(sizes, derive_seed(seed, {s, t, 0}));
                    Rng rng(derive_seed(seed, {s, t, 1}));
                    const auto impl = run_optc_impl(pop, rng, TimingModel::standard());
                    pop.reset_states();
                    const auto rs = run_random_select(pop, rng, TimingModel::standard());

                    ++out.trials;
                    if (impl.ledger.select_commands > budget) {
                        if (out.budget_violations == 0)
                            out.first_violation = std::string(name) + " K = " + std::to_string(pt.k()) + " sum_c = " +
                                                  std::to_string(std::accumulate(pt.samples.begin(), pt.samples.end(),
                                                                                 std::uint64_t{0})) +
                                                  ": " + std::to_string(impl.ledger.select_commands) + " commands > " +
                                                  std::to_string(budget);
                        ++out.budget_violations;
                    }
                    if (impl.ledger.bits < rs.ledger.bits) ++out.cheaper_than_random;
                    fraction += impl.seconds / rs.seconds;
                }
            }
        }
    }
    out.mean_time_fraction = fraction / static_cast<double>(out.trials);
    return out;
}

} // namespace rfid_sampler::harness
#endif
