#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rfid_sampler/baselines.hpp"
#include "rfid_sampler/optc.hpp"

using namespace rfid_sampler;

namespace
{

bool orders_ok(const BaselineReport& r, const Population& pop)
{
    for (std::size_t k = 1; k <= pop.category_count(); ++k)
        if (!orders_are_permutation(r.sampled[k - 1], pop.spec(k).sample)) return false;
    return true;
}

} // namespace

TEST(RandomSelect, OneFullMaskCommandPerSample)
{
    auto pop = generate_population({{30, 4}, {10, 10}, {100, 7}}, 1);
    Rng rng(1);
    const auto r = run_random_select(pop, rng, TimingModel::standard());
    EXPECT_EQ(r.ledger.select_commands, 21U);
    EXPECT_EQ(r.ledger.bits, 21U * (select_fixed_bits + 96));
    EXPECT_TRUE(orders_ok(r, pop));
    for (std::size_t k = 1; k <= 3; ++k) {
        std::size_t ready = 0;
        for (const auto& t : pop.category(k)) {
            if (t.state == TagState::ready) ++ready;
            else EXPECT_EQ(t.state, TagState::unselected);
        }
        EXPECT_EQ(ready, pop.spec(k).sample);
    }
}

TEST(RandomSelect, InclusionProbabilityIsCOverN)
{
    const std::uint64_t n = 10, c = 3;
    const int trials = 30000;
    std::vector<int> hits(n, 0);
    for (int t = 0; t < trials; ++t) {
        auto pop = generate_population({{n, c}}, derive_seed(1, {static_cast<std::uint64_t>(t)}));
        Rng rng(derive_seed(2, {static_cast<std::uint64_t>(t)}));
        run_random_select(pop, rng, TimingModel::standard());
        for (std::size_t i = 0; i < n; ++i) hits[i] += pop.category(1)[i].state == TagState::ready ? 1 : 0;
    }
    const double p = 0.3, se = std::sqrt(p * (1 - p) / trials);
    for (int h : hits) EXPECT_NEAR(static_cast<double>(h) / trials, p, 4 * se);
}

TEST(NaiveThreshold, SameSampleAsSelgenPlanner)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto a = generate_population({{25, 3}, {18, 5}}, seed);
        auto b = a;
        Rng ra(seed), rb(seed);
        const auto impl = run_optc_impl(a, ra, TimingModel::standard());
        const auto naive = run_naive_threshold(b, rb, TimingModel::standard());
        EXPECT_EQ(naive.protocol, "naive-threshold");
        EXPECT_TRUE(orders_ok(naive, b));
        for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(naive.sampled[k], impl.categories[k].ready);
        EXPECT_GE(naive.ledger.select_commands, impl.ledger.select_commands);
    }
}

TEST(Baselines, RandomSelectCostsMoreThanOptc)
{
    Rng pick(3);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<CategorySize> sizes;
        const auto K = pick.between(1, 8);
        for (int k = 0; k < K; ++k) {
            const auto n = static_cast<std::uint64_t>(pick.between(2, 200));
            sizes.push_back({n, static_cast<std::uint64_t>(pick.between(2, static_cast<std::int64_t>(std::min<std::uint64_t>(n, 50))))});
        }
        const auto seed = pick.fork_seed();
        auto pop = generate_population(sizes, seed);
        Rng r1(seed + 1), r2(seed + 2), r3(seed + 3);
        const auto optc = run_optc(pop, TimingModel::standard(), r1);
        pop.reset_states();
        const auto impl = run_optc_impl(pop, r2, TimingModel::standard());
        pop.reset_states();
        const auto rs = run_random_select(pop, r3, TimingModel::standard());
        EXPECT_GT(rs.ledger.bits, optc.ledger.bits);
        EXPECT_GT(rs.ledger.bits, impl.ledger.bits);
    }
}
