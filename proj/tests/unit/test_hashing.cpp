#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "rfid_sampler/hashing.hpp"
#include "rfid_sampler/population.hpp"

using namespace rfid_sampler;

TEST(SubstringHash, Examples)
{
    EXPECT_EQ(substring_hash(TagId{}, SeedSpec{17, 9}), 0U);
    EXPECT_EQ(substring_hash(TagId::all_ones(), SeedSpec{30, 4}), 15U);
    const auto id = TagId{}.with_bits(81, 4, 0b1010);
    EXPECT_EQ(substring_hash(id, SeedSpec{81, 4}), 10U);
    EXPECT_EQ(substring_hash(id, SeedSpec{80, 4}), 0b0101U);
    EXPECT_EQ(substring_hash(TagId::all_ones(), SeedSpec{33, 64}), ~std::uint64_t{0});
}

TEST(HashMod, Examples)
{
    const auto ten = TagId{}.with_bits(81, 4, 10);
    const auto fifteen = TagId{}.with_bits(81, 4, 15);
    EXPECT_EQ(hash_mod(ten, SeedSpec{81, 4}, 1), 0U);
    EXPECT_EQ(hash_mod(ten, SeedSpec{81, 4}, 12), 10U);
    EXPECT_EQ(hash_mod(fifteen, SeedSpec{81, 4}, 12), 3U);
    EXPECT_THROW(hash_mod(ten, SeedSpec{81, 4}, 0), argument_error);
}

TEST(HashMod, AlwaysInRange)
{
    Rng rng(1);
    for (int i = 0; i < 5000; ++i) {
        const auto id = TagId::random(rng);
        const auto m = rng.between(1, 5000);
        const SeedSpec s{static_cast<unsigned>(rng.between(1, 80)), static_cast<unsigned>(rng.between(1, 16))};
        ASSERT_LT(hash_mod(id, s, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(m));
    }
}

TEST(SeedSpec, Validity)
{
    EXPECT_TRUE((SeedSpec{1, 96 - 32}).valid());
    EXPECT_TRUE((SeedSpec{81, 16}).valid());
    EXPECT_FALSE((SeedSpec{82, 16}).valid());
    EXPECT_FALSE((SeedSpec{0, 4}).valid());
    EXPECT_FALSE((SeedSpec{1, 65}).valid());
}

TEST(HashWidth, GuardBitsAndWindowClamp)
{
    EXPECT_EQ(hash_width(1000), ceil_log2(1000) + hash_guard_bits);
    EXPECT_EQ(hash_width(1000, SeedWindow::cots()), 16U);
    EXPECT_EQ(seed_pool_size(16, SeedWindow::cots()), 1U);
    EXPECT_EQ(seed_pool_size(10, SeedWindow::full()), 87U);
    EXPECT_EQ(seed_pool_size(17, SeedWindow::cots()), 0U);
}

// Twelve tags, c = 2: threshold 2 + 3 sqrt 2 = 6.24, suitable range [2, 10.49].
TEST(Suitability, TwelveTagSuitableSeed)
{
    const std::vector<std::uint64_t> hashes{0, 8, 2, 11, 3, 9, 4, 7, 6, 5, 10, 7};
    const auto s = count_selected(hashes, 2);
    EXPECT_EQ(s.selected_count, 6U);
    EXPECT_TRUE(s.suitable);

    // Same values planted in real IDs pick t1, t3, t5, t7, t9, t10.
    std::vector<TagId> ids;
    for (auto h : hashes) ids.push_back(TagId{}.with_bits(1, 12, h));
    const SeedSpec seed{1, 12};
    const auto t = is_suitable(std::span<const TagId>(ids), seed, 2);
    EXPECT_TRUE(t.suitable);
    std::vector<std::size_t> picked;
    for (std::size_t i = 0; i < ids.size(); ++i)
        if (static_cast<double>(hash_mod(ids[i], seed, 12)) <= selection_threshold(2)) picked.push_back(i + 1);
    EXPECT_EQ(picked, (std::vector<std::size_t>{1, 3, 5, 7, 9, 10}));
}

TEST(Suitability, TwelveTagUnsuitableSeed)
{
    const std::vector<std::uint64_t> hashes{11, 6, 3, 4, 3, 5, 6, 1, 1, 0, 2, 2};
    const auto s = count_selected(hashes, 2);
    EXPECT_EQ(s.selected_count, 11U);
    EXPECT_FALSE(s.suitable);
}

TEST(Suitability, FullSelectionEdge)
{
    for (std::uint64_t n : {1, 2, 5, 9, 30}) {
        const auto pop = generate_population({{n, n}}, n);
        const auto s = is_suitable(pop.category(1), SeedSpec{1, hash_width(n)}, n);
        EXPECT_TRUE(s.suitable) << n;
        EXPECT_EQ(s.selected_count, n);
    }
}

TEST(FindSuitableSeed, FoundImpliesSuitableRange)
{
    Rng rng(3);
    for (std::uint64_t n : {10, 50, 200, 1000})
        for (std::uint64_t c : {1, 3, 10}) {
            if (c > n) continue;
            const auto pop = generate_population({{n, c}}, rng.fork_seed());
            const auto [seed, stats] = find_suitable_seed(pop.category(1), c, 100, rng);
            ASSERT_TRUE(stats.found);
            EXPECT_TRUE(seed.valid());
            EXPECT_TRUE(in_suitable_range(stats.selected_count, c));
            EXPECT_EQ(is_suitable(pop.category(1), seed, c).selected_count, stats.selected_count);
        }
}

TEST(FindSuitableSeed, ReportsExhaustion)
{
    // Identical IDs all hash to 0, so every seed selects all 8 tags (> 1 + 6).
    const std::vector<TagId> ids(8, TagId{});
    Rng rng(1);
    const auto [seed, stats] = find_suitable_seed(std::span<const TagId>(ids), 1, 1000, rng);
    EXPECT_FALSE(stats.found);
    EXPECT_EQ(stats.tests, seed_pool_size(hash_width(8), SeedWindow::full()));

    Rng rng2(1);
    const auto capped = find_suitable_seed(std::span<const TagId>(ids), 1, 5, rng2);
    EXPECT_FALSE(capped.second.found);
    EXPECT_EQ(capped.second.tests, 5U);
    EXPECT_THROW(find_suitable_seed(std::span<const TagId>(ids), 1, 0, rng2), argument_error);
}

TEST(FindSuitableSeed, NarrowWindowFallsBackToFullWindow)
{
    // Bits 81..96 are zero, so both COTS-window seeds select all 100 tags.
    Rng rng(5);
    std::vector<TagId> ids;
    for (int i = 0; i < 100; ++i) ids.push_back(TagId::random(rng).with_bits(81, 16, 0));
    const auto [seed, stats] = find_suitable_seed(std::span<const TagId>(ids), 5, 1000, rng, SeedWindow::cots());
    ASSERT_TRUE(stats.found);
    EXPECT_GE(stats.tests, 3U);
    EXPECT_LT(seed.start, 81U);
}

TEST(FindSuitableSeed, NoSeedTestedTwice)
{
    const std::vector<TagId> ids(8, TagId{});
    Rng rng(2);
    const auto [seed, stats] = find_suitable_seed(std::span<const TagId>(ids), 1, 1000, rng, SeedWindow{60, 80});
    // 21-bit window holds 11 seeds of width 11; the full-window fallback adds the other 75.
    EXPECT_FALSE(stats.found);
    EXPECT_EQ(stats.tests, 86U);
}

// n = 16 divides 2^L, so P(h <= 6.24) is exactly 7/16 for random IDs.
TEST(HashMod, PerTagSelectionProbabilityPowerOfTwo)
{
    Rng rng(8);
    const SeedSpec seed{20, hash_width(16)};
    const int draws = 40000;
    int hits = 0;
    for (int i = 0; i < draws; ++i)
        if (static_cast<double>(hash_mod(TagId::random(rng), seed, 16)) <= selection_threshold(2)) ++hits;
    const double p = 7.0 / 16.0;
    EXPECT_NEAR(static_cast<double>(hits) / draws, p, 4 * std::sqrt(p * (1 - p) / draws));
}

// A single random seed on a fresh population is suitable more than 40% of the time.
TEST(Suitability, SingleSeedFractionAboveFortyPercent)
{
    const std::vector<std::pair<std::uint64_t, std::uint64_t>> grid{{100, 1}, {100, 10}, {64, 8}, {500, 50}, {30, 30}};
    for (auto [n, c] : grid) {
        Rng rng(derive_seed(17, {n, c}));
        const int samples = 10000;
        int ok = 0;
        for (int i = 0; i < samples; ++i) {
            const auto ids = draw_unique_ids(n, rng);
            const unsigned L = hash_width(n);
            const SeedSpec seed{static_cast<unsigned>(rng.between(1, 96 - L + 1)), L};
            ok += is_suitable(std::span<const TagId>(ids), seed, c).suitable ? 1 : 0;
        }
        EXPECT_GE(static_cast<double>(ok) / samples, 0.40) << "n=" << n << " c=" << c;
    }
}

TEST(SeedTrials, MeanAndTailBounds)
{
    for (auto [n, c] : std::vector<std::pair<std::uint64_t, std::uint64_t>>{{1000, 1}, {1000, 37}, {300, 50}}) {
        std::size_t total = 0, within_six = 0;
        const std::size_t trials = 500;
        for (std::size_t i = 0; i < trials; ++i) {
            Rng rng(derive_seed(23, {n, c, i}));
            const auto ids = draw_unique_ids(n, rng);
            const auto stats = find_suitable_seed(std::span<const TagId>(ids), c, 1000, rng).second;
            ASSERT_TRUE(stats.found);
            total += stats.tests;
            within_six += stats.tests <= 6 ? 1 : 0;
        }
        EXPECT_LE(static_cast<double>(total) / trials, 2.5);
        EXPECT_GE(static_cast<double>(within_six) / trials, 0.95);
    }
}

TEST(SeedTrials, SingleTrialStatistics)
{
    const auto s = seed_trial_statistics(200, 10, 1, 4);
    EXPECT_EQ(s.trials, 1U);
    EXPECT_DOUBLE_EQ(s.avg_tests, static_cast<double>(s.max_tests));
    EXPECT_EQ(s.failures, 0U);
    const auto again = seed_trial_statistics(200, 10, 1, 4);
    EXPECT_EQ(again.max_tests, s.max_tests);
    EXPECT_THROW(seed_trial_statistics(200, 10, 0, 4), argument_error);
    EXPECT_THROW(seed_trial_statistics(5, 10, 1, 4), argument_error);
}
