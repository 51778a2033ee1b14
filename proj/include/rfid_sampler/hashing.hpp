#ifndef RFID_SAMPLER_HASHING_HPP
#define RFID_SAMPLER_HASHING_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "tag_id.hpp"

namespace rfid_sampler
{

/// ceil(log2(x)) for x >= 1; 0 for x <= 1.
constexpr unsigned ceil_log2(std::uint64_t x) noexcept
{
    return x <= 1 ? 0U : static_cast<unsigned>(std::bit_width(x - 1));
}

/**
 *  Extra substring bits taken beyond ceil(log2(m)) when hashing modulo m.
 *
 *  With exactly ceil(log2(m)) bits the residues below 2^L - m get twice the
 *  weight of the others, and those are precisely the small values a threshold
 *  rule selects. Eight guard bits bound the relative bias by m / 2^(L+8).
 */
inline constexpr unsigned hash_guard_bits = 8;

/// Contiguous range of ID bit positions [first, last] (1-based) that seeds may cover.
struct SeedWindow
{
    unsigned first = 1;
    unsigned last = TagId::bit_count;

    constexpr unsigned width() const noexcept { return last - first + 1; }
    constexpr bool is_full() const noexcept { return first == 1 && last == TagId::bit_count; }
    constexpr bool operator==(const SeedWindow&) const = default;

    static constexpr SeedWindow full() noexcept { return {1, TagId::bit_count}; }
    /// The trailing 16 bits, where COTS EPCs carry their entropy.
    static constexpr SeedWindow cots() noexcept { return {81, TagId::bit_count}; }
};

/// A hash seed: the substring of `length` ID bits starting at bit `start` (1-based).
struct SeedSpec
{
    unsigned start = 1;
    unsigned length = 1;

    constexpr unsigned end() const noexcept { return start + length - 1; }
    constexpr bool valid() const noexcept
    {
        return start >= 1 && length >= 1 && length <= 64 && end() <= TagId::bit_count;
    }
    constexpr bool operator==(const SeedSpec&) const = default;
};

/// Substring width used when hashing into m buckets within `window`.
constexpr unsigned hash_width(std::uint64_t m, SeedWindow window = SeedWindow::full()) noexcept
{
    const unsigned wanted = std::max(1U, ceil_log2(m) + hash_guard_bits);
    return std::min({wanted, window.width(), 64U});
}

/// Number of distinct seeds of width `length` inside `window`.
constexpr unsigned seed_pool_size(unsigned length, SeedWindow window) noexcept
{
    return length > window.width() ? 0U : window.width() - length + 1;
}

inline const TagId& id_of(const TagId& id) noexcept { return id; }
inline const TagId& id_of(const Tag& tag) noexcept { return tag.id; }

/// Value of the seed's substring of `id`, most significant bit first.
constexpr std::uint64_t substring_hash(const TagId& id, SeedSpec seed) noexcept
{
    return id.bits(seed.start, seed.length);
}

inline std::uint64_t hash_mod(const TagId& id, SeedSpec seed, std::uint64_t m)
{
    if (m == 0) throw argument_error("hash modulus must be >= 1");
    return substring_hash(id, seed) % m;
}

/// OPT-C1 threshold c + 3 sqrt(c): a tag is selected when h(t) <= this.
inline double selection_threshold(std::uint64_t c) noexcept
{
    return static_cast<double>(c) + 3.0 * std::sqrt(static_cast<double>(c));
}

/// Upper end c + 6 sqrt(c) of the suitable selected-count range.
inline double suitable_upper_bound(std::uint64_t c) noexcept
{
    return static_cast<double>(c) + 6.0 * std::sqrt(static_cast<double>(c));
}

inline bool in_suitable_range(std::uint64_t selected, std::uint64_t c) noexcept
{
    return selected >= c && static_cast<double>(selected) <= suitable_upper_bound(c);
}

struct Suitability
{
    bool suitable = false;
    std::size_t selected_count = 0;
};

/// Suitability from precomputed hash values h(t) in [0, n_k - 1].
inline Suitability count_selected(std::span<const std::uint64_t> hashes, std::uint64_t c)
{
    const double threshold = selection_threshold(c);
    std::size_t selected = 0;
    for (auto h : hashes)
        if (static_cast<double>(h) <= threshold) ++selected;
    return {in_suitable_range(selected, c), selected};
}

/// Does `seed` move between c and c + 6 sqrt(c) tags of the category into Selected?
template <class T>
Suitability is_suitable(std::span<const T> tags, SeedSpec seed, std::uint64_t c)
{
    const std::uint64_t n = tags.size();
    const double threshold = selection_threshold(c);
    std::size_t selected = 0;
    for (const auto& t : tags)
        if (static_cast<double>(hash_mod(id_of(t), seed, n)) <= threshold) ++selected;
    return {in_suitable_range(selected, c), selected};
}

struct SeedSearchStats
{
    std::size_t tests = 0;
    bool found = false;
    std::size_t selected_count = 0;
};

/**
 *  Draws candidate start positions uniformly without replacement and returns
 *  the first suitable seed.
 *
 *  When `window` is narrower than the full ID and runs dry, the search widens
 *  to the untested seeds of the full 96-bit window before giving up. Failure
 *  is reported through `found`, never thrown.
 */
template <class T>
std::pair<SeedSpec, SeedSearchStats> find_suitable_seed(std::span<const T> tags, std::uint64_t c,
                                                        std::size_t max_tests, Rng& rng,
                                                        SeedWindow window = SeedWindow::full())
{
    if (max_tests == 0) throw argument_error("max_tests must be >= 1");
    const std::uint64_t n = tags.size();

    SeedSearchStats stats;
    SeedSpec last{};
    std::vector<SeedSpec> tried;

    auto search = [&](SeedWindow w) -> bool {
        const unsigned length = hash_width(n, w);
        std::vector<unsigned> pool;
        for (unsigned s = w.first; s + length - 1 <= w.last; ++s) {
            const SeedSpec cand{s, length};
            if (std::find(tried.begin(), tried.end(), cand) == tried.end()) pool.push_back(s);
        }
        // Lazy Fisher-Yates: position i holds the i-th draw.
        for (std::size_t i = 0; i < pool.size() && stats.tests < max_tests; ++i) {
            const auto j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
            std::swap(pool[i], pool[j]);
            last = SeedSpec{pool[i], length};
            tried.push_back(last);
            ++stats.tests;
            const auto check = is_suitable(tags, last, c);
            if (check.suitable) {
                stats.found = true;
                stats.selected_count = check.selected_count;
                return true;
            }
        }
        return false;
    };

    if (!search(window) && !window.is_full() && stats.tests < max_tests) search(SeedWindow::full());
    return {last, stats};
}

struct SeedTrialStats
{
    double avg_tests = 0.0;
    std::size_t max_tests = 0;
    /// Suitable seeds over all seeds tested (successes / tests).
    double suitable_fraction = 0.0;
    /// Fraction of trials whose first seed was already suitable.
    double first_seed_fraction = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
};

/**
 *  Repeats the basic sampling experiment: draw n fresh random IDs, then test
 *  random seeds until one selects between c and c + 6 sqrt(c) tags.
 */
inline SeedTrialStats seed_trial_statistics(std::uint64_t n, std::uint64_t c, std::size_t trials,
                                            std::uint64_t rng_seed, SeedWindow window = SeedWindow::full())
{
    if (trials == 0) throw argument_error("trials must be >= 1");
    if (c < 1 || c > n) throw argument_error("need 1 <= c <= n");

    SeedTrialStats out;
    out.trials = trials;
    std::size_t total_tests = 0;
    std::size_t found = 0;
    std::size_t first_ok = 0;
    for (std::size_t i = 0; i < trials; ++i) {
        Rng rng(derive_seed(rng_seed, {n, c, i}));
        const auto ids = draw_unique_ids(n, rng);
        const auto [seed, stats] =
            find_suitable_seed(std::span<const TagId>(ids), c, std::size_t{1} << 20, rng, window);
        (void)seed;
        total_tests += stats.tests;
        out.max_tests = std::max(out.max_tests, stats.tests);
        if (stats.found) ++found;
        else ++out.failures;
        if (stats.found && stats.tests == 1) ++first_ok;
    }
    out.avg_tests = static_cast<double>(total_tests) / static_cast<double>(trials);
    out.suitable_fraction = static_cast<double>(found) / static_cast<double>(total_tests);
    out.first_seed_fraction = static_cast<double>(first_ok) / static_cast<double>(trials);
    return out;
}

} // namespace rfid_sampler
#endif
