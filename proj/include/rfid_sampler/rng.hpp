#ifndef RFID_SAMPLER_RNG_HPP
#define RFID_SAMPLER_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rfid_sampler
{

__extension__ typedef unsigned __int128 u128;

/// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive a child seed from a root seed and a path of counters.
///
/// The derivation is a pure function of its inputs, so trial `i` of point `j`
/// gets the same stream whether trials run sequentially or in parallel.
inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t s = splitmix64(root);
    for (auto p : path) s = splitmix64(s ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    return s;
}

/**
 *  Deterministic random source.
 *
 *  Wraps std::mt19937_64, whose output sequence is fixed by the standard.
 *  Bounded integers and doubles are produced here rather than through the
 *  <random> distributions, whose algorithms are implementation-defined, so
 *  results are reproducible across standard libraries.
 */
class Rng
{
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() { return engine_(); }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, bound). `bound` must be non-zero.
    std::uint64_t below(std::uint64_t bound)
    {
        // Lemire's multiply-and-reject.
        std::uint64_t x = engine_();
        u128 m = static_cast<u128>(x) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                x = engine_();
                m = static_cast<u128>(x) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Uniform integer in [lo, hi], inclusive.
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Seed for an independent child stream.
    std::uint64_t fork_seed() { return splitmix64(engine_()); }

private:
    std::mt19937_64 engine_;
};

} // namespace rfid_sampler
#endif
