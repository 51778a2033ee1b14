#ifndef RFID_SAMPLER_TAG_ID_HPP
#define RFID_SAMPLER_TAG_ID_HPP

#include <compare>
#include <cstdint>
#include <string>

#include "rng.hpp"

namespace rfid_sampler
{

/**
 *  A 96-bit tag ID (EPC).
 *
 *  Bits are numbered 1..96 from the most significant end, so bit 1 is the
 *  first bit a reader sees and bit 96 the last. `high` holds bits 1..32 and
 *  `low` holds bits 33..96.
 */
struct TagId
{
    static constexpr unsigned bit_count = 96;

    std::uint32_t high = 0;
    std::uint64_t low = 0;

    constexpr auto operator<=>(const TagId&) const = default;

    static TagId random(Rng& rng)
    {
        const std::uint64_t a = rng.next_u64();
        const std::uint64_t b = rng.next_u64();
        return TagId{static_cast<std::uint32_t>(a >> 32), b};
    }

    static constexpr TagId all_ones() noexcept { return TagId{~std::uint32_t{0}, ~std::uint64_t{0}}; }

    constexpr u128 value() const noexcept
    {
        return (static_cast<u128>(high) << 64) | low;
    }

    static constexpr TagId from_value(u128 v) noexcept
    {
        return TagId{static_cast<std::uint32_t>(v >> 64), static_cast<std::uint64_t>(v)};
    }

    /// Bit at 1-based position `pos` (1 = most significant).
    constexpr bool bit(unsigned pos) const noexcept { return ((value() >> (bit_count - pos)) & 1U) != 0; }

    /// Unsigned value of bits [start, start + length - 1], most significant first.
    /// Requires 1 <= start, length <= 64 and start + length - 1 <= 96.
    constexpr std::uint64_t bits(unsigned start, unsigned length) const noexcept
    {
        if (length == 0) return 0;
        const unsigned shift = bit_count - (start + length - 1);
        const auto v = value() >> shift;
        const std::uint64_t mask = length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
        return static_cast<std::uint64_t>(v) & mask;
    }

    /// Copy with bits [start, start + length - 1] replaced by `v`.
    constexpr TagId with_bits(unsigned start, unsigned length, std::uint64_t v) const noexcept
    {
        if (length == 0) return *this;
        const unsigned shift = bit_count - (start + length - 1);
        const u128 field =
            length >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << length) - 1);
        const u128 cleared = value() & ~(field << shift);
        return from_value(cleared | ((static_cast<u128>(v) & field) << shift));
    }

    /// 24 hex digits.
    std::string to_hex() const
    {
        static constexpr char digits[] = "0123456789abcdef";
        std::string out(24, '0');
        auto v = value();
        for (int i = 23; i >= 0; --i) {
            out[static_cast<std::size_t>(i)] = digits[static_cast<unsigned>(v & 0xF)];
            v >>= 4;
        }
        return out;
    }
};

struct TagIdHash
{
    std::size_t operator()(const TagId& id) const noexcept
    {
        return static_cast<std::size_t>(splitmix64(id.low ^ splitmix64(id.high)));
    }
};

} // namespace rfid_sampler
#endif
