#ifndef RFID_SAMPLER_SELECT_HPP
#define RFID_SAMPLER_SELECT_HPP

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "tag_id.hpp"

namespace rfid_sampler
{

/// Variable-length bit string, most significant (first transmitted) bit at index 0.
class BitString
{
public:
    BitString() = default;

    static BitString from_value(std::uint64_t value, unsigned length)
    {
        BitString b;
        b.bits_.resize(length);
        for (unsigned i = 0; i < length; ++i) b.bits_[i] = ((value >> (length - 1 - i)) & 1U) != 0;
        return b;
    }

    static BitString parse(std::string_view text)
    {
        BitString b;
        for (char ch : text) {
            if (ch != '0' && ch != '1') throw argument_error("bit string may only hold 0 and 1");
            b.bits_.push_back(ch == '1');
        }
        return b;
    }

    std::size_t size() const noexcept { return bits_.size(); }
    bool empty() const noexcept { return bits_.empty(); }
    bool operator[](std::size_t i) const noexcept { return bits_[i]; }
    void push_back(bool b) { bits_.push_back(b); }

    void append(std::uint64_t value, unsigned length)
    {
        for (unsigned i = 0; i < length; ++i) bits_.push_back(((value >> (length - 1 - i)) & 1U) != 0);
    }

    void append(const BitString& other) { bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end()); }

    /// Value of the first min(size, 64) bits.
    std::uint64_t value() const noexcept
    {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < bits_.size() && i < 64; ++i) v = (v << 1) | (bits_[i] ? 1U : 0U);
        return v;
    }

    std::string to_string() const
    {
        std::string s;
        for (bool b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

    bool operator==(const BitString&) const = default;

private:
    std::vector<bool> bits_;
};

namespace select_field
{
inline constexpr std::uint8_t target_sl = 0b100;
inline constexpr std::uint8_t membank_epc = 1;
// SL actions, matching / non-matching.
inline constexpr std::uint8_t assert_deassert = 0;
inline constexpr std::uint8_t assert_nothing = 1;
} // namespace select_field

/// Widths of the canonical encoding Target | Action | MemBank | Pointer | Length | Mask.
inline constexpr unsigned select_fixed_bits = 3 + 3 + 2 + 16 + 8;

/**
 *  A C1G2 Select command with its six mandatory fields.
 *
 *  `pointer` is the 0-based bit offset of the first compared bit inside the
 *  bank, so for the EPC bank ID bit A[i] sits at pointer i - 1. Length is
 *  mask.size().
 */
struct SelectCommand
{
    std::uint8_t target = select_field::target_sl;
    std::uint8_t action = select_field::assert_deassert;
    std::uint8_t membank = select_field::membank_epc;
    std::uint16_t pointer = 0;
    BitString mask;

    unsigned length() const noexcept { return static_cast<unsigned>(mask.size()); }

    void validate() const
    {
        if (target > 7 || action > 7 || membank > 3) throw argument_error("select field out of range");
        if (mask.size() > 255) throw argument_error("select mask longer than 255 bits");
        if (membank == select_field::membank_epc && pointer + mask.size() > TagId::bit_count)
            throw argument_error("select mask runs past the 96-bit EPC");
    }

    /// Target(3) | Action(3) | MemBank(2) | Pointer(16) | Length(8) | Mask, MSB first.
    BitString encode() const
    {
        validate();
        BitString out;
        out.append(target, 3);
        out.append(action, 3);
        out.append(membank, 2);
        out.append(pointer, 16);
        out.append(length(), 8);
        out.append(mask);
        return out;
    }

    bool operator==(const SelectCommand&) const = default;
};

/// Encoded size in bits of a command list.
inline std::uint64_t command_cost(std::span<const SelectCommand> cmds) noexcept
{
    std::uint64_t total = 0;
    for (const auto& c : cmds) total += select_fixed_bits + c.length();
    return total;
}

/// Does the EPC segment [pointer, pointer + length) of `id` equal the mask?
inline bool select_matches(const SelectCommand& cmd, const TagId& id)
{
    cmd.validate();
    if (cmd.membank != select_field::membank_epc) return false;
    for (std::size_t i = 0; i < cmd.mask.size(); ++i)
        if (id.bit(static_cast<unsigned>(cmd.pointer + i + 1)) != cmd.mask[i]) return false;
    return true;
}

/// SL flag after one Select, per the C1G2 action table.
inline bool apply_action(std::uint8_t action, bool matched, bool sl) noexcept
{
    switch (action) {
    case 0: return matched;
    case 1: return matched ? true : sl;
    case 2: return matched ? sl : false;
    case 3: return matched ? !sl : sl;
    case 4: return !matched;
    case 5: return matched ? false : sl;
    case 6: return matched ? sl : true;
    case 7: return matched ? sl : !sl;
    }
    return sl;
}

/// Final SL flags after running `cmds` in order over `ids` (all flags start deasserted).
inline std::vector<bool> run_selects(std::span<const SelectCommand> cmds, std::span<const TagId> ids)
{
    std::vector<bool> sl(ids.size(), false);
    for (const auto& cmd : cmds)
        for (std::size_t i = 0; i < ids.size(); ++i) sl[i] = apply_action(cmd.action, select_matches(cmd, ids[i]), sl[i]);
    return sl;
}

/// A hash-value filter "p_1 ... p_j * ... *": fixed prefix followed by wildcards.
struct FilterString
{
    BitString prefix;
    unsigned wildcards = 0;

    unsigned width() const noexcept { return static_cast<unsigned>(prefix.size()) + wildcards; }

    /// Matches the L-bit value `v` (L = width())?
    bool matches(std::uint64_t v) const noexcept { return (v >> wildcards) == prefix.value(); }

    std::string to_string() const { return prefix.to_string() + std::string(wildcards, '*'); }

    /// The Select carrying this filter over a hash window starting at EPC offset `pointer`.
    SelectCommand to_command(std::uint16_t pointer, std::uint8_t action = select_field::assert_deassert) const
    {
        SelectCommand c;
        c.action = action;
        c.pointer = pointer;
        c.mask = prefix;
        return c;
    }

    bool operator==(const FilterString&) const = default;
};

/**
 *  Prefix cover of the hash values {0, ..., tau} over L-bit values.
 *
 *  Walks tau from its top bit: every 1-bit emits "higher bits, 0, wildcards";
 *  once the remaining bits are all 1 (or the last bit is reached) one closing
 *  filter "higher bits, tau_i, wildcards" ends the walk. The filters are
 *  disjoint and number at most popcount(tau) + 1.
 */
inline std::vector<FilterString> selgen_filters(std::uint64_t tau, unsigned bits)
{
    if (bits < 1 || bits > 64) throw argument_error("hash width must be in [1, 64]");
    if (bits < 64 && tau >= (std::uint64_t{1} << bits))
        throw argument_error("threshold " + std::to_string(tau) + " needs more than " + std::to_string(bits) + " bits");

    auto bit = [&](unsigned i) { return ((tau >> (i - 1)) & 1U) != 0; }; // tau_i, 1-based
    auto low_ones = [&](unsigned i) {
        // tau_{i-1} .. tau_1 all 1
        for (unsigned j = 1; j < i; ++j)
            if (!bit(j)) return false;
        return true;
    };

    std::vector<FilterString> out;
    for (unsigned i = bits; i >= 1; --i) {
        const std::uint64_t higher = i >= 64 ? 0 : tau >> i;
        const unsigned higher_len = bits - i;
        if (bit(i)) {
            FilterString f;
            f.prefix = BitString::from_value(higher, higher_len);
            f.prefix.push_back(false);
            f.wildcards = i - 1;
            out.push_back(std::move(f));
        }
        if (i == 1 || low_ones(i)) {
            FilterString f;
            f.prefix = BitString::from_value(higher, higher_len);
            f.prefix.push_back(bit(i));
            f.wildcards = i - 1;
            out.push_back(std::move(f));
            break;
        }
    }
    return out;
}

/**
 *  Select commands choosing every tag whose L-bit hash window at EPC offset
 *  `pointer` holds a value <= tau. The first command resets SL for the rest;
 *  later ones only add matches, so the result is the union of the filters.
 */
inline std::vector<SelectCommand> selgen(std::uint64_t tau, unsigned bits, std::uint16_t pointer)
{
    std::vector<SelectCommand> cmds;
    for (const auto& f : selgen_filters(tau, bits))
        cmds.push_back(f.to_command(pointer, cmds.empty() ? select_field::assert_deassert : select_field::assert_nothing));
    for (const auto& c : cmds) c.validate();
    return cmds;
}

/// One exact-match Select per value 0..tau.
inline std::vector<SelectCommand> naive_threshold_commands(std::uint64_t tau, unsigned bits, std::uint16_t pointer)
{
    if (bits < 1 || bits > 64) throw argument_error("hash width must be in [1, 64]");
    if (bits < 64 && tau >= (std::uint64_t{1} << bits)) throw argument_error("threshold exceeds hash width");
    std::vector<SelectCommand> cmds;
    for (std::uint64_t v = 0; v <= tau; ++v) {
        SelectCommand c;
        c.action = cmds.empty() ? select_field::assert_deassert : select_field::assert_nothing;
        c.pointer = pointer;
        c.mask = BitString::from_value(v, bits);
        c.validate();
        cmds.push_back(std::move(c));
    }
    return cmds;
}

} // namespace rfid_sampler
#endif
