#include <gtest/gtest.h>

#include <bit>
#include <string>
#include <vector>

#include "rfid_sampler/select.hpp"

using namespace rfid_sampler;

namespace
{

std::vector<std::string> filter_strings(std::uint64_t tau, unsigned bits)
{
    std::vector<std::string> out;
    for (const auto& f : selgen_filters(tau, bits)) out.push_back(f.to_string());
    return out;
}

} // namespace

TEST(Selgen, ThresholdFive)
{
    EXPECT_EQ(filter_strings(5, 3), (std::vector<std::string>{"0**", "10*"}));
}

TEST(Selgen, ThresholdSeven)
{
    EXPECT_EQ(filter_strings(7, 3), (std::vector<std::string>{"0**", "1**"}));
}

TEST(Selgen, ThresholdZero)
{
    EXPECT_EQ(filter_strings(0, 3), (std::vector<std::string>{"000"}));
}

TEST(Selgen, MoreShapes)
{
    EXPECT_EQ(filter_strings(4, 3), (std::vector<std::string>{"0**", "100"}));
    EXPECT_EQ(filter_strings(1, 1), (std::vector<std::string>{"0", "1"}));
    EXPECT_EQ(filter_strings(0, 1), (std::vector<std::string>{"0"}));
    EXPECT_EQ(filter_strings(10, 4), (std::vector<std::string>{"0***", "100*", "1010"}));
}

TEST(Selgen, RejectsOutOfRangeThreshold)
{
    EXPECT_THROW(selgen_filters(8, 3), argument_error);
    EXPECT_THROW(selgen_filters(0, 0), argument_error);
    EXPECT_THROW(selgen_filters(0, 65), argument_error);
    EXPECT_NO_THROW(selgen_filters(~std::uint64_t{0}, 64));
}

// Brute force: every value in [0, 2^L) is covered by exactly one filter iff it is <= tau.
TEST(Selgen, ExhaustiveCoverUpToTwelveBits)
{
    for (unsigned L = 1; L <= 12; ++L) {
        const std::uint64_t top = std::uint64_t{1} << L;
        for (std::uint64_t tau = 0; tau < top; ++tau) {
            const auto filters = selgen_filters(tau, L);
            ASSERT_LE(filters.size(), static_cast<std::size_t>(std::popcount(tau)) + 1);
            for (const auto& f : filters) ASSERT_EQ(f.width(), L);
            for (std::uint64_t v = 0; v < top; ++v) {
                int hits = 0;
                for (const auto& f : filters) {
                    // Independent prefix comparison on the text form.
                    const auto text = f.to_string();
                    bool match = true;
                    for (unsigned b = 0; b < L && match; ++b) {
                        const char want = ((v >> (L - 1 - b)) & 1U) ? '1' : '0';
                        if (text[b] != '*' && text[b] != want) match = false;
                    }
                    hits += match ? 1 : 0;
                }
                ASSERT_EQ(hits, v <= tau ? 1 : 0) << "L=" << L << " tau=" << tau << " v=" << v;
            }
        }
    }
}

TEST(Selgen, CommandsCarryPointerAndActions)
{
    const auto cmds = selgen(5, 3, 40);
    ASSERT_EQ(cmds.size(), 2U);
    EXPECT_EQ(cmds[0].action, select_field::assert_deassert);
    EXPECT_EQ(cmds[1].action, select_field::assert_nothing);
    for (const auto& c : cmds) {
        EXPECT_EQ(c.pointer, 40);
        EXPECT_EQ(c.membank, select_field::membank_epc);
        EXPECT_EQ(c.target, select_field::target_sl);
    }
    EXPECT_EQ(cmds[0].mask.to_string(), "0");
    EXPECT_EQ(cmds[1].mask.to_string(), "10");
}

TEST(Selgen, SelectReplayMatchesThreshold)
{
    Rng rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const auto L = static_cast<unsigned>(rng.between(1, 16));
        const auto pointer = static_cast<std::uint16_t>(rng.between(0, 96 - L));
        const auto tau = rng.below(std::uint64_t{1} << L);
        std::vector<TagId> ids;
        for (int i = 0; i < 64; ++i) ids.push_back(TagId::random(rng));
        const auto sl = run_selects(selgen(tau, L, pointer), ids);
        for (std::size_t i = 0; i < ids.size(); ++i)
            ASSERT_EQ(sl[i], ids[i].bits(pointer + 1U, L) <= tau);
    }
}

TEST(NaiveThreshold, OneCommandPerValue)
{
    EXPECT_EQ(naive_threshold_commands(5, 3, 0).size(), 6U);
    EXPECT_EQ(selgen(5, 3, 0).size(), 2U);
    EXPECT_EQ(command_cost(naive_threshold_commands(0, 3, 0)), command_cost(selgen(0, 3, 0)));
    for (std::uint64_t tau = 0; tau < 16; ++tau) EXPECT_EQ(naive_threshold_commands(tau, 4, 7).size(), tau + 1);
}

TEST(SelectCommand, Cost)
{
    EXPECT_EQ(command_cost({}), 0U);
    SelectCommand a;
    a.mask = BitString::parse("1010");
    EXPECT_EQ(command_cost(std::vector<SelectCommand>{a}), 36U);
    SelectCommand b, c;
    b.mask = BitString::parse("1");
    c.mask = BitString::parse("011");
    EXPECT_EQ(command_cost(std::vector<SelectCommand>{b, c}), 68U);
}

TEST(SelectCommand, EncodingLayout)
{
    SelectCommand c;
    c.action = 1;
    c.pointer = 80;
    c.mask = BitString::parse("101");
    const auto bits = c.encode().to_string();
    EXPECT_EQ(bits, std::string("100") + "001" + "01" + "0000000001010000" + "00000011" + "101");
    EXPECT_EQ(bits.size(), select_fixed_bits + 3);
}

TEST(SelectCommand, Validation)
{
    SelectCommand c;
    c.pointer = 90;
    c.mask = BitString::from_value(0, 7);
    EXPECT_THROW(c.validate(), argument_error);
    c.mask = BitString::from_value(0, 6);
    EXPECT_NO_THROW(c.validate());
    c.action = 8;
    EXPECT_THROW(c.validate(), argument_error);
    EXPECT_THROW(BitString::parse("10x"), argument_error);
}

TEST(SelectMatches, Examples)
{
    const auto id = TagId{}.with_bits(41, 3, 0b101);
    SelectCommand empty;
    empty.pointer = 13;
    EXPECT_TRUE(select_matches(empty, id));
    EXPECT_TRUE(select_matches(empty, TagId::all_ones()));

    SelectCommand ten;
    ten.pointer = 40;
    ten.mask = BitString::parse("10");
    EXPECT_TRUE(select_matches(ten, id));

    SelectCommand eleven;
    eleven.pointer = 40;
    eleven.mask = BitString::parse("11");
    EXPECT_FALSE(select_matches(eleven, id));

    SelectCommand other_bank = ten;
    other_bank.membank = 3;
    EXPECT_FALSE(select_matches(other_bank, id));
}

TEST(SelectActions, SlTable)
{
    // (matched, sl) -> new sl for actions 0..7
    const bool table[8][4] = {
        // m=1 sl=0, m=1 sl=1, m=0 sl=0, m=0 sl=1
        {true, true, false, false},  {true, true, false, true},   {false, true, false, false},
        {true, false, false, true},  {false, false, true, true},  {false, false, false, true},
        {false, true, true, true},   {false, true, true, false},
    };
    for (std::uint8_t a = 0; a < 8; ++a) {
        EXPECT_EQ(apply_action(a, true, false), table[a][0]) << int{a};
        EXPECT_EQ(apply_action(a, true, true), table[a][1]) << int{a};
        EXPECT_EQ(apply_action(a, false, false), table[a][2]) << int{a};
        EXPECT_EQ(apply_action(a, false, true), table[a][3]) << int{a};
    }
}

TEST(BitString, RoundTrip)
{
    auto b = BitString::from_value(0b1101, 4);
    EXPECT_EQ(b.to_string(), "1101");
    b.append(0b01, 2);
    EXPECT_EQ(b.to_string(), "110101");
    EXPECT_EQ(b.value(), 0b110101U);
    EXPECT_EQ(BitString::parse("110101"), b);
}
