#ifndef RFID_SAMPLER_COST_HPP
#define RFID_SAMPLER_COST_HPP

#include <cmath>
#include <cstdint>

#include "errors.hpp"
#include "rng.hpp"

namespace rfid_sampler
{

/**
 *  Reader-to-tag timing under the C1G2 link model.
 *
 *  The default is 26.7 kbps with a 302 us gap between transmissions, i.e.
 *  T_96 = 3897.5 us for a 96-bit string. T_96 is held in integer picoseconds
 *  so bit counts convert to seconds without accumulated rounding.
 */
struct TimingModel
{
    enum class GapMode : std::uint8_t
    {
        /// f bits cost f * T_96 / 96 (the gap is spread over every bit).
        linear,
        /// f bits over m messages cost f / rate + m * gap.
        per_message,
    };

    double rate_bps = 26700.0;
    double gap_s = 302e-6;
    std::uint64_t t96_ps = 3'897'500'000ULL;
    GapMode mode = GapMode::linear;

    static TimingModel standard() { return {}; }

    /// Timing for a custom rate and gap; T_96 = 96 / rate + gap.
    static TimingModel from_link(double rate_bps, double gap_s)
    {
        if (!(rate_bps > 0.0) || !(gap_s >= 0.0)) throw config_error("timing needs rate > 0 and gap >= 0");
        TimingModel t;
        t.rate_bps = rate_bps;
        t.gap_s = gap_s;
        t.t96_ps = static_cast<std::uint64_t>(std::llround((96.0 / rate_bps + gap_s) * 1e12));
        return t;
    }

    double t96_seconds() const noexcept { return static_cast<double>(t96_ps) * 1e-12; }
};

/// Time to send `bits` reader-to-tag under the linear rule bits * T_96 / 96.
inline double transmission_time(std::uint64_t bits, const TimingModel& timing = TimingModel::standard())
{
    const auto ps = static_cast<u128>(bits) * timing.t96_ps;
    const auto whole = ps / 96;
    const auto rem = ps % 96;
    return (static_cast<double>(whole) + static_cast<double>(rem) / 96.0) / 1e12;
}

/// Reader-to-tag traffic of one protocol run.
struct CostLedger
{
    std::uint64_t bits = 0;
    std::uint64_t select_commands = 0;
    std::uint64_t frames = 0;
    std::uint64_t messages = 0;

    void charge(std::uint64_t n_bits, std::uint64_t n_messages = 1) noexcept
    {
        bits += n_bits;
        messages += n_messages;
    }

    CostLedger& operator+=(const CostLedger& o) noexcept
    {
        bits += o.bits;
        select_commands += o.select_commands;
        frames += o.frames;
        messages += o.messages;
        return *this;
    }

    double seconds(const TimingModel& timing = TimingModel::standard()) const
    {
        if (timing.mode == TimingModel::GapMode::per_message)
            return static_cast<double>(bits) / timing.rate_bps + static_cast<double>(messages) * timing.gap_s;
        return transmission_time(bits, timing);
    }
};

} // namespace rfid_sampler
#endif
