#ifndef RFID_SAMPLER_OPTC_HPP
#define RFID_SAMPLER_OPTC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cost.hpp"
#include "errors.hpp"
#include "hashing.hpp"
#include "population.hpp"
#include "rng.hpp"

namespace rfid_sampler
{

/**
 *  The OPT-C2 broadcast vector F.
 *
 *  F[i] = 1 marks slot i as holding exactly one selected tag that is promoted
 *  to Ready in this iteration. Inclusive prefix counts are cached because
 *  every listening tag needs one.
 */
class FrameVector
{
public:
    FrameVector() = default;
    explicit FrameVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) { rebuild(); }

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    std::uint32_t popcount() const noexcept { return prefix_.empty() ? 0 : prefix_.back(); }

    /// Ones in F[0..i], inclusive.
    std::uint32_t prefix(std::size_t i) const noexcept { return prefix_[i]; }

    const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }
    bool operator==(const FrameVector& o) const noexcept { return bits_ == o.bits_; }

    std::string to_string() const
    {
        std::string s;
        s.reserve(bits_.size());
        for (auto b : bits_) s.push_back(b ? '1' : '0');
        return s;
    }

private:
    void rebuild()
    {
        prefix_.resize(bits_.size());
        std::uint32_t run = 0;
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            run += bits_[i] ? 1U : 0U;
            prefix_[i] = run;
        }
    }

    std::vector<std::uint8_t> bits_;
    std::vector<std::uint32_t> prefix_;
};

/// Left-to-right scan: F[i] = 1 iff slot i is a singleton and fewer than `needed` ones precede it.
inline FrameVector build_frame(std::span<const std::uint64_t> slots_of_tags, std::size_t slot_count,
                               std::size_t needed)
{
    std::vector<std::uint32_t> occupancy(slot_count, 0);
    for (auto h : slots_of_tags) {
        if (h >= slot_count) throw argument_error("hash value outside the frame");
        ++occupancy[h];
    }
    std::vector<std::uint8_t> bits(slot_count, 0);
    std::size_t placed = 0;
    for (std::size_t i = 0; i < slot_count && placed < needed; ++i) {
        if (occupancy[i] == 1) {
            bits[i] = 1;
            ++placed;
        }
    }
    return FrameVector(std::move(bits));
}

/// Tag-side reaction to F for a Selected tag hashed to `slot`.
inline Tag tag_apply_frame(Tag tag, const FrameVector& frame, std::size_t slot)
{
    if (tag.state != TagState::selected) throw std::logic_error("only selected tags listen to frames");
    if (slot >= frame.size()) throw argument_error("slot outside the frame");
    if (frame[slot]) {
        tag.cnt += frame.prefix(slot);
        tag.transition(TagState::ready);
    } else {
        tag.cnt += frame.popcount();
    }
    return tag;
}

struct ReadyTag
{
    TagId id;
    std::uint32_t order = 0;
    bool operator==(const ReadyTag&) const = default;
};

/// What one category round produced.
struct RoundOutcome
{
    std::vector<TagId> selected;  ///< P_k^s after the coarse stage
    std::vector<ReadyTag> ready;  ///< T_k^r, ascending reporting order
    std::size_t iterations = 0;   ///< refined-stage frames
    std::uint64_t bits_sent = 0;
    std::size_t seed_tests = 0;   ///< coarse-stage seeds tried
    std::uint64_t coarse_bits = 0;
    std::uint64_t refined_bits = 0;
    std::uint64_t frame_bits = 0; ///< the F vectors alone, part of refined_bits
};

/// True when `ready` holds exactly c tags whose orders are a permutation of 1..c.
inline bool orders_are_permutation(std::span<const ReadyTag> ready, std::size_t c)
{
    if (ready.size() != c) return false;
    std::vector<bool> seen(c + 1, false);
    for (const auto& r : ready) {
        if (r.order < 1 || r.order > c || seen[r.order]) return false;
        seen[r.order] = true;
    }
    return true;
}

/// Bits to broadcast <r, c_k>: a substring start among 96 / log2(n_k) positions plus c_k.
inline std::uint64_t coarse_header_bits(std::uint64_t n, std::uint64_t c)
{
    const double seed_positions = 96.0 / std::max(1.0, std::log2(static_cast<double>(n)));
    return static_cast<std::uint64_t>(std::ceil(std::log2(seed_positions) - 1e-12)) + ceil_log2(c);
}

/// Per-iteration <r, |P_k^s|> header: a 2 log2 m-bit seed plus log2 m bits of size.
constexpr std::uint64_t refined_header_bits(std::uint64_t m) noexcept { return 3ULL * ceil_log2(m); }

inline constexpr std::uint64_t stop_broadcast_bits = 1;

/// Default refined-stage guard: 64 (1 + log2 c) iterations.
inline std::size_t default_iteration_cap(std::uint64_t c)
{
    return static_cast<std::size_t>(64.0 * (1.0 + std::log2(static_cast<double>(std::max<std::uint64_t>(c, 1)))));
}

struct OptcOptions
{
    SeedWindow window = SeedWindow::full();
    std::size_t iteration_cap = 0; ///< 0 picks default_iteration_cap(c)
};

/**
 *  Coarse stage for one category: pick a suitable seed, broadcast <r, c_k>,
 *  and move every tag to Selected (h(t) <= c + 3 sqrt c) or Unselected.
 */
inline RoundOutcome optc1_round(std::span<Tag> tags, std::uint64_t c, Rng& rng, const OptcOptions& opts = {})
{
    const std::uint64_t n = tags.size();
    if (c < 1 || c > n) throw argument_error("coarse round needs 1 <= c_k <= n_k");
    for (const auto& t : tags)
        if (t.state != TagState::unacknowledged) throw std::logic_error("coarse round needs unacknowledged tags");

    const auto [seed, stats] = find_suitable_seed(std::span<const Tag>(tags), c, std::size_t{1} << 20, rng, opts.window);
    if (!stats.found)
        throw protocol_error("no suitable seed for n = " + std::to_string(n) + ", c = " + std::to_string(c) +
                             " after " + std::to_string(stats.tests) + " tests");

    RoundOutcome out;
    out.seed_tests = stats.tests;
    const double threshold = selection_threshold(c);
    for (auto& t : tags) {
        if (static_cast<double>(hash_mod(t.id, seed, n)) <= threshold) {
            t.transition(TagState::selected);
            out.selected.push_back(t.id);
        } else {
            t.transition(TagState::unselected);
        }
    }
    if (out.selected.size() != stats.selected_count) throw std::logic_error("reader prediction diverged from tags");
    out.coarse_bits = coarse_header_bits(n, c);
    out.bits_sent = out.coarse_bits;
    return out;
}

/**
 *  Refined stage for one category. Repeats seed broadcast, hashing into
 *  |P_k^s| slots, frame broadcast and promotion until c_k tags are Ready,
 *  then releases the rest to Unselected.
 *
 *  The reader keeps its own view of the orders and checks it against every
 *  tag counter after each frame.
 */
inline RoundOutcome optc2_round(std::span<Tag> tags, std::uint64_t c, Rng& rng, const OptcOptions& opts = {},
                                CostLedger* ledger = nullptr)
{
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (tags[i].state == TagState::selected) active.push_back(i);
    if (c < 1 || active.size() < c) throw argument_error("refined round needs |P_k^s| >= c_k >= 1");

    RoundOutcome out;
    for (auto i : active) out.selected.push_back(tags[i].id);

    const std::size_t cap = opts.iteration_cap ? opts.iteration_cap : default_iteration_cap(c);
    std::uint32_t ready_count = 0;
    std::vector<std::uint64_t> hashes;
    std::vector<std::size_t> still_active;

    while (ready_count < c) {
        if (out.iterations == cap)
            throw protocol_error("refined round exceeded " + std::to_string(cap) + " iterations");
        ++out.iterations;

        const std::uint64_t m = active.size();
        const unsigned length = hash_width(m, opts.window);
        const auto start = static_cast<unsigned>(rng.between(opts.window.first, opts.window.last - length + 1));
        const SeedSpec seed{start, length};

        hashes.resize(m);
        for (std::size_t j = 0; j < m; ++j) hashes[j] = hash_mod(tags[active[j]].id, seed, m);
        const auto frame = build_frame(hashes, m, c - ready_count);

        const std::uint64_t iteration_bits = refined_header_bits(m) + m;
        out.refined_bits += iteration_bits;
        out.frame_bits += m;
        if (ledger) {
            ledger->charge(iteration_bits, 2);
            ++ledger->frames;
        }

        still_active.clear();
        for (std::size_t j = 0; j < m; ++j) {
            Tag& tag = tags[active[j]];
            tag = tag_apply_frame(tag, frame, hashes[j]);
            if (frame[hashes[j]]) {
                const std::uint32_t predicted = ready_count + frame.prefix(hashes[j]);
                if (tag.state != TagState::ready || tag.cnt != predicted)
                    throw std::logic_error("tag counter disagrees with reader recount");
                out.ready.push_back(ReadyTag{tag.id, predicted});
            } else {
                if (tag.cnt != ready_count + frame.popcount())
                    throw std::logic_error("waiting tag counter disagrees with reader recount");
                still_active.push_back(active[j]);
            }
        }
        ready_count += frame.popcount();
        active.swap(still_active);
    }

    out.refined_bits += stop_broadcast_bits;
    if (ledger) ledger->charge(stop_broadcast_bits);
    for (auto i : active) tags[i].transition(TagState::unselected);

    std::sort(out.ready.begin(), out.ready.end(),
              [](const ReadyTag& a, const ReadyTag& b) { return a.order < b.order; });
    out.bits_sent = out.refined_bits;
    return out;
}

struct OptcResult
{
    std::vector<RoundOutcome> rounds; ///< one per category, coarse and refined merged
    CostLedger ledger;
    double seconds = 0.0;
};

/// Full protocol: K coarse rounds, then K refined rounds.
inline OptcResult run_optc(Population& population, const TimingModel& timing, Rng& rng, const OptcOptions& opts = {})
{
    for (const auto& t : population.tags())
        if (t.state != TagState::unacknowledged) throw std::logic_error("run_optc needs a fresh population");

    OptcResult res;
    const std::size_t K = population.category_count();
    res.rounds.reserve(K);
    for (std::size_t k = 1; k <= K; ++k) {
        auto round = optc1_round(population.category(k), population.spec(k).sample, rng, opts);
        res.ledger.charge(round.coarse_bits);
        res.rounds.push_back(std::move(round));
    }
    for (std::size_t k = 1; k <= K; ++k) {
        const auto c = population.spec(k).sample;
        auto refined = optc2_round(population.category(k), c, rng, opts, &res.ledger);
        auto& round = res.rounds[k - 1];
        round.ready = std::move(refined.ready);
        round.iterations = refined.iterations;
        round.refined_bits = refined.refined_bits;
        round.frame_bits = refined.frame_bits;
        round.bits_sent = round.coarse_bits + round.refined_bits;
        if (!orders_are_permutation(round.ready, c))
            throw std::logic_error("category " + std::to_string(k) + " finished without a full order set");
    }
    res.seconds = res.ledger.seconds(timing);
    return res;
}

} // namespace rfid_sampler
#endif
