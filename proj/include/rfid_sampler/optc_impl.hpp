#ifndef RFID_SAMPLER_OPTC_IMPL_HPP
#define RFID_SAMPLER_OPTC_IMPL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cost.hpp"
#include "errors.hpp"
#include "hashing.hpp"
#include "optc.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "select.hpp"

namespace rfid_sampler
{

struct RefinedThreshold
{
    std::uint64_t tau = 0;
    bool ok = false;
};

/**
 *  tau = the c-th smallest hash. `ok` only when the c smallest values are
 *  pairwise distinct and strictly below the (c+1)-th, so "h <= tau" picks
 *  exactly c tags and the ranks give distinct orders.
 */
inline RefinedThreshold refined_threshold(std::span<const std::uint64_t> hashes, std::size_t c)
{
    if (c < 1 || hashes.size() < c) throw argument_error("refined threshold needs 1 <= c <= |hashes|");
    std::vector<std::uint64_t> sorted(hashes.begin(), hashes.end());
    std::sort(sorted.begin(), sorted.end());
    RefinedThreshold r;
    r.tau = sorted[c - 1];
    r.ok = std::adjacent_find(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(c)) ==
           sorted.begin() + static_cast<std::ptrdiff_t>(c);
    if (r.ok && c < sorted.size()) r.ok = sorted[c - 1] < sorted[c];
    return r;
}

enum class ImplThreshold : std::uint8_t
{
    /// c + 3 sqrt c applied to the raw L-bit substring value.
    raw,
    /// c + 3 sqrt c rescaled from [0, n_k) to the substring range [0, 2^L).
    scaled,
};

enum class CommandPlanner : std::uint8_t
{
    selgen,
    naive,
};

struct ImplOptions
{
    ImplThreshold threshold = ImplThreshold::scaled;
    SeedWindow window = SeedWindow::full();
    CommandPlanner planner = CommandPlanner::selgen;
};

struct ImplCategoryOutcome
{
    std::vector<TagId> selected;
    std::vector<ReadyTag> ready;
    std::vector<SelectCommand> stage1_commands;
    std::vector<SelectCommand> stage2_commands;
    SeedSpec stage1_window;
    SeedSpec stage2_window;
    std::uint64_t stage1_tau = 0;
    std::uint64_t stage2_tau = 0;
    std::size_t stage1_tests = 0;
    std::size_t stage2_tests = 0;

    std::size_t command_count() const noexcept { return stage1_commands.size() + stage2_commands.size(); }
};

struct ImplResult
{
    std::vector<ImplCategoryOutcome> categories;
    CostLedger ledger;
    double seconds = 0.0;
};

/// Stage-1 threshold over L-bit raw values for a category of n tags.
inline std::uint64_t coarse_impl_threshold(std::uint64_t n, std::uint64_t c, unsigned bits, ImplThreshold mode)
{
    const double target = selection_threshold(c);
    const std::uint64_t top = (std::uint64_t{1} << bits) - 1;
    double tau = mode == ImplThreshold::scaled
                     ? std::ceil(target * std::ldexp(1.0, static_cast<int>(bits)) / static_cast<double>(n))
                     : std::floor(target);
    return std::min<std::uint64_t>(static_cast<std::uint64_t>(tau), top);
}

namespace detail
{

inline std::vector<SelectCommand> plan_commands(CommandPlanner planner, std::uint64_t tau, unsigned bits,
                                                const SeedSpec& window)
{
    const auto pointer = static_cast<std::uint16_t>(window.start - 1);
    return planner == CommandPlanner::selgen ? selgen(tau, bits, pointer) : naive_threshold_commands(tau, bits, pointer);
}

/// Start positions of `length`-bit windows inside `w`, minus those lying wholly inside `skip`.
inline std::vector<unsigned> window_starts(unsigned length, SeedWindow w, const SeedWindow* skip = nullptr)
{
    std::vector<unsigned> starts;
    for (unsigned s = w.first; s + length - 1 <= w.last; ++s)
        if (!skip || s < skip->first || s + length - 1 > skip->last) starts.push_back(s);
    return starts;
}

inline std::vector<TagId> ids_of(std::span<const Tag> tags)
{
    std::vector<TagId> ids;
    ids.reserve(tags.size());
    for (const auto& t : tags) ids.push_back(t.id);
    return ids;
}

} // namespace detail

/**
 *  Select-command implementation of OPT-C.
 *
 *  Stage 1 picks an L = ceil(log2 n_k)-bit hash window whose threshold rule
 *  the reader has checked to be suitable and issues the SelGen commands for
 *  it. Stage 2 picks a ceil(log2 l^2)-bit window in which the c_k smallest
 *  hashes of P_k^s are distinct, then issues SelGen commands for the c_k-th
 *  smallest value. Orders follow ascending stage-2 hash.
 */
inline ImplResult run_optc_impl(Population& population, Rng& rng, const TimingModel& timing,
                                const ImplOptions& opts = {})
{
    for (const auto& t : population.tags())
        if (t.state != TagState::unacknowledged) throw std::logic_error("run_optc_impl needs a fresh population");

    ImplResult res;
    const std::size_t K = population.category_count();
    res.categories.resize(K);

    // Stage 1, coarse.
    for (std::size_t k = 1; k <= K; ++k) {
        auto tags = population.category(k);
        const std::uint64_t n = tags.size();
        const std::uint64_t c = population.spec(k).sample;
        auto& out = res.categories[k - 1];

        const unsigned bits = std::max(1U, ceil_log2(n));
        const auto tau = coarse_impl_threshold(n, c, bits, opts.threshold);

        bool found = false;
        SeedSpec window{};
        auto try_window = [&](SeedWindow w, const SeedWindow* skip) {
            auto starts = detail::window_starts(bits, w, skip);
            for (std::size_t i = 0; i < starts.size() && !found; ++i) {
                std::swap(starts[i], starts[i + static_cast<std::size_t>(rng.below(starts.size() - i))]);
                const SeedSpec cand{starts[i], bits};
                ++out.stage1_tests;
                std::size_t hits = 0;
                for (const auto& t : tags)
                    if (substring_hash(t.id, cand) <= tau) ++hits;
                if (in_suitable_range(hits, c)) {
                    window = cand;
                    found = true;
                }
            }
        };
        try_window(opts.window, nullptr);
        if (!found && !opts.window.is_full()) try_window(SeedWindow::full(), &opts.window);
        if (!found)
            throw protocol_error("stage 1: no suitable hash window for category " + std::to_string(k) + " (n = " +
                                 std::to_string(n) + ", c = " + std::to_string(c) + ", tau = " + std::to_string(tau) +
                                 ", " + std::to_string(out.stage1_tests) + " windows tried)");

        out.stage1_window = window;
        out.stage1_tau = tau;
        out.stage1_commands = detail::plan_commands(opts.planner, tau, bits, window);
        res.ledger.select_commands += out.stage1_commands.size();
        res.ledger.charge(command_cost(out.stage1_commands), out.stage1_commands.size());

        const auto ids = detail::ids_of(tags);
        const auto flags = run_selects(out.stage1_commands, ids);
        for (std::size_t i = 0; i < tags.size(); ++i) {
            if (flags[i] != (substring_hash(tags[i].id, window) <= tau))
                throw std::logic_error("stage 1 Select result differs from the threshold rule");
            tags[i].transition(flags[i] ? TagState::selected : TagState::unselected);
            if (flags[i]) out.selected.push_back(tags[i].id);
        }
    }

    // Stage 2, refined.
    for (std::size_t k = 1; k <= K; ++k) {
        auto tags = population.category(k);
        const std::uint64_t c = population.spec(k).sample;
        auto& out = res.categories[k - 1];

        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i].state == TagState::selected) members.push_back(i);
        const std::uint64_t l = members.size();
        const unsigned bits = std::max(1U, ceil_log2(l * l));

        std::vector<std::uint64_t> hashes(l);
        bool found = false;
        RefinedThreshold thr;
        SeedSpec window{};
        auto scan = [&](SeedWindow w, const SeedWindow* skip) {
            const auto starts = detail::window_starts(bits, w, skip);
            if (starts.empty()) return;
            const auto offset = static_cast<std::size_t>(rng.below(starts.size()));
            for (std::size_t i = 0; i < starts.size() && !found; ++i) {
                const SeedSpec cand{starts[(offset + i) % starts.size()], bits};
                ++out.stage2_tests;
                for (std::size_t j = 0; j < l; ++j) hashes[j] = substring_hash(tags[members[j]].id, cand);
                thr = refined_threshold(hashes, c);
                if (thr.ok) {
                    window = cand;
                    found = true;
                }
            }
        };
        scan(opts.window, nullptr);
        if (!found && !opts.window.is_full()) scan(SeedWindow::full(), &opts.window);
        if (!found)
            throw protocol_error("stage 2: no hash window separates the " + std::to_string(c) +
                                 " smallest values in category " + std::to_string(k) + " (|P_k^s| = " +
                                 std::to_string(l) + ", " + std::to_string(out.stage2_tests) + " windows tried)");

        out.stage2_window = window;
        out.stage2_tau = thr.tau;
        out.stage2_commands = detail::plan_commands(opts.planner, thr.tau, bits, window);
        res.ledger.select_commands += out.stage2_commands.size();
        res.ledger.charge(command_cost(out.stage2_commands), out.stage2_commands.size());

        std::vector<TagId> member_ids;
        for (auto i : members) member_ids.push_back(tags[i].id);
        const auto flags = run_selects(out.stage2_commands, member_ids);

        std::vector<std::size_t> picked;
        for (std::size_t j = 0; j < l; ++j) {
            if (flags[j] != (hashes[j] <= thr.tau))
                throw std::logic_error("stage 2 Select result differs from the threshold rule");
            if (flags[j]) picked.push_back(j);
        }
        if (picked.size() != c) throw std::logic_error("stage 2 did not select exactly c_k tags");
        std::sort(picked.begin(), picked.end(), [&](std::size_t a, std::size_t b) { return hashes[a] < hashes[b]; });

        std::vector<bool> is_picked(l, false);
        for (std::size_t r = 0; r < picked.size(); ++r) {
            Tag& t = tags[members[picked[r]]];
            t.transition(TagState::ready);
            t.cnt = static_cast<std::uint32_t>(r + 1);
            out.ready.push_back(ReadyTag{t.id, t.cnt});
            is_picked[picked[r]] = true;
        }
        for (std::size_t j = 0; j < l; ++j)
            if (!is_picked[j]) tags[members[j]].transition(TagState::unselected);
    }

    res.seconds = res.ledger.seconds(timing);
    return res;
}

} // namespace rfid_sampler
#endif
