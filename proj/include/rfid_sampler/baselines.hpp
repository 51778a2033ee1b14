#ifndef RFID_SAMPLER_BASELINES_HPP
#define RFID_SAMPLER_BASELINES_HPP

#include <string>
#include <vector>

#include "cost.hpp"
#include "optc.hpp"
#include "optc_impl.hpp"
#include "population.hpp"
#include "rng.hpp"
#include "select.hpp"

namespace rfid_sampler
{

struct BaselineReport
{
    std::string protocol;
    std::vector<std::vector<ReadyTag>> sampled; ///< per category, ascending order
    CostLedger ledger;
    double seconds = 0.0;
};

/**
 *  RandomSelect: per category the reader draws c_k EPCs without replacement
 *  and selects each with one Select whose mask is the full 96-bit EPC. Orders
 *  follow the draw sequence; the inventory round that realizes them is not
 *  charged.
 */
inline BaselineReport run_random_select(Population& population, Rng& rng, const TimingModel& timing)
{
    BaselineReport rep;
    rep.protocol = "random-select";
    for (std::size_t k = 1; k <= population.category_count(); ++k) {
        auto tags = population.category(k);
        const std::size_t c = population.spec(k).sample;

        std::vector<std::size_t> idx(tags.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::vector<ReadyTag> picked;
        for (std::size_t r = 0; r < c; ++r) {
            std::swap(idx[r], idx[r + static_cast<std::size_t>(rng.below(idx.size() - r))]);
            Tag& t = tags[idx[r]];

            SelectCommand cmd;
            cmd.pointer = 0;
            cmd.mask = BitString::from_value(t.id.high, 32);
            cmd.mask.append(t.id.low, 64);
            if (!select_matches(cmd, t.id)) throw std::logic_error("EPC mask failed to match its own tag");
            rep.ledger.select_commands += 1;
            rep.ledger.charge(select_fixed_bits + cmd.length());

            t.transition(TagState::selected);
            t.transition(TagState::ready);
            t.cnt = static_cast<std::uint32_t>(r + 1);
            picked.push_back(ReadyTag{t.id, t.cnt});
        }
        for (auto& t : tags)
            if (t.state == TagState::unacknowledged) t.transition(TagState::unselected);
        rep.sampled.push_back(std::move(picked));
    }
    rep.seconds = rep.ledger.seconds(timing);
    return rep;
}

/// OPT-C_IMPL's decisions, with one exact-match Select per hash value 0..tau instead of SelGen.
inline BaselineReport run_naive_threshold(Population& population, Rng& rng, const TimingModel& timing,
                                          ImplOptions opts = {})
{
    opts.planner = CommandPlanner::naive;
    const auto impl = run_optc_impl(population, rng, timing, opts);
    BaselineReport rep;
    rep.protocol = "naive-threshold";
    for (const auto& cat : impl.categories) rep.sampled.push_back(cat.ready);
    rep.ledger = impl.ledger;
    rep.seconds = impl.seconds;
    return rep;
}

} // namespace rfid_sampler
#endif
