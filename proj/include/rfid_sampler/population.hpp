#ifndef RFID_SAMPLER_POPULATION_HPP
#define RFID_SAMPLER_POPULATION_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rng.hpp"
#include "tag_id.hpp"

namespace rfid_sampler
{

/// Largest population generate_population() accepts.
inline constexpr std::size_t max_population_size = std::size_t{1} << 20;

enum class TagState : std::uint8_t
{
    unacknowledged,
    unselected,
    selected,
    ready,
};

inline const char* to_string(TagState s) noexcept
{
    switch (s) {
    case TagState::unacknowledged: return "unacknowledged";
    case TagState::unselected: return "unselected";
    case TagState::selected: return "selected";
    case TagState::ready: return "ready";
    }
    return "?";
}

/// Legal moves: Unacknowledged -> {Selected, Unselected}, Selected -> {Ready, Unselected}.
constexpr bool is_legal_transition(TagState from, TagState to) noexcept
{
    if (from == TagState::unacknowledged) return to == TagState::selected || to == TagState::unselected;
    if (from == TagState::selected) return to == TagState::ready || to == TagState::unselected;
    return false;
}

struct Tag
{
    TagId id;
    std::uint32_t category = 0; ///< 1-based category index
    TagState state = TagState::unacknowledged;
    std::uint32_t cnt = 0; ///< reporting-order accumulator; the order once Ready
    bool missing = false;

    void transition(TagState next)
    {
        if (!is_legal_transition(state, next))
            throw std::logic_error(std::string("illegal tag transition ") + to_string(state) + " -> " +
                                   to_string(next));
        state = next;
    }

    /// Back to the freshly-inventoried state.
    void reset() noexcept
    {
        state = TagState::unacknowledged;
        cnt = 0;
    }
};

struct CategorySpec
{
    std::uint32_t k = 0;      ///< 1-based index
    std::uint64_t size = 0;   ///< n_k
    std::uint64_t sample = 0; ///< c_k, the reliability number
};

/// Requested (n_k, c_k) pair for one category.
struct CategorySize
{
    std::uint64_t size = 0;
    std::uint64_t sample = 0;
};

/**
 *  A tag population partitioned into K categories.
 *
 *  Tags of category k are stored contiguously in ascending ID order, so
 *  category(k) is a view rather than a copy.
 */
class Population
{
public:
    Population() = default;

    std::span<const Tag> tags() const noexcept { return tags_; }
    std::span<Tag> tags() noexcept { return tags_; }
    const std::vector<CategorySpec>& categories() const noexcept { return categories_; }
    std::uint64_t rng_seed() const noexcept { return seed_; }
    std::size_t category_count() const noexcept { return categories_.size(); }
    std::size_t size() const noexcept { return tags_.size(); }

    const CategorySpec& spec(std::size_t k) const
    {
        check_index(k);
        return categories_[k - 1];
    }

    std::span<const Tag> category(std::size_t k) const
    {
        check_index(k);
        return std::span<const Tag>(tags_).subspan(offsets_[k - 1], categories_[k - 1].size);
    }

    std::span<Tag> category(std::size_t k)
    {
        check_index(k);
        return std::span<Tag>(tags_).subspan(offsets_[k - 1], categories_[k - 1].size);
    }

    /// Every tag back to Unacknowledged with cnt = 0; missing flags are kept.
    void reset_states() noexcept
    {
        for (auto& t : tags_) t.reset();
    }

    friend Population generate_population(std::span<const CategorySize>, std::uint64_t);

private:
    void check_index(std::size_t k) const
    {
        if (k < 1 || k > categories_.size())
            throw lookup_error("category index " + std::to_string(k) + " outside [1, " +
                               std::to_string(categories_.size()) + "]");
    }

    std::vector<Tag> tags_;
    std::vector<CategorySpec> categories_;
    std::vector<std::size_t> offsets_;
    std::uint64_t seed_ = 0;
};

/// Draw `count` distinct uniformly random 96-bit IDs; duplicates are redrawn.
inline std::vector<TagId> draw_unique_ids(std::size_t count, Rng& rng)
{
    std::vector<TagId> ids(count);
    for (auto& id : ids) id = TagId::random(rng);

    std::vector<std::size_t> order(count);
    for (;;) {
        for (std::size_t i = 0; i < count; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return ids[a] != ids[b] ? ids[a] < ids[b] : a < b;
        });
        bool clean = true;
        for (std::size_t i = 1; i < count; ++i) {
            if (ids[order[i]] == ids[order[i - 1]]) {
                ids[order[i]] = TagId::random(rng);
                clean = false;
            }
        }
        if (clean) return ids;
    }
}

/// Synthetic population with independently uniform ID bits; deterministic in `rng_seed`.
inline Population generate_population(std::span<const CategorySize> sizes, std::uint64_t rng_seed)
{
    if (sizes.empty()) throw config_error("population needs at least one category");
    std::size_t total = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto& s = sizes[i];
        if (s.size == 0) throw config_error("category " + std::to_string(i + 1) + " has n_k = 0");
        if (s.sample < 1 || s.sample > s.size)
            throw config_error("category " + std::to_string(i + 1) + " needs 1 <= c_k <= n_k (c_k = " +
                               std::to_string(s.sample) + ", n_k = " + std::to_string(s.size) + ")");
        total += s.size;
        if (total > max_population_size) throw config_error("population exceeds 2^20 tags");
    }

    Rng rng(rng_seed);
    const auto ids = draw_unique_ids(total, rng);

    Population pop;
    pop.seed_ = rng_seed;
    pop.tags_.reserve(total);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto k = static_cast<std::uint32_t>(i + 1);
        pop.categories_.push_back(CategorySpec{k, sizes[i].size, sizes[i].sample});
        pop.offsets_.push_back(offset);
        for (std::size_t j = 0; j < sizes[i].size; ++j) pop.tags_.push_back(Tag{ids[offset + j], k});
        std::sort(pop.tags_.begin() + static_cast<std::ptrdiff_t>(offset), pop.tags_.end(),
                  [](const Tag& a, const Tag& b) { return a.id < b.id; });
        offset += sizes[i].size;
    }
    return pop;
}

inline Population generate_population(std::initializer_list<CategorySize> sizes, std::uint64_t rng_seed)
{
    return generate_population(std::span<const CategorySize>(sizes.begin(), sizes.size()), rng_seed);
}

/// Copy of `population` where each tag of P_k is missing with probability rates[k-1].
inline Population mark_missing(Population population, std::span<const double> rates, std::uint64_t rng_seed)
{
    if (rates.size() != population.category_count())
        throw config_error("expected " + std::to_string(population.category_count()) + " missing rates, got " +
                           std::to_string(rates.size()));
    for (double a : rates)
        if (!(a >= 0.0 && a < 1.0)) throw config_error("missing rate must lie in [0, 1)");

    Rng rng(rng_seed);
    for (std::size_t k = 1; k <= population.category_count(); ++k)
        for (auto& t : population.category(k)) t.missing = rng.bernoulli(rates[k - 1]);
    return population;
}

/// The n_k tags of category k in ascending ID order.
inline std::vector<Tag> category_tags(const Population& population, std::size_t k)
{
    auto view = population.category(k);
    return {view.begin(), view.end()};
}

} // namespace rfid_sampler
#endif
