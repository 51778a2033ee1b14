#ifndef RFID_SAMPLER_HARNESS_RESULTS_HPP
#define RFID_SAMPLER_HARNESS_RESULTS_HPP

#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "../analysis.hpp"
#include "../baselines.hpp"
#include "../optc.hpp"
#include "../optc_impl.hpp"
#include "../population.hpp"
#include "scenario.hpp"

namespace rfid_sampler::harness
{

struct ResultRow
{
    std::string scenario;
    Protocol protocol = Protocol::optc;
    std::size_t trial = 0;
    std::size_t K = 0;
    std::uint64_t sum_n = 0;
    std::uint64_t sum_c = 0;
    std::uint64_t bits = 0;
    double seconds = 0.0;
    double lb_seconds = 0.0;
    double ratio = 0.0;
};

inline constexpr const char* csv_header = "scenario,protocol,trial,K,sum_n,sum_c,bits,seconds,lb_seconds,ratio";

/// Ledger of one protocol run over `pop`, which must be fresh.
inline CostLedger run_protocol(Protocol p, Population& pop, Rng& rng, const TimingModel& timing,
                               ImplThreshold impl_threshold)
{
    ImplOptions impl;
    impl.threshold = impl_threshold;
    switch (p) {
    case Protocol::optc: return run_optc(pop, timing, rng).ledger;
    case Protocol::optc_impl: return run_optc_impl(pop, rng, timing, impl).ledger;
    case Protocol::random_select: return run_random_select(pop, rng, timing).ledger;
    case Protocol::naive_threshold: return run_naive_threshold(pop, rng, timing, impl).ledger;
    }
    throw std::logic_error("unhandled protocol");
}

/**
 *  One row per (scenario, point, protocol, trial), in that nesting order.
 *  Trial t of a point uses the same population for every protocol, and each
 *  (point, trial, protocol) has its own stream split from the root seed.
 */
inline std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg)
{
    std::vector<ResultRow> rows;
    for (std::size_t s = 0; s < cfg.scenarios.size(); ++s) {
        const auto& sc = cfg.scenarios[s];
        const auto points = sc.points();
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const auto& pt = points[pi];
            std::vector<CategorySize> sizes;
            for (std::size_t k = 0; k < pt.k(); ++k) sizes.push_back(CategorySize{pt.sizes[k], pt.samples[k]});
            const double lb = lower_bound_time(pt.samples, cfg.timing);
            const auto sum_n = std::accumulate(pt.sizes.begin(), pt.sizes.end(), std::uint64_t{0});
            const auto sum_c = std::accumulate(pt.samples.begin(), pt.samples.end(), std::uint64_t{0});

            for (auto proto : sc.protocols) {
                for (std::size_t t = 0; t < sc.trials; ++t) {
                    auto pop = generate_population(sizes, derive_seed(cfg.seed, {s, pi, t, 0}));
                    Rng rng(derive_seed(cfg.seed, {s, pi, t, 1 + static_cast<std::uint64_t>(proto)}));
                    const auto ledger = run_protocol(proto, pop, rng, cfg.timing, cfg.impl_threshold);

                    ResultRow r;
                    r.scenario = sc.id;
                    r.protocol = proto;
                    r.trial = t;
                    r.K = pt.k();
                    r.sum_n = sum_n;
                    r.sum_c = sum_c;
                    r.bits = ledger.bits;
                    r.seconds = ledger.seconds(cfg.timing);
                    r.lb_seconds = lb;
                    r.ratio = r.seconds / lb;
                    rows.push_back(std::move(r));
                }
            }
        }
    }
    return rows;
}

inline std::string format_real(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<ResultRow>& rows)
{
    out << csv_header << '\n';
    for (const auto& r : rows)
        out << r.scenario << ',' << to_string(r.protocol) << ',' << r.trial << ',' << r.K << ',' << r.sum_n << ','
            << r.sum_c << ',' << r.bits << ',' << format_real(r.seconds) << ',' << format_real(r.lb_seconds) << ','
            << format_real(r.ratio) << '\n';
}

struct PointSummary
{
    std::string scenario;
    Protocol protocol = Protocol::optc;
    std::size_t K = 0;
    std::uint64_t sum_n = 0;
    std::uint64_t sum_c = 0;
    std::size_t trials = 0;
    double mean_bits = 0, mean_seconds = 0, sd_seconds = 0, lb_seconds = 0, mean_ratio = 0, sd_ratio = 0;
};

/// Mean and sample standard deviation per (scenario, protocol, K, sum_n, sum_c), in first-seen order.
inline std::vector<PointSummary> summarize(const std::vector<ResultRow>& rows)
{
    using Key = std::tuple<std::string, Protocol, std::size_t, std::uint64_t, std::uint64_t>;
    std::map<Key, std::size_t> index;
    std::vector<std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) {
        const Key key{r.scenario, r.protocol, r.K, r.sum_n, r.sum_c};
        auto [it, fresh] = index.try_emplace(key, groups.size());
        if (fresh) groups.emplace_back();
        groups[it->second].push_back(&r);
    }

    auto mean_sd = [](const std::vector<double>& v) {
        const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - m) * (x - m);
        return std::pair{m, v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0};
    };

    std::vector<PointSummary> out;
    for (const auto& g : groups) {
        PointSummary s;
        const auto& first = *g.front();
        s.scenario = first.scenario;
        s.protocol = first.protocol;
        s.K = first.K;
        s.sum_n = first.sum_n;
        s.sum_c = first.sum_c;
        s.trials = g.size();
        s.lb_seconds = first.lb_seconds;
        std::vector<double> bits, secs, ratios;
        for (const auto* r : g) {
            bits.push_back(static_cast<double>(r->bits));
            secs.push_back(r->seconds);
            ratios.push_back(r->ratio);
        }
        s.mean_bits = mean_sd(bits).first;
        std::tie(s.mean_seconds, s.sd_seconds) = mean_sd(secs);
        std::tie(s.mean_ratio, s.sd_ratio) = mean_sd(ratios);
        out.push_back(std::move(s));
    }
    return out;
}

inline void write_summary_csv(std::ostream& out, const std::vector<PointSummary>& points)
{
    out << "scenario,protocol,K,sum_n,sum_c,trials,mean_bits,mean_seconds,sd_seconds,lb_seconds,mean_ratio,sd_ratio\n";
    for (const auto& s : points)
        out << s.scenario << ',' << to_string(s.protocol) << ',' << s.K << ',' << s.sum_n << ',' << s.sum_c << ','
            << s.trials << ',' << format_real(s.mean_bits) << ',' << format_real(s.mean_seconds) << ','
            << format_real(s.sd_seconds) << ',' << format_real(s.lb_seconds) << ',' << format_real(s.mean_ratio)
            << ',' << format_real(s.sd_ratio) << '\n';
}

inline nlohmann::ordered_json to_json(const std::vector<ResultRow>& rows, const std::vector<PointSummary>& points)
{
    nlohmann::ordered_json j;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows)
        j["rows"].push_back({{"scenario", r.scenario},
                             {"protocol", to_string(r.protocol)},
                             {"trial", r.trial},
                             {"K", r.K},
                             {"sum_n", r.sum_n},
                             {"sum_c", r.sum_c},
                             {"bits", r.bits},
                             {"seconds", r.seconds},
                             {"lb_seconds", r.lb_seconds},
                             {"ratio", r.ratio}});
    j["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : points)
        j["summary"].push_back({{"scenario", s.scenario},
                                {"protocol", to_string(s.protocol)},
                                {"K", s.K},
                                {"sum_n", s.sum_n},
                                {"sum_c", s.sum_c},
                                {"trials", s.trials},
                                {"mean_bits", s.mean_bits},
                                {"mean_seconds", s.mean_seconds},
                                {"sd_seconds", s.sd_seconds},
                                {"lb_seconds", s.lb_seconds},
                                {"mean_ratio", s.mean_ratio},
                                {"sd_ratio", s.sd_ratio}});
    return j;
}

} // namespace rfid_sampler::harness
#endif
