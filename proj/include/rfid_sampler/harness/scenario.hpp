#ifndef RFID_SAMPLER_HARNESS_SCENARIO_HPP
#define RFID_SAMPLER_HARNESS_SCENARIO_HPP

// Scenario configuration. The format is line-based key/value text:
//
//   # comment
//   seed = 7
//   trials = 20
//   protocols = optc, optc-impl, random-select
//   timing.rate_bps = 26700
//   timing.gap_us = 302
//   timing.gap_mode = linear          # or per-message
//   impl.threshold = scaled           # or raw
//
//   [scenario vary-k-c10]
//   K = sweep 20..100 step 20
//   n = 100
//   c = 10
//
// Global keys come before the first section; `trials` and `protocols` may be
// overridden per scenario. K takes `<int>` or `sweep a..b step s`. n and c
// take `<int>`, `sweep a..b step s`, `alternate <odd> <even>` (category k
// gets the first value when k is odd) or `list v1 v2 ...` (one per category).
// Every combination of sweep values is one experiment point.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "../cost.hpp"
#include "../errors.hpp"
#include "../optc_impl.hpp"

namespace rfid_sampler::harness
{

enum class Protocol : std::uint8_t
{
    optc,
    optc_impl,
    random_select,
    naive_threshold,
};

inline const char* to_string(Protocol p) noexcept
{
    switch (p) {
    case Protocol::optc: return "optc";
    case Protocol::optc_impl: return "optc-impl";
    case Protocol::random_select: return "random-select";
    case Protocol::naive_threshold: return "naive-threshold";
    }
    return "?";
}

inline bool parse_protocol(std::string_view s, Protocol& out) noexcept
{
    for (auto p : {Protocol::optc, Protocol::optc_impl, Protocol::random_select, Protocol::naive_threshold})
        if (s == to_string(p)) {
            out = p;
            return true;
        }
    return false;
}

struct Schedule
{
    enum class Kind : std::uint8_t
    {
        constant,
        alternate,
        list,
    };
    Kind kind = Kind::constant;
    std::vector<std::uint64_t> values; ///< 1 value, 2 (odd, even), or one per category

    std::vector<std::uint64_t> expand(std::size_t K) const
    {
        std::vector<std::uint64_t> out(K);
        for (std::size_t k = 1; k <= K; ++k) {
            switch (kind) {
            case Kind::constant: out[k - 1] = values.at(0); break;
            case Kind::alternate: out[k - 1] = values.at(k % 2 == 1 ? 0 : 1); break;
            case Kind::list:
                if (values.size() != K)
                    throw config_error("list schedule has " + std::to_string(values.size()) + " values but K = " +
                                       std::to_string(K));
                out[k - 1] = values[k - 1];
                break;
            }
        }
        return out;
    }
};

/// A parameter written in the config: a fixed schedule or a sweep of constants.
struct Axis
{
    std::vector<Schedule> options;
};

struct ScenarioPoint
{
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> samples;

    std::size_t k() const noexcept { return sizes.size(); }
};

struct ScenarioConfig
{
    std::string id;
    std::vector<std::size_t> k_values;
    Axis n;
    Axis c;
    std::size_t trials = 10;
    std::vector<Protocol> protocols{Protocol::optc};
    int line = 0; ///< where the section header sits, for messages

    std::vector<ScenarioPoint> points() const
    {
        std::vector<ScenarioPoint> out;
        for (auto K : k_values)
            for (const auto& ns : n.options)
                for (const auto& cs : c.options) {
                    ScenarioPoint p{ns.expand(K), cs.expand(K)};
                    for (std::size_t i = 0; i < K; ++i)
                        if (p.samples[i] < 1 || p.samples[i] > p.sizes[i])
                            throw config_error("line " + std::to_string(line) + ": scenario " + id + " category " +
                                               std::to_string(i + 1) + " has c = " + std::to_string(p.samples[i]) +
                                               ", n = " + std::to_string(p.sizes[i]));
                    out.push_back(std::move(p));
                }
        return out;
    }
};

struct ExperimentConfig
{
    std::uint64_t seed = 1;
    std::size_t trials = 10;
    std::vector<Protocol> protocols{Protocol::optc};
    TimingModel timing = TimingModel::standard();
    ImplThreshold impl_threshold = ImplThreshold::scaled;
    std::vector<ScenarioConfig> scenarios;
};

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string_view> split_words(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == ',')) ++i;
        const auto b = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != ',') ++i;
        if (i > b) out.push_back(s.substr(b, i - b));
    }
    return out;
}

class LineError
{
public:
    explicit LineError(int line) : line_(line) {}
    [[noreturn]] void operator()(const std::string& msg) const
    {
        throw config_error("line " + std::to_string(line_) + ": " + msg);
    }

private:
    int line_;
};

inline std::uint64_t to_uint(std::string_view s, const LineError& fail)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) fail("expected a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

inline double to_double(std::string_view s, const LineError& fail)
{
    const std::string str(s);
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(str, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != str.size() || str.empty()) fail("expected a number, got '" + str + "'");
    return v;
}

/// `sweep a..b step s` (step defaults to 1).
inline std::vector<std::uint64_t> parse_sweep(const std::vector<std::string_view>& w, const LineError& fail)
{
    if (w.size() != 2 && w.size() != 4) fail("sweep takes 'a..b' or 'a..b step s'");
    const auto dots = w[1].find("..");
    if (dots == std::string_view::npos) fail("sweep range needs 'a..b'");
    const auto a = to_uint(w[1].substr(0, dots), fail);
    const auto b = to_uint(w[1].substr(dots + 2), fail);
    std::uint64_t step = 1;
    if (w.size() == 4) {
        if (w[2] != "step") fail("expected 'step', got '" + std::string(w[2]) + "'");
        step = to_uint(w[3], fail);
    }
    if (step == 0 || a > b) fail("sweep needs a <= b and step >= 1");
    std::vector<std::uint64_t> out;
    for (auto v = a; v <= b; v += step) out.push_back(v);
    return out;
}

inline Axis parse_axis(std::string_view value, const LineError& fail)
{
    const auto w = split_words(value);
    if (w.empty()) fail("empty value");
    Axis axis;
    if (w[0] == "sweep") {
        for (auto v : parse_sweep(w, fail)) axis.options.push_back(Schedule{Schedule::Kind::constant, {v}});
    } else if (w[0] == "alternate") {
        if (w.size() != 3) fail("alternate takes two values");
        axis.options.push_back(Schedule{Schedule::Kind::alternate, {to_uint(w[1], fail), to_uint(w[2], fail)}});
    } else if (w[0] == "list") {
        if (w.size() < 2) fail("list needs at least one value");
        Schedule s{Schedule::Kind::list, {}};
        for (std::size_t i = 1; i < w.size(); ++i) s.values.push_back(to_uint(w[i], fail));
        axis.options.push_back(std::move(s));
    } else {
        if (w.size() != 1) fail("expected one integer");
        axis.options.push_back(Schedule{Schedule::Kind::constant, {to_uint(w[0], fail)}});
    }
    for (const auto& s : axis.options)
        for (auto v : s.values)
            if (v < 1) fail("category sizes and sample sizes must be >= 1");
    return axis;
}

inline std::vector<Protocol> parse_protocols(std::string_view value, const LineError& fail)
{
    std::vector<Protocol> out;
    for (auto w : split_words(value)) {
        Protocol p{};
        if (!parse_protocol(w, p)) fail("unknown protocol '" + std::string(w) + "'");
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    if (out.empty()) fail("protocols list is empty");
    return out;
}

} // namespace detail

/// Parse config text. Errors are config_error with a "line N: " prefix.
inline ExperimentConfig parse_config(std::string_view text)
{
    using namespace detail;
    ExperimentConfig cfg;
    double rate = cfg.timing.rate_bps;
    double gap_us = cfg.timing.gap_s * 1e6;
    bool custom_link = false;
    auto gap_mode = cfg.timing.mode;

    // Per-scenario overrides are resolved after the globals are known.
    struct Pending
    {
        ScenarioConfig sc;
        bool has_k = false, has_n = false, has_c = false, has_trials = false, has_protocols = false;
    };
    std::vector<Pending> pending;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        const LineError fail(line_no);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            const auto w = split_words(line.substr(1, line.size() - 2));
            if (w.size() != 2 || w[0] != "scenario") fail("section header must be '[scenario <id>]'");
            for (const auto& p : pending)
                if (p.sc.id == w[1]) fail("duplicate scenario id '" + std::string(w[1]) + "'");
            Pending p;
            p.sc.id = std::string(w[1]);
            p.sc.line = line_no;
            pending.push_back(std::move(p));
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) fail("expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) fail("missing key");
        if (value.empty()) fail("missing value for '" + std::string(key) + "'");

        if (pending.empty()) {
            if (key == "seed") cfg.seed = to_uint(value, fail);
            else if (key == "trials") cfg.trials = to_uint(value, fail);
            else if (key == "protocols") cfg.protocols = parse_protocols(value, fail);
            else if (key == "timing.rate_bps") {
                rate = to_double(value, fail);
                custom_link = true;
            } else if (key == "timing.gap_us") {
                gap_us = to_double(value, fail);
                custom_link = true;
            } else if (key == "timing.gap_mode") {
                if (value == "linear") gap_mode = TimingModel::GapMode::linear;
                else if (value == "per-message") gap_mode = TimingModel::GapMode::per_message;
                else fail("gap_mode must be 'linear' or 'per-message'");
            } else if (key == "impl.threshold") {
                if (value == "scaled") cfg.impl_threshold = ImplThreshold::scaled;
                else if (value == "raw") cfg.impl_threshold = ImplThreshold::raw;
                else fail("impl.threshold must be 'scaled' or 'raw'");
            } else {
                fail("unknown global key '" + std::string(key) + "'");
            }
            if (key == "trials" && cfg.trials == 0) fail("trials must be >= 1");
            continue;
        }

        auto& p = pending.back();
        if (key == "K") {
            const auto w = split_words(value);
            if (!w.empty() && w[0] == "sweep") {
                for (auto v : parse_sweep(w, fail)) p.sc.k_values.push_back(v);
            } else {
                if (w.size() != 1) fail("K takes an integer or a sweep");
                p.sc.k_values.push_back(to_uint(w[0], fail));
            }
            for (auto K : p.sc.k_values)
                if (K < 1) fail("K must be >= 1");
            p.has_k = true;
        } else if (key == "n") {
            p.sc.n = parse_axis(value, fail);
            p.has_n = true;
        } else if (key == "c") {
            p.sc.c = parse_axis(value, fail);
            p.has_c = true;
        } else if (key == "trials") {
            p.sc.trials = to_uint(value, fail);
            if (p.sc.trials == 0) fail("trials must be >= 1");
            p.has_trials = true;
        } else if (key == "protocols") {
            p.sc.protocols = parse_protocols(value, fail);
            p.has_protocols = true;
        } else {
            fail("unknown scenario key '" + std::string(key) + "'");
        }
    }

    if (rate <= 0 || gap_us < 0) throw config_error("line " + std::to_string(line_no) + ": timing values must be positive");
    if (custom_link) cfg.timing = TimingModel::from_link(rate, gap_us * 1e-6);
    cfg.timing.mode = gap_mode;

    if (pending.empty()) throw config_error("line " + std::to_string(line_no) + ": no [scenario] sections");
    for (auto& p : pending) {
        const LineError fail(p.sc.line);
        if (!p.has_k || !p.has_n || !p.has_c) fail("scenario " + p.sc.id + " needs K, n and c");
        if (!p.has_trials) p.sc.trials = cfg.trials;
        if (!p.has_protocols) p.sc.protocols = cfg.protocols;
        (void)p.sc.points(); // surfaces c > n and list-length errors now
        cfg.scenarios.push_back(std::move(p.sc));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

/**
 *  Built-in presets. vary-k / vary-n / vary-c sweep one axis at desk scale;
 *  real-1..3 use the three real-deployment parameter sets (alternating sizes
 *  for real-3); near-optimality holds the two ratio sweeps.
 */
inline const std::map<std::string, std::string>& presets()
{
    static const std::map<std::string, std::string> table{
        {"vary-k", "seed = 1\ntrials = 10\nprotocols = optc, optc-impl, random-select\n"
                   "[scenario vary-k]\nK = sweep 20..100 step 20\nn = 100\nc = 10\n"},
        {"vary-n", "seed = 1\ntrials = 10\nprotocols = optc, optc-impl, random-select\n"
                   "[scenario vary-n]\nK = 20\nn = sweep 100..500 step 100\nc = 10\n"},
        {"vary-c", "seed = 1\ntrials = 10\nprotocols = optc, optc-impl, random-select\n"
                   "[scenario vary-c]\nK = 20\nn = 100\nc = sweep 10..50 step 10\n"},
        {"near-optimality", "seed = 1\ntrials = 10\nprotocols = optc\n"
                            "[scenario ratio-c10]\nK = sweep 20..100 step 20\nn = 100\nc = 10\n"
                            "[scenario ratio-c50]\nK = sweep 20..100 step 20\nn = 100\nc = 50\n"},
        {"real-1", "seed = 1\ntrials = 100\nprotocols = optc-impl, random-select\n"
                   "[scenario real-1]\nK = sweep 2..10 step 2\nn = 20\nc = 5\n"},
        {"real-2", "seed = 1\ntrials = 100\nprotocols = optc-impl, random-select\n"
                   "[scenario real-2]\nK = 8\nn = sweep 10..25 step 5\nc = 4\n"},
        {"real-3", "seed = 1\ntrials = 100\nprotocols = optc-impl, random-select\n"
                   "[scenario real-3]\nK = 8\nn = alternate 20 30\nc = sweep 2..10 step 2\n"},
    };
    return table;
}

inline ExperimentConfig preset_config(const std::string& name)
{
    const auto it = presets().find(name);
    if (it == presets().end()) throw config_error("unknown preset '" + name + "'");
    return parse_config(it->second);
}

} // namespace rfid_sampler::harness
#endif
