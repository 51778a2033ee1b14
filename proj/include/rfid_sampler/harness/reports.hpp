#ifndef RFID_SAMPLER_HARNESS_REPORTS_HPP
#define RFID_SAMPLER_HARNESS_REPORTS_HPP

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include "../analysis.hpp"
#include "results.hpp"

namespace rfid_sampler::harness
{

struct BoundsRow
{
    double gamma_bits = 0;
    double lb_seconds = 0;
    double optc_bits = 0;
    double optc_seconds = 0;
    double ratio = 0;
};

inline BoundsRow bounds_report(const ProblemSpec& spec, const TimingModel& timing = TimingModel::standard())
{
    spec.validate();
    BoundsRow r;
    r.gamma_bits = lower_bound_bits(spec.samples);
    r.lb_seconds = lower_bound_time(spec.samples, timing);
    r.optc_bits = optc_theoretical_bits(spec);
    r.optc_seconds = optc_theoretical_time(spec, timing);
    r.ratio = r.optc_bits / r.gamma_bits;
    return r;
}

inline void print_bounds(std::ostream& out, const ProblemSpec& spec, const BoundsRow& r)
{
    out << "K,gamma_bits,lb_seconds,optc_bits,optc_seconds,ratio\n"
        << spec.k() << ',' << format_real(r.gamma_bits) << ',' << format_real(r.lb_seconds) << ','
        << format_real(r.optc_bits) << ',' << format_real(r.optc_seconds) << ',' << format_real(r.ratio) << '\n';
}

struct ReliabilityRow
{
    double alpha = 0;
    std::uint64_t c = 0;
    double success = 0; ///< 1 - alpha^c
};

/// c = reliability_number(alpha, epsilon) for each alpha.
inline std::vector<ReliabilityRow> reliability_report(const std::vector<double>& alphas, double epsilon)
{
    std::vector<ReliabilityRow> out;
    for (double a : alphas) {
        const auto c = reliability_number(a, epsilon);
        out.push_back(ReliabilityRow{a, c, 1.0 - std::pow(a, static_cast<double>(c))});
    }
    return out;
}

/// "a" or "start:stop:step" (inclusive, with a little slack for rounding).
inline std::vector<double> parse_alpha_range(const std::string& text)
{
    auto num = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw argument_error("bad number '" + s + "' in alpha '" + text + "'");
        return v;
    };
    const auto first = text.find(':');
    if (first == std::string::npos) return {num(text)};
    const auto second = text.find(':', first + 1);
    if (second == std::string::npos) throw argument_error("alpha range must be start:stop:step");
    const double start = num(text.substr(0, first));
    const double stop = num(text.substr(first + 1, second - first - 1));
    const double step = num(text.substr(second + 1));
    if (!(step > 0) || stop < start) throw argument_error("alpha range needs step > 0 and start <= stop");
    std::vector<double> out;
    for (std::size_t i = 0;; ++i) {
        const double a = start + static_cast<double>(i) * step;
        if (a > stop + step * 1e-9) break;
        out.push_back(a);
    }
    return out;
}

inline void print_reliability(std::ostream& out, const std::vector<ReliabilityRow>& rows)
{
    out << "alpha,c,success\n";
    for (const auto& r : rows) out << format_real(r.alpha) << ',' << r.c << ',' << format_real(r.success) << '\n';
}

} // namespace rfid_sampler::harness
#endif
