#ifndef RFID_SAMPLER_ANALYSIS_HPP
#define RFID_SAMPLER_ANALYSIS_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "cost.hpp"
#include "errors.hpp"

namespace rfid_sampler
{

/// K categories with sizes n_k and reliability numbers c_k.
struct ProblemSpec
{
    std::vector<std::uint64_t> sizes;
    std::vector<std::uint64_t> samples;

    std::size_t k() const noexcept { return sizes.size(); }

    void validate() const
    {
        if (sizes.empty()) throw argument_error("problem needs at least one category");
        if (sizes.size() != samples.size()) throw argument_error("n and c lists differ in length");
        for (std::size_t i = 0; i < sizes.size(); ++i)
            if (samples[i] < 1 || samples[i] > sizes[i])
                throw argument_error("category " + std::to_string(i + 1) + " needs 1 <= c_k <= n_k");
    }
};

/// Gamma = sum_k log2(e) c_k, the fewest reader-to-tag bits any correct protocol sends.
inline double lower_bound_bits(std::span<const std::uint64_t> samples)
{
    if (samples.empty()) throw argument_error("lower bound needs at least one category");
    double total = 0.0;
    for (auto c : samples) {
        if (c < 1) throw argument_error("reliability numbers must be >= 1");
        total += std::numbers::log2e * static_cast<double>(c);
    }
    return total;
}

/// T_lb = T_96 * Gamma / 96.
inline double lower_bound_time(std::span<const std::uint64_t> samples,
                               const TimingModel& timing = TimingModel::standard())
{
    return timing.t96_seconds() * lower_bound_bits(samples) / 96.0;
}

/// Expected OPT-C cost sum_k (e c_k + log2(96 / log2 n_k) + log2 c_k), in bits.
inline double optc_theoretical_bits(const ProblemSpec& spec)
{
    spec.validate();
    double total = 0.0;
    for (std::size_t i = 0; i < spec.k(); ++i) {
        if (spec.sizes[i] < 2) throw argument_error("theoretical cost needs n_k >= 2");
        const auto n = static_cast<double>(spec.sizes[i]);
        const auto c = static_cast<double>(spec.samples[i]);
        total += std::numbers::e * c + std::log2(96.0 / std::log2(n)) + std::log2(c);
    }
    return total;
}

inline double optc_theoretical_time(const ProblemSpec& spec, const TimingModel& timing = TimingModel::standard())
{
    return timing.t96_seconds() * optc_theoretical_bits(spec) / 96.0;
}

/// Smallest integer c with alpha^c <= epsilon.
inline std::uint64_t reliability_number(double alpha, double epsilon)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw argument_error("missing rate must lie in (0, 1)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw argument_error("failure tolerance must lie in (0, 1)");
    const double exact = std::log(1.0 / epsilon) / std::log(1.0 / alpha);
    auto c = static_cast<std::uint64_t>(std::ceil(exact - 1e-12));
    if (c < 1) c = 1;
    while (std::pow(alpha, static_cast<double>(c)) > epsilon * (1.0 + 1e-12)) ++c;
    return c;
}

/**
 *  Probability that a uniform c-sample of n tags, m of them missing, holds at
 *  least one present tag: 1 - (m)_c / (n)_c with falling factorials.
 */
inline double success_probability(std::uint64_t n, std::uint64_t m, std::uint64_t c)
{
    if (m > n) throw argument_error("missing count exceeds category size");
    if (c < 1 || c > n) throw argument_error("need 1 <= c <= n");
    if (m < c) return 1.0;
    double all_missing = 1.0;
    for (std::uint64_t i = 0; i < c; ++i)
        all_missing *= static_cast<double>(m - i) / static_cast<double>(n - i);
    return 1.0 - all_missing;
}

/// The with-replacement approximation 1 - (m/n)^c.
inline double success_probability_approx(std::uint64_t n, std::uint64_t m, std::uint64_t c)
{
    if (m > n || n == 0) throw argument_error("need 0 <= m <= n, n >= 1");
    return 1.0 - std::pow(static_cast<double>(m) / static_cast<double>(n), static_cast<double>(c));
}

// Chernoff tails behind the > 0.4 suitable-seed bound; both decrease in c.

/// mu(c) = e^{3 sqrt c} (1 + 3 sqrt c / (c + 3 sqrt c))^{-c - 6 sqrt c}
inline double mu(double c)
{
    if (!(c >= 1.0)) throw argument_error("mu needs c >= 1");
    const double s = 3.0 * std::sqrt(c);
    return std::exp(s - (c + 2.0 * s) * std::log1p(s / (c + s)));
}

/// rho(c) = e^{-3 sqrt c} (1 - 3 sqrt c / (c + 3 sqrt c))^{-c}
inline double rho(double c)
{
    if (!(c >= 1.0)) throw argument_error("rho needs c >= 1");
    const double s = 3.0 * std::sqrt(c);
    // 1 - s/(c+s) = c/(c+s), so the power is (1 + s/c)^c.
    return std::exp(-s + c * std::log1p(s / c));
}

} // namespace rfid_sampler
#endif
