// rfid_sampler: simulations, verification suites and closed-form reports.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 protocol/runtime
// failure, 4 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rfid_sampler/harness/reports.hpp"
#include "rfid_sampler/harness/results.hpp"
#include "rfid_sampler/harness/scenario.hpp"
#include "rfid_sampler/harness/verify.hpp"
#include "rfid_sampler/select.hpp"

namespace rs = rfid_sampler;
namespace h = rfid_sampler::harness;

namespace
{

constexpr int exit_config = 2;
constexpr int exit_runtime = 3;
constexpr int exit_verify = 4;

/// RFID_SAMPLER_SEED, when set, replaces any configured seed.
bool seed_from_env(std::uint64_t& seed)
{
    const char* env = std::getenv("RFID_SAMPLER_SEED");
    if (!env || !*env) return false;
    try {
        std::size_t used = 0;
        const auto v = std::stoull(env, &used, 0);
        if (env[used] != '\0') throw std::invalid_argument("trailing characters");
        seed = v;
    } catch (const std::exception&) {
        throw rs::config_error(std::string("RFID_SAMPLER_SEED is not an integer: '") + env + "'");
    }
    return true;
}

std::vector<std::uint64_t> parse_counts(const std::string& text, std::size_t K, const char* what)
{
    std::vector<std::uint64_t> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        std::uint64_t x = 0;
        try {
            x = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw rs::config_error(std::string("bad ") + what + " value '" + item + "'");
        v.push_back(x);
    }
    if (v.size() == 1) v.assign(K, v.front());
    if (v.size() != K)
        throw rs::config_error(std::string(what) + " has " + std::to_string(v.size()) + " values but K = " +
                               std::to_string(K));
    return v;
}

std::filesystem::path summary_path(const std::filesystem::path& out)
{
    auto p = out;
    p.replace_filename(out.stem().string() + ".summary" + out.extension().string());
    return p;
}

int cmd_simulate(const std::string& config, const std::string& preset, const std::string& out_path,
                 const std::string& json_path, const std::string& impl_threshold)
{
    auto cfg = preset.empty() ? h::load_config(config) : h::preset_config(preset);
    seed_from_env(cfg.seed);
    if (!impl_threshold.empty())
        cfg.impl_threshold = impl_threshold == "raw" ? rs::ImplThreshold::raw : rs::ImplThreshold::scaled;

    const auto rows = h::run_experiment(cfg);
    const auto summary = h::summarize(rows);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    h::write_csv(out, rows);
    std::ofstream sum(summary_path(out_path), std::ios::binary);
    if (!sum) throw std::runtime_error("cannot write '" + summary_path(out_path).string() + "'");
    h::write_summary_csv(sum, summary);
    if (!json_path.empty()) {
        std::ofstream js(json_path, std::ios::binary);
        if (!js) throw std::runtime_error("cannot write '" + json_path + "'");
        js << h::to_json(rows, summary).dump(2) << '\n';
    }
    std::cerr << rows.size() << " rows written to " << out_path << '\n';
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, bool json)
{
    seed_from_env(seed);
    const auto results = h::run_suite(suite, seed);
    bool all = true;
    for (const auto& r : results) all = all && r.passed;
    if (json) {
        std::cout << h::to_json(results).dump(2) << '\n';
    } else {
        for (const auto& r : results)
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.suite << '/' << r.name << ": " << r.detail << '\n';
        std::cout << (all ? "all checks passed" : "verification failed") << '\n';
    }
    return all ? 0 : exit_verify;
}

int cmd_selgen(std::uint64_t tau, unsigned bits)
{
    const auto filters = rs::selgen_filters(tau, bits);
    const auto cmds = rs::selgen(tau, bits, 0);
    std::cout << "filter,action,encoded\n";
    for (std::size_t i = 0; i < filters.size(); ++i)
        std::cout << filters[i].to_string() << ',' << int{cmds[i].action} << ',' << cmds[i].encode().to_string() << '\n';
    std::cerr << filters.size() << " commands, " << rs::command_cost(cmds) << " bits\n";
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-category RFID sampling: simulation, verification and bounds"};
    app.require_subcommand(1);

    std::string config, preset, out_path, json_path, impl_threshold;
    auto* sim = app.add_subcommand("simulate", "run a scenario config and write per-trial CSV plus a summary CSV");
    auto* cfg_opt = sim->add_option("--config", config, "scenario config file");
    auto* preset_opt = sim->add_option("--preset", preset, "built-in preset instead of a config file");
    cfg_opt->excludes(preset_opt);
    sim->add_option("--out", out_path, "per-trial CSV path")->required();
    sim->add_option("--json", json_path, "optional JSON mirror of rows and summary");
    sim->add_option("--impl-threshold", impl_threshold, "OPT-C_IMPL stage-1 threshold, overrides impl.threshold")
        ->check(CLI::IsMember({"raw", "scaled"}));

    std::string suite;
    std::uint64_t verify_seed = 20240601;
    bool verify_json = false;
    auto* ver = app.add_subcommand("verify", "run a verification suite");
    ver->add_option("suite", suite, "seeds | uniformity | exactness | cost | selgen | monotone | all")->required();
    ver->add_option("--seed", verify_seed, "root seed");
    ver->add_flag("--json", verify_json, "print a JSON report");

    std::uint64_t tau = 0;
    unsigned bits = 0;
    auto* sel = app.add_subcommand("selgen", "print the Select commands covering hash values 0..tau");
    sel->add_option("--tau", tau, "threshold")->required();
    sel->add_option("--bits", bits, "hash width L")->required()->check(CLI::Range(1U, 64U));

    std::size_t K = 0;
    std::string c_text, n_text;
    auto* bnd = app.add_subcommand("bounds", "lower bound and theoretical OPT-C cost");
    bnd->add_option("--k", K, "number of categories")->required()->check(CLI::PositiveNumber);
    bnd->add_option("--c", c_text, "reliability numbers: one value or K comma-separated values")->required();
    bnd->add_option("--n", n_text, "category sizes: one value or K comma-separated values")->required();

    std::string alpha_text;
    double epsilon = 0.01;
    auto* rel = app.add_subcommand("reliability", "reliability number per missing rate");
    rel->add_option("--alpha", alpha_text, "missing rate, or start:stop:step")->required();
    rel->add_option("--epsilon", epsilon, "failure tolerance")->default_val(0.01);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        if (*sim) {
            if (config.empty() && preset.empty()) throw rs::config_error("simulate needs --config or --preset");
            return cmd_simulate(config, preset, out_path, json_path, impl_threshold);
        }
        if (*ver) return cmd_verify(suite, verify_seed, verify_json);
        if (*sel) return cmd_selgen(tau, bits);
        if (*bnd) {
            rs::ProblemSpec spec{parse_counts(n_text, K, "--n"), parse_counts(c_text, K, "--c")};
            h::print_bounds(std::cout, spec, h::bounds_report(spec));
            return 0;
        }
        if (*rel) {
            h::print_reliability(std::cout, h::reliability_report(h::parse_alpha_range(alpha_text), epsilon));
            return 0;
        }
    } catch (const rs::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const rs::argument_error& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_config;
}
