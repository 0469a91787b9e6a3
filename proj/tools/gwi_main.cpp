#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gwi/config.hpp"
#include "gwi/errors.hpp"
#include "gwi/oracle.hpp"
#include "gwi/report.hpp"
#include "gwi/suites.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitAssert = 2;

std::optional<std::uint64_t> env_seed() {
    const char* raw = std::getenv("GWI_SEED");
    if (!raw || !*raw) return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') throw gwi::ConfigError("GWI_SEED is not an integer");
    return static_cast<std::uint64_t>(v);
}

int cmd_run(const std::string& config_path, const std::string& suite_flag,
            const std::string& out_flag, bool parallel) {
    gwi::config::Experiment exp = gwi::config::parse_file(config_path);
    if (!suite_flag.empty()) {
        const auto& names = gwi::config::suite_names();
        if (suite_flag != "all" &&
            std::find(names.begin(), names.end(), suite_flag) == names.end())
            throw gwi::ConfigError("unknown suite '" + suite_flag + "'");
        exp.suite = suite_flag;
    }
    if (!out_flag.empty()) exp.out_dir = out_flag;
    const std::optional<std::uint64_t> seed_override = env_seed();

    std::vector<std::string> selected;
    if (exp.suite == "all")
        selected = gwi::config::suite_names();
    else
        selected.push_back(exp.suite);

    // Validate everything before any suite runs.
    std::vector<gwi::config::SuiteParams> params;
    params.reserve(selected.size());
    for (const std::string& name : selected) {
        gwi::config::SuiteParams p = exp.params_for(name);
        if (seed_override) p.seed = seed_override;
        for (const std::string& key : gwi::suites::required_grids(name)) {
            const bool ok = key == "n_list"     ? !p.n_list.empty()
                            : key == "x_grid"   ? !p.x_grid.empty()
                            : key == "s_grid"   ? !p.s_grid.empty()
                            : key == "eps_list" ? !p.eps_list.empty()
                            : key == "k_rule"   ? p.k_rule.has_value()
                            : key == "seed"     ? p.seed.has_value()
                                                : false;
            if (ok) continue;
            if (key == "seed")
                throw gwi::ConfigError("seed required for monte-carlo suites");
            throw gwi::ConfigError("suite '" + name + "' needs '" + key + "'");
        }
        params.push_back(std::move(p));
    }

    bool all_passed = true;
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const gwi::suites::SuiteResult res =
            gwi::suites::run_suite(selected[i], exp.model, params[i], parallel);
        std::vector<std::string> written;
        for (const auto& file : res.reports) {
            const std::filesystem::path base =
                std::filesystem::path(exp.out_dir) / file.name;
            if (exp.format == "csv" || exp.format == "both") {
                std::filesystem::path p = base;
                p += ".csv";
                gwi::report::write_csv(p, file.meta, file.table);
                gwi::report::write_sidecar(p);
                written.push_back(p.string());
            }
            if (exp.format == "json" || exp.format == "both") {
                std::filesystem::path p = base;
                p += ".json";
                gwi::report::write_json(p, file.meta, file.table);
                gwi::report::write_sidecar(p);
                written.push_back(p.string());
            }
        }
        std::printf("[%s] %s  %s", res.suite.c_str(), res.passed ? "PASS" : "FAIL",
                    res.claim.c_str());
        for (const std::string& w : written) std::printf("  %s", w.c_str());
        std::printf("\n");
        for (const std::string& f : res.failures)
            std::printf("    %s\n", f.c_str());
        if (!res.passed) all_passed = false;
    }
    return all_passed ? kExitOk : kExitAssert;
}

int cmd_oracle(const std::string& family, double sigma, double gamma, std::uint64_t n) {
    if (family != "conjugate")
        throw gwi::ConfigError("only --family conjugate has closed-form references");
    if (!(sigma > 0.0) || !(gamma > 0.0))
        throw gwi::ConfigError("oracle needs sigma > 0 and gamma > 0");
    using gwi::report::fmt;
    std::printf("family = conjugate\n");
    std::printf("sigma = %s\n", fmt(sigma).c_str());
    std::printf("gamma = %s\n", fmt(gamma).c_str());
    std::printf("n = %s\n", fmt(n).c_str());
    std::printf("mean = %s\n", fmt(gwi::oracle::mean(sigma, gamma, n)).c_str());
    std::printf("p0 = %s\n", fmt(gwi::oracle::pmf(sigma, gamma, n, 0)).c_str());
    std::printf("survival = %s\n", fmt(gwi::oracle::tail(sigma, gamma, n, 1)).c_str());
    std::printf("nu = %s\n", fmt(gwi::oracle::nu(sigma, gamma, n)).c_str());
    for (std::uint64_t j = 0; j < 10; ++j)
        std::printf("p[%llu] = %s\n", static_cast<unsigned long long>(j),
                    fmt(gwi::oracle::pmf(sigma, gamma, n, j)).c_str());
    for (std::uint64_t j = 1; j <= 5; ++j)
        std::printf("mu[%llu] = %s\n", static_cast<unsigned long long>(j),
                    fmt(gwi::oracle::mu(sigma, gamma, j)).c_str());
    std::printf("h(0.5) = %s\n", fmt(gwi::oracle::h_point(sigma, gamma, n, 0.5)).c_str());
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"critical branching-with-immigration laws, limits, and bounds"};
    app.require_subcommand(1);

    std::string config_path, suite_flag, out_flag;
    bool parallel = false;
    CLI::App* run = app.add_subcommand("run", "run verification suites from a config");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--suite", suite_flag, "override the configured suite selector");
    run->add_flag("--parallel", parallel, "run independent grid points concurrently");
    run->add_option("--out", out_flag, "override the configured output directory");

    std::string family;
    double sigma = 0.0, gamma = 0.0;
    std::uint64_t n = 0;
    CLI::App* orc = app.add_subcommand("oracle", "print closed-form reference values");
    orc->add_option("--family", family, "model family (conjugate)")->required();
    orc->add_option("--sigma", sigma, "immigration shape")->required();
    orc->add_option("--gamma", gamma, "offspring spread")->required();
    orc->add_option("--n", n, "generation")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, suite_flag, out_flag, parallel);
        return cmd_oracle(family, sigma, gamma, n);
    } catch (const gwi::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
}
