#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gwi/model.hpp"

namespace gwi::config {

// Generation-size rule k_n = round(c * n^p), with c and p given as decimals
// or as fractions like "3/2". Written form is kept for report metadata.
struct KRule {
    double c = 1.0;
    double p = 1.0;
    std::string text = "1*n^1";

    std::uint64_t eval(std::uint64_t n) const;
};

KRule parse_k_rule(const std::string& text);

// Grid and budget parameters one suite run consumes. [run] supplies the
// defaults; a [suite.<name>] section overrides any subset for that suite.
struct SuiteParams {
    std::vector<std::uint64_t> n_list;
    std::optional<KRule> k_rule;
    std::vector<double> eps_list;
    std::vector<double> x_grid;
    std::vector<double> s_grid;
    std::size_t K = 0;  // 0: auto-sized per generation
    std::uint64_t reps = 100000;
    std::optional<std::uint64_t> seed;
    std::uint64_t j_cut = 500;
    double plateau_tol = 0.10;
    double match_tol = 0.10;
    double slack = 10.0;
    double envelope_lo = 0.2;
    double envelope_hi = 2.0;
    double s_cap = 4.0;
};

struct Experiment {
    explicit Experiment(GwiModel m) : model(std::move(m)) {}

    GwiModel model;
    std::string suite = "all";  // selector, possibly "all"
    SuiteParams base;
    std::map<std::string, std::map<std::string, std::string>> suite_overrides;
    std::string out_dir = "reports";
    std::string format = "csv";  // csv | json | both

    // Base params with any [suite.<name>] overrides applied.
    SuiteParams params_for(const std::string& suite_name) const;
};

// All selectable suites, in canonical execution order.
const std::vector<std::string>& suite_names();
bool suite_uses_monte_carlo(const std::string& suite_name);

// Parse a config file. Throws ConfigError with "line N:" diagnostics on
// malformed input, unknown keys, or failed model validation.
Experiment parse_file(const std::string& path);
Experiment parse_text(const std::string& text, const std::string& origin);

} // namespace gwi::config
