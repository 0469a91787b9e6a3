#include "gwi/suites.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "gwi/analytics.hpp"
#include "gwi/errors.hpp"
#include "gwi/oracle.hpp"
#include "gwi/series.hpp"
#include "gwi/simulate.hpp"
#include "gwi/util.hpp"

namespace gwi::suites {

namespace {

using analytics::LawOptions;
using config::SuiteParams;
using report::fmt;

// Runs fn(0..count-1); under `parallel`, grid points are distributed over a
// small pool but every result lands at its own index, so output order never
// depends on scheduling.
void for_each_index(std::size_t count, bool parallel,
                    const std::function<void(std::size_t)>& fn) {
    if (!parallel || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>({hw, count, 8});
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// Stable per-grid-point seed: depends only on the configured seed and the
// grid index, never on scheduling, so --parallel byte-reproduces serial runs.
std::uint64_t grid_seed(const SuiteParams& p, std::size_t index) {
    return (p.seed ? *p.seed : 0) + 1000003ull * static_cast<std::uint64_t>(index);
}

SuiteResult make_result(const std::string& suite_name) {
    SuiteResult r;
    r.suite = suite_name;
    r.claim = claim_tag(suite_name);
    return r;
}

void note_failure(SuiteResult& r, const std::string& what) {
    r.passed = false;
    r.failures.push_back(what);
}

void require_grid(const SuiteParams& p, const std::string& suite,
                  const std::string& key) {
    const bool ok = key == "n_list"     ? !p.n_list.empty()
                    : key == "x_grid"   ? !p.x_grid.empty()
                    : key == "s_grid"   ? !p.s_grid.empty()
                    : key == "eps_list" ? !p.eps_list.empty()
                    : key == "k_rule"   ? p.k_rule.has_value()
                    : key == "seed"     ? p.seed.has_value()
                                        : false;
    if (!ok) throw ConfigError("suite '" + suite + "' needs '" + key + "'");
}

report::Meta suite_meta(const GwiModel& model, const std::string& suite,
                        const SuiteParams& p) {
    report::Meta m = report::Meta::standard(model, suite, claim_tag(suite));
    m.set("K", static_cast<std::uint64_t>(p.K));
    m.set("defect_ceiling", 0.0);  // raised below as laws are computed
    m.set("seed", p.seed ? fmt(*p.seed) : std::string("none"));
    return m;
}

void raise_defect(report::Meta& m, double defect) {
    for (const auto& [k, v] : m.items()) {
        if (k == "defect_ceiling") {
            const double old = std::stod(v);
            if (defect > old) m.set("defect_ceiling", defect);
            return;
        }
    }
}

LawOptions law_options(const SuiteParams& p) {
    LawOptions o;
    o.K = p.K;
    return o;
}

// ---------------------------------------------------------------- identity

SuiteResult run_identity(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("identity");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "x_grid");
    const bool lf = model.offspring.family() == PgfFamily::linear_fractional;
    struct Row {
        std::uint64_t n;
        double x, residual, budget;
        bool ok;
    };
    std::vector<Row> rows(p.n_list.size() * p.x_grid.size());
    for_each_index(rows.size(), parallel, [&](std::size_t i) {
        const std::uint64_t n = p.n_list[i / p.x_grid.size()];
        const double x = p.x_grid[i % p.x_grid.size()];
        Row& r = rows[i];
        r.n = n;
        r.x = x;
        r.residual = analytics::iteration_identity_residual(model, x, n);
        r.budget = lf ? 1e-10 : 1e-8 * (1.0 + static_cast<double>(n));
        r.ok = r.residual <= r.budget;
    });
    ReportFile file{"identity", suite_meta(model, res.suite, p), {}};
    file.table.columns = {"n", "x", "residual", "budget", "pass"};
    for (const Row& r : rows) {
        file.table.add_row({fmt(r.n), fmt(r.x), fmt(r.residual), fmt(r.budget),
                            r.ok ? "1" : "0"});
        if (!r.ok) {
            std::ostringstream os;
            os << "identity residual " << r.residual << " > " << r.budget << " at n="
               << r.n << " x=" << r.x;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

// -------------------------------------------------------------------- dist

SuiteResult run_dist(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("dist");
    require_grid(p, res.suite, "n_list");
    struct PerN {
        std::uint64_t n = 0;
        std::size_t K = 0;
        double defect = 0.0;
        double max_abs_err = 0.0;  // vs closed form; conjugate only
        std::vector<double> p_head;
        std::vector<double> oracle_head;
        bool ok = true;
    };
    std::vector<PerN> per(p.n_list.size());
    for_each_index(per.size(), parallel, [&](std::size_t i) {
        PerN& r = per[i];
        r.n = p.n_list[i];
        const std::size_t K = p.K ? p.K : default_truncation(model, r.n);
        r.K = K;
        DistVector law = distribution_at(model, r.n, K, 1.0);
        r.defect = law.mass_defect;
        const std::size_t head = std::min<std::size_t>(law.p.size(), 51);
        r.p_head.assign(law.p.begin(), law.p.begin() + head);
        if (model.conjugate) {
            std::vector<double> ref(law.p.size());
            oracle::pmf_prefix(model.sigma, model.gamma, r.n, ref);
            double worst = 0.0;
            for (std::size_t j = 0; j < law.p.size(); ++j)
                worst = std::max(worst, std::abs(law.p[j] - ref[j]));
            r.max_abs_err = worst;
            r.oracle_head.assign(ref.begin(), ref.begin() + head);
            r.ok = worst <= 1e-9 + r.defect;
        } else {
            r.ok = r.defect <= 1e-6;
        }
    });

    ReportFile summary{"dist", suite_meta(model, res.suite, p), {}};
    summary.table.columns = {"n", "K", "mass_defect", "max_abs_err", "pass"};
    ReportFile pmf{"dist_pmf", suite_meta(model, res.suite, p), {}};
    pmf.table.columns = {"n", "j", "p", "reference", "abs_err"};
    for (const PerN& r : per) {
        raise_defect(summary.meta, r.defect);
        raise_defect(pmf.meta, r.defect);
        summary.table.add_row({fmt(r.n), fmt(static_cast<std::uint64_t>(r.K)),
                               fmt(r.defect), fmt(r.max_abs_err), r.ok ? "1" : "0"});
        if (!r.ok) {
            std::ostringstream os;
            if (model.conjugate)
                os << "law mismatch " << r.max_abs_err << " > 1e-9 + defect at n=" << r.n;
            else
                os << "mass defect " << r.defect << " > 1e-6 at n=" << r.n;
            note_failure(res, os.str());
        }
        for (std::size_t j = 0; j < r.p_head.size(); ++j) {
            const double ref = model.conjugate ? r.oracle_head[j] : 0.0;
            const double err = model.conjugate ? std::abs(r.p_head[j] - ref) : 0.0;
            pmf.table.add_row({fmt(r.n), fmt(static_cast<std::uint64_t>(j)),
                               fmt(r.p_head[j]),
                               model.conjugate ? fmt(ref) : std::string("nan"),
                               model.conjugate ? fmt(err) : std::string("nan")});
        }
    }
    res.reports.push_back(std::move(summary));
    res.reports.push_back(std::move(pmf));
    return res;
}

// ---------------------------------------------------------------- envelope

SuiteResult run_envelope(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("envelope");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "s_grid");
    struct PerN {
        std::uint64_t n;
        std::vector<analytics::EnvelopePoint> pts;
    };
    std::vector<PerN> per(p.n_list.size());
    for_each_index(per.size(), parallel, [&](std::size_t i) {
        const std::uint64_t n = p.n_list[i];
        std::vector<double> s_kept;
        for (double s : p.s_grid)
            if (s > 0.0 && s <= p.s_cap * static_cast<double>(n)) s_kept.push_back(s);
        per[i] = {n, analytics::pgf_envelope(model, n, s_kept, p.s_cap)};
    });
    ReportFile file{"envelope", suite_meta(model, res.suite, p), {}};
    file.meta.set("envelope_lo", p.envelope_lo);
    file.meta.set("envelope_hi", p.envelope_hi);
    file.table.columns = {"n", "s", "ratio_literal", "ratio_effective", "pass"};
    bool any_row = false;
    for (const PerN& r : per) {
        for (const auto& pt : r.pts) {
            any_row = true;
            const bool ok =
                pt.ratio_effective >= p.envelope_lo && pt.ratio_effective <= p.envelope_hi;
            file.table.add_row({fmt(r.n), fmt(pt.s), fmt(pt.ratio_literal),
                                fmt(pt.ratio_effective), ok ? "1" : "0"});
            if (!ok) {
                std::ostringstream os;
                os << "envelope ratio " << pt.ratio_effective << " outside ["
                   << p.envelope_lo << ", " << p.envelope_hi << "] at n=" << r.n
                   << " s=" << pt.s;
                note_failure(res, os.str());
            }
        }
    }
    if (!any_row) note_failure(res, "envelope grid is empty after the s <= cap*n filter");
    res.reports.push_back(std::move(file));
    return res;
}

// ---------------------------------------------------------------------- ld

SuiteResult run_ld(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("ld");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "eps_list");
    struct Cell {
        double prob, scaled, bracket_scaled;
    };
    std::vector<Cell> cells(p.eps_list.size() * p.n_list.size());
    const LawOptions lo = law_options(p);
    for_each_index(cells.size(), parallel, [&](std::size_t i) {
        const double eps = p.eps_list[i / p.n_list.size()];
        const std::uint64_t n = p.n_list[i % p.n_list.size()];
        const ValueWithBracket v =
            analytics::ld_ratio_prob(model, n, eps, p.j_cut, lo);
        const double nd = static_cast<double>(n);
        cells[i] = {v.value, nd * v.value, nd * v.bracket};
    });

    ReportFile file{"ld", suite_meta(model, res.suite, p), {}};
    file.meta.set("j_cut", p.j_cut);
    file.table.columns = {"eps", "n", "prob", "scaled", "scaled_bracket"};
    ReportFile summary{"ld_summary", suite_meta(model, res.suite, p), {}};
    summary.table.columns = {"eps", "plateau", "spread", "reference", "rel_err", "pass"};

    for (std::size_t e = 0; e < p.eps_list.size(); ++e) {
        const double eps = p.eps_list[e];
        std::vector<analytics::SeqPoint> pts;
        for (std::size_t k = 0; k < p.n_list.size(); ++k) {
            const Cell& c = cells[e * p.n_list.size() + k];
            file.table.add_row({fmt(eps), fmt(p.n_list[k]), fmt(c.prob), fmt(c.scaled),
                                fmt(c.bracket_scaled)});
            pts.push_back({p.n_list[k], c.scaled});
        }
        const analytics::EstimateSeq seq = analytics::make_seq("ld", std::move(pts));
        bool ok = seq.plateau_spread <= p.plateau_tol;
        if (!ok) {
            std::ostringstream os;
            os << "scaled deviation probability not flat: spread " << seq.plateau_spread
               << " > " << p.plateau_tol << " at eps=" << eps;
            note_failure(res, os.str());
        }
        double ref = std::numeric_limits<double>::quiet_NaN();
        double rel = std::numeric_limits<double>::quiet_NaN();
        if (model.conjugate) {
            std::vector<double> mu(static_cast<std::size_t>(p.j_cut) + 1);
            for (std::size_t j = 0; j < mu.size(); ++j)
                mu[j] = oracle::mu(model.sigma, model.gamma, j);
            const analytics::QEps q = analytics::q_eps(model, eps, mu);
            ref = q.value;
            rel = std::abs(seq.plateau_value / ref - 1.0);
            if (rel > p.match_tol) {
                std::ostringstream os;
                os << "plateau " << seq.plateau_value << " vs series reference " << ref
                   << " differ by " << rel << " > " << p.match_tol << " at eps=" << eps;
                note_failure(res, os.str());
                ok = false;
            }
        }
        summary.table.add_row({fmt(eps), fmt(seq.plateau_value), fmt(seq.plateau_spread),
                               fmt(ref), fmt(rel), ok ? "1" : "0"});
    }
    res.reports.push_back(std::move(file));
    res.reports.push_back(std::move(summary));
    return res;
}

// ---------------------------------------------------------------- variance

SuiteResult run_variance(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("variance");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "seed");
    struct Row {
        std::uint64_t n;
        analytics::JnParts parts;
        mc::McEstimate est;
        bool ok;
    };
    std::vector<Row> rows(p.n_list.size());
    const LawOptions lo = law_options(p);
    for_each_index(rows.size(), parallel, [&](std::size_t i) {
        Row& r = rows[i];
        r.n = p.n_list[i];
        r.parts = analytics::j_n_exact(model, r.n, lo);
        mc::McOptions opt;
        opt.reps = p.reps;
        opt.seed = grid_seed(p, i);
        r.est = mc::mc_conditional_ratio_variance(model, r.n, opt);
        const double half = 0.5 * (r.est.ci_hi - r.est.ci_lo);
        r.ok = std::abs(r.parts.total - r.est.value) <=
               3.0 * half + r.parts.bracket + 1e-14;
    });
    ReportFile file{"variance", suite_meta(model, res.suite, p), {}};
    file.table.columns = {"n",         "exact",    "formula", "mean_shift",
                          "nu_cond",   "nu_star",  "bracket", "mc",
                          "mc_ci_lo",  "mc_ci_hi", "reps",    "pass"};
    for (const Row& r : rows) {
        file.table.add_row({fmt(r.n), fmt(r.parts.total), fmt(r.parts.formula),
                            fmt(r.parts.mean_shift), fmt(r.parts.nu_cond),
                            fmt(r.parts.nu_star), fmt(r.parts.bracket), fmt(r.est.value),
                            fmt(r.est.ci_lo), fmt(r.est.ci_hi), fmt(r.est.reps),
                            r.ok ? "1" : "0"});
        if (!r.ok) {
            std::ostringstream os;
            os << "exact variance " << r.parts.total << " outside 3 CI half-widths of MC "
               << r.est.value << " at n=" << r.n;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

// ------------------------------------------------------------------- lower

SuiteResult run_lower(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("lower");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "k_rule");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> grid;
    for (std::uint64_t n : p.n_list) {
        const std::uint64_t k = std::max<std::uint64_t>(1, p.k_rule->eval(n));
        if (2 * k <= n) grid.emplace_back(n, k);
    }
    if (grid.empty()) {
        note_failure(res, "k rule leaves no (n, k) with k <= n/2");
        return res;
    }
    std::vector<analytics::BoundReport> rows(grid.size());
    const LawOptions lo = law_options(p);
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        rows[i] = analytics::lower_dev_bound(model, grid[i].first, grid[i].second,
                                             p.slack, lo);
    });
    ReportFile file{"lower", suite_meta(model, res.suite, p), {}};
    file.meta.set("k_rule", p.k_rule->text);
    file.meta.set("slack", p.slack);
    file.table.columns = {"n", "k", "prob", "bound", "ratio", "source", "pass"};
    for (const auto& r : rows) {
        file.table.add_row({fmt(r.n), fmt(r.k), fmt(r.probability), fmt(r.bound),
                            fmt(r.ratio), r.prob_source, r.satisfied ? "1" : "0"});
        if (!r.satisfied) {
            std::ostringstream os;
            os << "small-generation probability exceeds " << p.slack
               << " times its bound at n=" << r.n << " k=" << r.k;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

// ------------------------------------------------------------------- upper

SuiteResult run_upper(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("upper");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "k_rule");
    require_grid(p, res.suite, "seed");
    struct Row {
        analytics::BoundReport exact;
        mc::McEstimate est;
        bool ok;
    };
    std::vector<std::pair<std::uint64_t, std::uint64_t>> grid;
    for (std::uint64_t n : p.n_list) grid.emplace_back(n, p.k_rule->eval(n));
    std::vector<Row> rows(grid.size());
    const LawOptions lo = law_options(p);
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        Row& r = rows[i];
        const auto [n, k] = grid[i];
        r.exact = analytics::upper_dev_bound(model, n, k, lo);
        mc::McOptions opt;
        opt.reps = p.reps;
        opt.seed = grid_seed(p, i);
        r.est = mc::mc_tail(model, n, k, opt);
        r.ok = r.exact.satisfied && r.est.ci_hi <= r.exact.bound;
    });
    ReportFile file{"upper", suite_meta(model, res.suite, p), {}};
    file.meta.set("k_rule", p.k_rule->text);
    file.table.columns = {"n",     "k",        "prob",     "bound", "ratio",
                          "source", "mc",      "mc_ci_hi", "reps",  "pass"};
    for (const Row& r : rows) {
        file.table.add_row({fmt(r.exact.n), fmt(r.exact.k), fmt(r.exact.probability),
                            fmt(r.exact.bound), fmt(r.exact.ratio), r.exact.prob_source,
                            fmt(r.est.value), fmt(r.est.ci_hi), fmt(r.est.reps),
                            r.ok ? "1" : "0"});
        if (!r.ok) {
            std::ostringstream os;
            os << "upper tail not dominated by its bound at n=" << r.exact.n
               << " k=" << r.exact.k;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

// --------------------------------------------------------------------- max

SuiteResult run_max(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("max");
    require_grid(p, res.suite, "n_list");
    require_grid(p, res.suite, "k_rule");
    require_grid(p, res.suite, "seed");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> grid;
    for (std::uint64_t n : p.n_list) grid.emplace_back(n, p.k_rule->eval(n));
    std::vector<analytics::BoundReport> rows(grid.size());
    for_each_index(grid.size(), parallel, [&](std::size_t i) {
        const auto [n, k] = grid[i];
        mc::McOptions opt;
        opt.reps = p.reps;
        opt.seed = grid_seed(p, i);
        const mc::McEstimate est = mc::mc_max_tail(model, n, k, opt);
        rows[i] = analytics::max_dev_bound(model, n, k, est);
    });
    ReportFile file{"max", suite_meta(model, res.suite, p), {}};
    file.meta.set("k_rule", p.k_rule->text);
    file.table.columns = {"n", "k", "mc", "mc_ci_lo", "mc_ci_hi", "bound", "pass"};
    for (const auto& r : rows) {
        file.table.add_row({fmt(r.n), fmt(r.k), fmt(r.probability), fmt(r.prob_lo),
                            fmt(r.prob_hi), fmt(r.bound), r.satisfied ? "1" : "0"});
        if (!r.satisfied) {
            std::ostringstream os;
            os << "running-maximum tail CI exceeds the bound at n=" << r.n
               << " k=" << r.k;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

// ---------------------------------------------------------------------- nu

SuiteResult run_nu(const GwiModel& model, const SuiteParams& p, bool parallel) {
    SuiteResult res = make_result("nu");
    require_grid(p, res.suite, "n_list");
    struct Row {
        std::uint64_t n;
        ValueWithBracket nu;
        double scaled;
    };
    std::vector<Row> rows(p.n_list.size());
    const LawOptions lo = law_options(p);
    const double sigma = model.sigma;
    for_each_index(rows.size(), parallel, [&](std::size_t i) {
        Row& r = rows[i];
        r.n = p.n_list[i];
        r.nu = analytics::nu_n(model, r.n, lo);
        const double nd = static_cast<double>(r.n);
        if (sigma < 1.0)
            r.scaled = std::pow(nd, sigma) * r.nu.value;
        else if (sigma == 1.0)
            r.scaled = (nd + 1.0) / std::log(nd + 1.0) * r.nu.value;
        else
            r.scaled = nd * r.nu.value;
    });
    ReportFile file{"nu", suite_meta(model, res.suite, p), {}};
    file.meta.set("scaling", sigma < 1.0    ? "n^sigma * nu"
                             : sigma == 1.0 ? "(n+1)/log(n+1) * nu"
                                            : "n * nu");
    file.table.columns = {"n", "nu", "bracket", "scaled", "pass"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        bool ok = r.nu.bracket <= 0.01 * r.nu.value + 1e-15;
        if (i > 0 && r.nu.value >= rows[i - 1].nu.value) ok = false;
        file.table.add_row(
            {fmt(r.n), fmt(r.nu.value), fmt(r.nu.bracket), fmt(r.scaled), ok ? "1" : "0"});
        if (!ok) {
            std::ostringstream os;
            os << "harmonic moment not certified decreasing at n=" << r.n;
            note_failure(res, os.str());
        }
    }
    res.reports.push_back(std::move(file));
    return res;
}

} // namespace

const std::string& claim_tag(const std::string& suite_name) {
    static const std::map<std::string, std::string> tags = {
        {"identity", "iteration-identity"},
        {"dist", "distribution-recursion-oracle"},
        {"envelope", "pgf-envelope"},
        {"ld", "ratio-deviation-limit"},
        {"variance", "conditional-ratio-variance"},
        {"lower", "lower-deviation-bound"},
        {"upper", "upper-deviation-bound"},
        {"max", "running-maximum-bound"},
        {"nu", "harmonic-moment-decay"},
    };
    const auto it = tags.find(suite_name);
    if (it == tags.end()) throw DomainError("unknown suite: " + suite_name);
    return it->second;
}

std::vector<std::string> required_grids(const std::string& suite_name) {
    if (suite_name == "identity") return {"n_list", "x_grid"};
    if (suite_name == "dist") return {"n_list"};
    if (suite_name == "envelope") return {"n_list", "s_grid"};
    if (suite_name == "ld") return {"n_list", "eps_list"};
    if (suite_name == "variance") return {"n_list", "seed"};
    if (suite_name == "lower") return {"n_list", "k_rule"};
    if (suite_name == "upper") return {"n_list", "k_rule", "seed"};
    if (suite_name == "max") return {"n_list", "k_rule", "seed"};
    if (suite_name == "nu") return {"n_list"};
    throw DomainError("unknown suite: " + suite_name);
}

SuiteResult run_suite(const std::string& suite_name, const GwiModel& model,
                      const config::SuiteParams& params, bool parallel) {
    if (suite_name == "identity") return run_identity(model, params, parallel);
    if (suite_name == "dist") return run_dist(model, params, parallel);
    if (suite_name == "envelope") return run_envelope(model, params, parallel);
    if (suite_name == "ld") return run_ld(model, params, parallel);
    if (suite_name == "variance") return run_variance(model, params, parallel);
    if (suite_name == "lower") return run_lower(model, params, parallel);
    if (suite_name == "upper") return run_upper(model, params, parallel);
    if (suite_name == "max") return run_max(model, params, parallel);
    if (suite_name == "nu") return run_nu(model, params, parallel);
    throw DomainError("unknown suite: " + suite_name);
}

} // namespace gwi::suites
