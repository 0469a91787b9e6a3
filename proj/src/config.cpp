#include "gwi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gwi/errors.hpp"

namespace gwi::config {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& msg) {
    std::ostringstream os;
    os << origin << ": line " << line << ": " << msg;
    throw ConfigError(os.str());
}

// Decimal or fraction ("3/2").
double parse_rational(const std::string& s, const std::string& origin, std::size_t line) {
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return v;
        }
        const std::string num = trim(s.substr(0, slash));
        const std::string den = trim(s.substr(slash + 1));
        const double n = std::stod(num, &used);
        if (used != num.size()) throw std::invalid_argument(num);
        const double d = std::stod(den, &used);
        if (used != den.size() || d == 0.0) throw std::invalid_argument(den);
        return n / d;
    } catch (const std::exception&) {
        fail(origin, line, "cannot parse number '" + s + "'");
    }
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

struct RawSection {
    std::map<std::string, std::string> kv;
    std::map<std::string, std::size_t> key_line;
    std::size_t line = 0;
};

struct RawConfig {
    std::string origin;
    std::map<std::string, RawSection> sections;
};

RawConfig tokenize(const std::string& text, const std::string& origin) {
    RawConfig raw;
    raw.origin = origin;
    std::istringstream is(text);
    std::string line;
    std::string section;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, lineno, "empty section name");
            if (raw.sections.count(section))
                fail(origin, lineno, "duplicate section [" + section + "]");
            raw.sections[section].line = lineno;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value'");
        if (section.empty()) fail(origin, lineno, "key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        if (value.empty()) fail(origin, lineno, "empty value for '" + key + "'");
        RawSection& sec = raw.sections[section];
        if (sec.kv.count(key))
            fail(origin, lineno, "duplicate key '" + key + "' in [" + section + "]");
        sec.kv[key] = value;
        sec.key_line[key] = lineno;
    }
    return raw;
}

class SectionReader {
public:
    SectionReader(const RawConfig& raw, const std::string& name, const RawSection& sec)
        : origin_(raw.origin), name_(name), sec_(sec) {}

    bool has(const std::string& key) const { return sec_.kv.count(key) != 0; }

    std::string str(const std::string& key) {
        mark(key);
        const auto it = sec_.kv.find(key);
        if (it == sec_.kv.end())
            fail(origin_, sec_.line, "[" + name_ + "] is missing required key '" + key + "'");
        return it->second;
    }

    double num(const std::string& key) {
        const std::string v = str(key);
        return parse_rational(v, origin_, line_of(key));
    }

    std::uint64_t uint(const std::string& key) {
        const double v = num(key);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
            fail(origin_, line_of(key), "'" + key + "' must be a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    }

    std::vector<double> num_list(const std::string& key) {
        const std::string v = str(key);
        std::vector<double> out;
        for (const std::string& tok : split_ws(v))
            out.push_back(parse_rational(tok, origin_, line_of(key)));
        if (out.empty()) fail(origin_, line_of(key), "'" + key + "' list is empty");
        return out;
    }

    std::size_t line_of(const std::string& key) const {
        const auto it = sec_.key_line.find(key);
        return it == sec_.key_line.end() ? sec_.line : it->second;
    }

    void mark(const std::string& key) { seen_.push_back(key); }

    void reject_unknown() const {
        for (const auto& [key, value] : sec_.kv) {
            if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
                fail(origin_, line_of(key), "unknown key '" + key + "' in [" + name_ + "]");
        }
    }

private:
    const std::string& origin_;
    std::string name_;
    const RawSection& sec_;
    std::vector<std::string> seen_;
};

PgfModel parse_model_section(const RawConfig& raw, const std::string& name) {
    const auto it = raw.sections.find(name);
    if (it == raw.sections.end())
        throw ConfigError(raw.origin + ": missing required section [" + name + "]");
    SectionReader r(raw, name, it->second);
    const std::string family = r.str("family");
    PgfModel out = [&] {
        if (family == "lf" || family == "linear-fractional")
            return PgfModel::linear_fractional(r.num("gamma"));
        if (family == "nb" || family == "negative-binomial")
            return PgfModel::negative_binomial(r.num("sigma"), r.num("gamma"));
        if (family == "poisson") return PgfModel::poisson(r.num("mean"));
        if (family == "finite") return PgfModel::finite_support(r.num_list("probs"));
        fail(raw.origin, it->second.line,
             "unknown family '" + family + "' (expected lf | nb | poisson | finite)");
    }();
    r.reject_unknown();
    return out;
}

void apply_param(SuiteParams& p, const std::string& key, const std::string& value,
                 const std::string& origin, std::size_t line) {
    const auto nums = [&] {
        std::vector<double> out;
        for (const std::string& tok : split_ws(value))
            out.push_back(parse_rational(tok, origin, line));
        if (out.empty()) fail(origin, line, "'" + key + "' list is empty");
        return out;
    };
    const auto one = [&] {
        return parse_rational(value, origin, line);
    };
    const auto one_uint = [&] {
        const double v = one();
        if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19)
            fail(origin, line, "'" + key + "' must be a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    };
    if (key == "n_list") {
        p.n_list.clear();
        for (double v : nums()) {
            if (!(v >= 1.0) || v != std::floor(v))
                fail(origin, line, "n_list entries must be positive integers");
            p.n_list.push_back(static_cast<std::uint64_t>(v));
        }
        if (!std::is_sorted(p.n_list.begin(), p.n_list.end()))
            fail(origin, line, "n_list must be increasing");
    } else if (key == "k_rule") {
        try {
            p.k_rule = parse_k_rule(value);
        } catch (const ConfigError& e) {
            fail(origin, line, e.what());
        }
    } else if (key == "eps_list") {
        p.eps_list = nums();
    } else if (key == "x_grid") {
        p.x_grid = nums();
    } else if (key == "s_grid") {
        p.s_grid = nums();
    } else if (key == "K") {
        p.K = static_cast<std::size_t>(one_uint());
    } else if (key == "reps") {
        p.reps = one_uint();
        if (p.reps < 1) fail(origin, line, "reps must be >= 1");
    } else if (key == "seed") {
        p.seed = one_uint();
    } else if (key == "j_cut") {
        p.j_cut = one_uint();
    } else if (key == "plateau_tol") {
        p.plateau_tol = one();
    } else if (key == "match_tol") {
        p.match_tol = one();
    } else if (key == "slack") {
        p.slack = one();
    } else if (key == "envelope_lo") {
        p.envelope_lo = one();
    } else if (key == "envelope_hi") {
        p.envelope_hi = one();
    } else if (key == "s_cap") {
        p.s_cap = one();
    } else {
        fail(origin, line, "unknown key '" + key + "'");
    }
}

const std::vector<std::string> kRunOnlyKeys = {"suite", "out", "format"};
const std::vector<std::string> kParamKeys = {
    "n_list", "k_rule", "eps_list", "x_grid", "s_grid", "K",   "reps",
    "seed",   "j_cut",  "plateau_tol", "match_tol", "slack",
    "envelope_lo", "envelope_hi", "s_cap"};

} // namespace

std::uint64_t KRule::eval(std::uint64_t n) const {
    const double v = c * std::pow(static_cast<double>(n), p);
    if (!(v >= 1.0)) return 1;
    if (v > 9.0e15) throw DomainError("k rule overflows at n = " + std::to_string(n));
    return static_cast<std::uint64_t>(std::llround(v));
}

KRule parse_k_rule(const std::string& text) {
    // Accepted shapes: "c", "n", "n^p", "c*n", "c*n^p" (whitespace free-form,
    // c and p decimal or fraction).
    std::string s;
    for (char ch : text)
        if (ch != ' ' && ch != '\t') s.push_back(ch);
    if (s.empty()) throw ConfigError("empty k rule");
    KRule rule;
    rule.text = s;
    const auto npos = s.find('n');
    if (npos == std::string::npos) {
        rule.p = 0.0;
        rule.c = parse_rational(s, "k rule", 0);
        return rule;
    }
    std::string coef = s.substr(0, npos);
    if (!coef.empty()) {
        if (coef.back() != '*') throw ConfigError("expected '*' before n in k rule '" + text + "'");
        coef.pop_back();
        rule.c = coef.empty() ? 1.0 : parse_rational(coef, "k rule", 0);
    }
    std::string rest = s.substr(npos + 1);
    if (!rest.empty()) {
        if (rest.front() != '^') throw ConfigError("expected '^' after n in k rule '" + text + "'");
        rule.p = parse_rational(rest.substr(1), "k rule", 0);
    }
    return rule;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "identity", "dist", "envelope", "ld", "variance",
        "lower",    "upper", "max",     "nu"};
    return names;
}

bool suite_uses_monte_carlo(const std::string& suite_name) {
    return suite_name == "variance" || suite_name == "upper" || suite_name == "max";
}

SuiteParams Experiment::params_for(const std::string& suite_name) const {
    SuiteParams p = base;
    const auto it = suite_overrides.find(suite_name);
    if (it != suite_overrides.end())
        for (const auto& [key, value] : it->second)
            apply_param(p, key, value, "suite override [" + suite_name + "]", 0);
    return p;
}

Experiment parse_text(const std::string& text, const std::string& origin) {
    const RawConfig raw = tokenize(text, origin);
    Experiment exp{GwiModel::validate(parse_model_section(raw, "offspring"),
                                      parse_model_section(raw, "immigration"))};

    const auto run_it = raw.sections.find("run");
    if (run_it == raw.sections.end())
        throw ConfigError(origin + ": missing required section [run]");
    SectionReader run(raw, "run", run_it->second);
    if (run.has("suite")) {
        exp.suite = run.str("suite");
        const auto& names = suite_names();
        if (exp.suite != "all" &&
            std::find(names.begin(), names.end(), exp.suite) == names.end())
            fail(origin, run.line_of("suite"), "unknown suite '" + exp.suite + "'");
    } else {
        run.mark("suite");
    }
    if (run.has("out")) exp.out_dir = run.str("out");
    run.mark("out");
    if (run.has("format")) {
        exp.format = run.str("format");
        if (exp.format != "csv" && exp.format != "json" && exp.format != "both")
            fail(origin, run.line_of("format"), "format must be csv | json | both");
    }
    run.mark("format");
    for (const std::string& key : kParamKeys) {
        if (!run.has(key)) continue;
        apply_param(exp.base, key, run.str(key), origin, run.line_of(key));
    }
    run.reject_unknown();

    for (const auto& [name, sec] : raw.sections) {
        if (name == "offspring" || name == "immigration" || name == "run") continue;
        if (name.rfind("suite.", 0) != 0)
            fail(origin, sec.line, "unknown section [" + name + "]");
        const std::string suite_name = name.substr(6);
        const auto& names = suite_names();
        if (std::find(names.begin(), names.end(), suite_name) == names.end())
            fail(origin, sec.line, "unknown suite section [" + name + "]");
        for (const auto& [key, value] : sec.kv) {
            if (std::find(kParamKeys.begin(), kParamKeys.end(), key) == kParamKeys.end())
                fail(origin, sec.key_line.at(key), "unknown key '" + key + "' in [" + name + "]");
            // Validate eagerly so bad values carry line numbers.
            SuiteParams probe = exp.base;
            apply_param(probe, key, value, origin, sec.key_line.at(key));
            exp.suite_overrides[suite_name][key] = value;
        }
    }
    return exp;
}

Experiment parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

} // namespace gwi::config
