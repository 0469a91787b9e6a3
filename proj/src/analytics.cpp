#include "gwi/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gwi/errors.hpp"
#include "gwi/kernels.hpp"
#include "gwi/oracle.hpp"
#include "gwi/util.hpp"

namespace gwi::analytics {

namespace {

constexpr const char* kSourceSeries = "exact-series";
constexpr const char* kSourceOracle = "closed-form-oracle";

bool use_oracle(const GwiModel& model, std::uint64_t n, const LawOptions& opt) {
    if (opt.route == LawRoute::oracle) {
        if (!model.conjugate)
            throw DomainError("closed-form law route requires the conjugate family");
        return true;
    }
    if (opt.route == LawRoute::engine) return false;
    return model.conjugate && n > opt.engine_max_n;
}

void check_unit_interval(double x) {
    if (!(x >= 0.0) || x >= 1.0) throw DomainError("argument must lie in [0, 1)");
}

} // namespace

// ----------------------------------------------------------------------------
// Law access
// ----------------------------------------------------------------------------

Law law_at(const GwiModel& model, std::uint64_t n, std::size_t need,
           const LawOptions& opt) {
    if (need == 0) need = 1;
    Law out;
    out.n = n;
    if (use_oracle(model, n, opt)) {
        out.p.resize(need);
        oracle::pmf_prefix(model.sigma, model.gamma, n, out.p);
        out.defect = oracle::tail(model.sigma, model.gamma, n, need);
        out.source = kSourceOracle;
        return out;
    }
    std::size_t K = opt.K ? opt.K : default_truncation(model, n);
    K = std::max(K, need - 1);
    DistVector d = distribution_at(model, n, K, opt.defect_budget);
    out.p = std::move(d.p);
    out.defect = d.mass_defect;
    if (out.p.size() < need) out.p.resize(need, 0.0);
    out.source = kSourceSeries;
    return out;
}

// ----------------------------------------------------------------------------
// Drift corrections
// ----------------------------------------------------------------------------

namespace {

// delta at u = 1 - x for a non-linear-fractional offspring law.
double delta_at_u(const PgfModel& off, double gamma, double u) {
    const double d = off.drift(u);
    const double s = off.survival(u);
    return gamma - d / (s * u);
}

} // namespace

double delta_fn(const GwiModel& model, double x) {
    check_unit_interval(x);
    if (model.offspring.family() == PgfFamily::linear_fractional) return 0.0;
    return delta_at_u(model.offspring, model.gamma, 1.0 - x);
}

double epsilon_fn(const GwiModel& model, double x) {
    check_unit_interval(x);
    const double u = 1.0 - x;
    return model.gamma - model.offspring.drift(u) / (u * u);
}

double h_n_point(const GwiModel& model, double x, std::uint64_t n) {
    check_unit_interval(x);
    if (model.offspring.family() == PgfFamily::linear_fractional) return 0.0;
    double u = 1.0 - x;
    NeumaierSum h;
    for (std::uint64_t m = 0; m < n; ++m) {
        h.add(delta_at_u(model.offspring, model.gamma, u));
        u = model.offspring.survival(u);
    }
    return h.value();
}

double iteration_identity_residual(const GwiModel& model, double x, std::uint64_t n) {
    check_unit_interval(x);
    const double u0 = 1.0 - x;
    double un;
    double h = 0.0;
    if (model.offspring.family() == PgfFamily::linear_fractional) {
        un = model.offspring.iterated_survival(u0, n);
    } else {
        double u = u0;
        NeumaierSum acc;
        for (std::uint64_t m = 0; m < n; ++m) {
            acc.add(delta_at_u(model.offspring, model.gamma, u));
            u = model.offspring.survival(u);
        }
        un = u;
        h = acc.value();
    }
    const double lhs = 1.0 / u0 + static_cast<double>(n) * model.gamma;
    return std::abs(lhs - 1.0 / un - h);
}

// ----------------------------------------------------------------------------
// Scaled sequences
// ----------------------------------------------------------------------------

EstimateSeq make_seq(std::string label, std::vector<SeqPoint> points) {
    if (points.empty()) throw DomainError("estimate sequence needs at least one point");
    for (std::size_t i = 1; i < points.size(); ++i)
        if (points[i].n <= points[i - 1].n)
            throw DomainError("estimate sequence requires strictly increasing n");
    EstimateSeq seq;
    seq.label = std::move(label);
    seq.points = std::move(points);
    const std::size_t start = seq.points.size() / 2;
    double lo = seq.points[start].value;
    double hi = lo;
    NeumaierSum mean;
    for (std::size_t i = start; i < seq.points.size(); ++i) {
        const double v = seq.points[i].value;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean.add(v);
    }
    const double m = mean.value() / static_cast<double>(seq.points.size() - start);
    seq.plateau_value = m;
    seq.plateau_spread = (m == 0.0) ? 0.0 : (hi - lo) / std::abs(m);
    return seq;
}

namespace {

double scaled_h(const GwiModel& model, std::uint64_t n, double x) {
    return std::exp(model.sigma * std::log(static_cast<double>(n)) + pgf_H_log(model, n, x));
}

} // namespace

UEstimate u_estimate(const GwiModel& model, double x,
                     std::span<const std::uint64_t> n_list) {
    check_unit_interval(x);
    if (n_list.empty()) throw DomainError("u_estimate: empty generation list");
    std::vector<SeqPoint> pts, pts_image;
    pts.reserve(n_list.size());
    pts_image.reserve(n_list.size());
    const double xa = model.offspring.eval(x);
    for (std::uint64_t n : n_list) {
        if (n == 0) throw DomainError("u_estimate: generations must be >= 1");
        pts.push_back({n, scaled_h(model, n, x)});
        pts_image.push_back({n, scaled_h(model, n, xa)});
    }
    UEstimate out;
    out.seq = make_seq("u_scaled", std::move(pts));
    out.value = out.seq.plateau_value;
    out.value_at_image = make_seq("u_scaled_image", std::move(pts_image)).plateau_value;
    out.functional_residual = model.immigration.eval(x) * out.value_at_image - out.value;
    return out;
}

EstimateSeq mu_estimate(const GwiModel& model, std::uint64_t j,
                        std::span<const std::uint64_t> n_list, const LawOptions& opt) {
    if (n_list.empty()) throw DomainError("mu_estimate: empty generation list");
    std::vector<SeqPoint> pts;
    pts.reserve(n_list.size());
    for (std::uint64_t n : n_list) {
        const Law law = law_at(model, n, static_cast<std::size_t>(j) + 1, opt);
        const double scale = std::exp(model.sigma * std::log(static_cast<double>(n)));
        pts.push_back({n, scale * law.p[static_cast<std::size_t>(j)]});
    }
    return make_seq("mu_" + std::to_string(j), std::move(pts));
}

// ----------------------------------------------------------------------------
// Inverse moments
// ----------------------------------------------------------------------------

namespace {

struct InverseMoments {
    double p0 = 0.0;
    double s1 = 0.0;       // sum_{j>=1} p_j / j
    double s2 = 0.0;       // sum_{j>=1} p_j / j^2
    double rem1 = 0.0;     // certified bounds on the dropped tails
    double rem2 = 0.0;
    double defect = 0.0;   // engine route only: truncation defect
};

// Closed-form route: direct summation of the negative-binomial law with a
// geometric majorant for the stopping remainder.
InverseMoments inverse_moments_oracle(const GwiModel& model, std::uint64_t n) {
    const double sigma = model.sigma;
    const double gn = model.gamma * static_cast<double>(n);
    InverseMoments m;
    if (n == 0) {
        m.p0 = 1.0;
        return m;
    }
    const double q = gn / (1.0 + gn);
    double pk = std::exp(-sigma * std::log1p(gn));
    m.p0 = pk;
    NeumaierSum s1, s2;
    const double mode = sigma * gn;
    for (std::uint64_t k = 1; k < 30000000ull; ++k) {
        const double kd = static_cast<double>(k);
        pk *= q * (sigma + kd - 1.0) / kd;
        s1.add(pk / kd);
        s2.add(pk / (kd * kd));
        const double r = q * (sigma + kd) / (kd + 1.0);
        if (kd > mode && r < 1.0) {
            const double r_sup = std::max(q, r);
            const double rem_mass = pk * r_sup / (1.0 - r_sup);
            const double rem1 = rem_mass / (kd + 1.0);
            const double rem2 = rem_mass / ((kd + 1.0) * (kd + 1.0));
            if (rem1 <= 1e-15 * s1.value() + 1e-300 &&
                rem2 <= 1e-15 * s2.value() + 1e-300) {
                m.s1 = s1.value();
                m.s2 = s2.value();
                m.rem1 = rem1;
                m.rem2 = rem2;
                return m;
            }
        }
    }
    throw NumericalError("inverse moment summation did not terminate");
}

InverseMoments inverse_moments_engine(const GwiModel& model, std::uint64_t n,
                                      const LawOptions& opt) {
    LawOptions o = opt;
    o.route = LawRoute::engine;
    const Law law = law_at(model, n, 2, o);
    InverseMoments m;
    m.p0 = law.p.empty() ? 0.0 : law.p[0];
    NeumaierSum s1, s2;
    for (std::size_t j = 1; j < law.p.size(); ++j) {
        const double jd = static_cast<double>(j);
        s1.add(law.p[j] / jd);
        s2.add(law.p[j] / (jd * jd));
    }
    m.s1 = s1.value();
    m.s2 = s2.value();
    // Mass the truncation lost can sit anywhere from j = 1 up, so the whole
    // defect is the certified tail bound for both sums.
    m.rem1 = law.defect;
    m.rem2 = law.defect;
    m.defect = law.defect;
    return m;
}

InverseMoments inverse_moments(const GwiModel& model, std::uint64_t n,
                               const LawOptions& opt) {
    if (use_oracle(model, n, opt)) return inverse_moments_oracle(model, n);
    return inverse_moments_engine(model, n, opt);
}

} // namespace

ValueWithBracket nu_n(const GwiModel& model, std::uint64_t n, const LawOptions& opt) {
    if (n == 0) throw DomainError("nu_n: requires n >= 1");
    if (use_oracle(model, n, opt) && model.sigma == 1.0) {
        const double gn = model.gamma * static_cast<double>(n);
        const double v = std::log1p(gn) / (1.0 + gn);
        return {v, 4e-16 * v};
    }
    const InverseMoments m = inverse_moments(model, n, opt);
    return {m.s1, m.rem1};
}

ValueWithBracket nu_star(const GwiModel& model, std::uint64_t n, const LawOptions& opt) {
    if (n == 0) throw DomainError("nu_star: requires n >= 1");
    const InverseMoments m = inverse_moments(model, n, opt);
    const double cond = 1.0 - m.p0;
    if (!(cond > 0.0)) throw DegenerateConditioning("nu_star: P(Z_n >= 1) is zero");
    const double cond_lo = std::max(1e-300, cond - m.defect);
    const double v = m.s2 / cond;
    const double hi = (m.s2 + m.rem2) / cond_lo;
    return {v, hi - v};
}

JnParts j_n_exact(const GwiModel& model, std::uint64_t n, const LawOptions& opt) {
    if (n == 0) throw DomainError("j_n_exact: requires n >= 1");
    const InverseMoments m = inverse_moments(model, n, opt);
    const double cond = 1.0 - m.p0;
    if (!(cond > 0.0)) throw DegenerateConditioning("j_n_exact: P(Z_n >= 1) is zero");
    const double cond_lo = std::max(1e-300, cond - m.defect);
    JnParts parts;
    parts.dx = model.offspring_variance;
    parts.dy = model.immigration_variance;
    parts.nu_cond = m.s1 / cond;
    parts.nu_star = m.s2 / cond;
    const double beta2 = model.beta * model.beta;
    parts.formula = parts.dx * parts.nu_cond + parts.dy * parts.nu_star;
    parts.mean_shift = beta2 * (parts.nu_star - parts.nu_cond * parts.nu_cond);
    parts.total = parts.formula + parts.mean_shift;
    const double br1 = (m.s1 + m.rem1) / cond_lo - parts.nu_cond;
    const double br2 = (m.s2 + m.rem2) / cond_lo - parts.nu_star;
    parts.bracket = parts.dx * br1 + (parts.dy + beta2) * br2 +
                    beta2 * 2.0 * parts.nu_cond * br1;
    return parts;
}

// ----------------------------------------------------------------------------
// Single-step deviation probabilities
// ----------------------------------------------------------------------------

namespace {

constexpr std::size_t kWindowMax = std::size_t{1} << 26;

std::vector<double> pgf_kernel(const PgfModel& f, std::size_t width) {
    const std::size_t sb = f.support_bound(1e-18);
    std::vector<double> k(std::min(width, sb + 1));
    if (k.empty()) k.resize(1);
    f.coeffs(k);
    return k;
}

struct Window {
    std::size_t lo;
    std::size_t hi;
};

Window deviation_window(std::uint64_t k, double eps) {
    const double kd = static_cast<double>(k);
    const double w = eps * kd;
    const double hi_d = std::floor(kd + w);
    const double lo_d = std::ceil(kd - w);
    if (hi_d > static_cast<double>(kWindowMax))
        throw DomainError("deviation window too large for dense convolution");
    Window win;
    win.lo = lo_d <= 0.0 ? 0 : static_cast<std::size_t>(lo_d);
    win.hi = static_cast<std::size_t>(hi_d);
    return win;
}

double window_complement(std::span<const double> dist, const Window& win) {
    NeumaierSum inside;
    for (std::size_t t = win.lo; t < dist.size() && t <= win.hi; ++t) inside.add(dist[t]);
    return std::clamp(1.0 - inside.value(), 0.0, 1.0);
}

} // namespace

double a_k_eps(const GwiModel& model, std::uint64_t k, double eps, std::size_t K) {
    if (k == 0) throw DomainError("a_k_eps: requires k >= 1");
    if (!(eps > 0.0)) throw DomainError("a_k_eps: eps must be positive");
    const Window win = deviation_window(k, eps);
    const std::size_t W = (K == 0) ? win.hi : std::min(win.hi, K);
    const std::vector<double> a = pgf_kernel(model.offspring, W + 1);
    const std::vector<double> b = pgf_kernel(model.immigration, W + 1);
    std::vector<double> s(W + 1, 0.0), tmp(W + 1, 0.0);
    s[0] = 1.0;
    for (std::uint64_t i = 0; i < k; ++i) {
        kernels::conv_trunc(tmp.data(), s.data(), s.size(), a.data(), a.size());
        s.swap(tmp);
    }
    kernels::conv_trunc(tmp.data(), s.data(), s.size(), b.data(), b.size());
    return window_complement(tmp, win);
}

std::vector<double> a_k_eps_sweep(const GwiModel& model, std::uint64_t k_max, double eps) {
    if (k_max == 0) throw DomainError("a_k_eps_sweep: requires k_max >= 1");
    if (!(eps > 0.0)) throw DomainError("a_k_eps_sweep: eps must be positive");
    const Window top = deviation_window(k_max, eps);
    const std::size_t W = top.hi;
    const std::vector<double> a = pgf_kernel(model.offspring, W + 1);
    const std::vector<double> b = pgf_kernel(model.immigration, W + 1);
    std::vector<double> s(W + 1, 0.0), tmp(W + 1, 0.0), withb(W + 1, 0.0);
    s[0] = 1.0;
    std::vector<double> out(static_cast<std::size_t>(k_max) + 1, 0.0);
    for (std::uint64_t k = 1; k <= k_max; ++k) {
        kernels::conv_trunc(tmp.data(), s.data(), s.size(), a.data(), a.size());
        s.swap(tmp);
        const Window win = deviation_window(k, eps);
        const std::size_t wk = win.hi + 1;
        kernels::conv_trunc(withb.data(), s.data(), wk, b.data(), b.size());
        out[static_cast<std::size_t>(k)] =
            window_complement(std::span<const double>(withb.data(), wk), win);
    }
    return out;
}

namespace {

// Golden-section minimum of a convex function on [lo, hi].
double golden_min(const std::function<double(double)>& f, double lo, double hi, int iters) {
    const double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters; ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? x1 : x2;
}

// One-sided exponential-moment bound at tilt t for the event
// S_k + Y >= (1+eps) k (t > 0) or <= (1-eps) k (t < 0). Returns the pair
// (log bound at k, per-individual slope); any t in the domain is sound.
struct TiltValue {
    double log_at_k;
    double slope;
};

TiltValue tilt_log_bound(const GwiModel& model, double kd, double eps, double t) {
    const double xt = std::exp(t);
    const double av = model.offspring.eval(xt);
    const double bv = model.immigration.eval(xt);
    if (!(av > 0.0) || !std::isfinite(av) || !(bv > 0.0) || !std::isfinite(bv))
        return {std::numeric_limits<double>::infinity(), 0.0};
    const double target = (t > 0.0) ? (1.0 + eps) : (1.0 - eps);
    const double slope = std::log(av) - target * t;
    return {std::log(bv) + kd * slope, slope};
}

} // namespace

double a_k_eps_bound(const GwiModel& model, std::uint64_t k, double eps) {
    if (k == 0) throw DomainError("a_k_eps_bound: requires k >= 1");
    if (!(eps > 0.0)) throw DomainError("a_k_eps_bound: eps must be positive");
    const double kd = static_cast<double>(k);
    const double rmin = std::min(model.offspring.radius(), model.immigration.radius());

    double up = 1.0;
    if (rmin > 1.0 + 1e-12) {
        const double tmax = std::min(60.0, std::log(rmin) * (1.0 - 1e-9));
        const auto g = [&](double t) { return tilt_log_bound(model, kd, eps, t).log_at_k; };
        const double t = golden_min(g, 1e-9, tmax, 90);
        const TiltValue v = tilt_log_bound(model, kd, eps, t);
        if (v.slope < 0.0) up = std::min(1.0, std::exp(v.log_at_k));
    }

    double lo = 0.0;
    if (eps < 1.0) {
        lo = 1.0;
        const auto g = [&](double t) { return tilt_log_bound(model, kd, eps, t).log_at_k; };
        const double t = golden_min(g, -60.0, -1e-9, 90);
        const TiltValue v = tilt_log_bound(model, kd, eps, t);
        if (v.slope < 0.0) lo = std::min(1.0, std::exp(v.log_at_k));
    }
    return std::min(1.0, up + lo);
}

ValueWithBracket ld_ratio_prob(const GwiModel& model, std::uint64_t n, double eps,
                               std::uint64_t j_cut, const LawOptions& opt) {
    if (n == 0) throw DomainError("ld_ratio_prob: requires n >= 1");
    if (j_cut == 0) throw DomainError("ld_ratio_prob: requires j_cut >= 1");
    const bool oracle_route = use_oracle(model, n, opt);
    const Law law = law_at(model, n, static_cast<std::size_t>(j_cut) + 1, opt);
    const std::vector<double> dev = a_k_eps_sweep(model, j_cut, eps);
    const double p0 = law.p[0];
    const double cond = 1.0 - p0;
    if (!(cond > 0.0)) throw DegenerateConditioning("ld_ratio_prob: P(Z_n >= 1) is zero");
    NeumaierSum main, seen;
    seen.add(p0);
    for (std::uint64_t j = 1; j <= j_cut; ++j) {
        main.add(dev[static_cast<std::size_t>(j)] * law.p[static_cast<std::size_t>(j)]);
        seen.add(law.p[static_cast<std::size_t>(j)]);
    }
    double bracket;
    if (oracle_route) {
        const double beyond = oracle::tail(model.sigma, model.gamma, n, j_cut + 1);
        bracket = beyond * a_k_eps_bound(model, j_cut + 1, eps) / cond;
    } else {
        // Engine tail includes both the states beyond j_cut and the mass the
        // truncation lost anywhere, so no envelope can be applied to it.
        bracket = std::max(0.0, 1.0 - seen.value()) / cond;
    }
    return {main.value() / cond, bracket};
}

QEps q_eps(const GwiModel& model, double eps, std::span<const double> mu) {
    if (mu.size() < 2) throw DomainError("q_eps: needs mu up to at least j = 1");
    const std::uint64_t j_cut = mu.size() - 1;
    const std::vector<double> dev = a_k_eps_sweep(model, j_cut, eps);
    NeumaierSum acc;
    for (std::uint64_t j = 1; j <= j_cut; ++j)
        acc.add(dev[static_cast<std::size_t>(j)] * mu[static_cast<std::size_t>(j)]);
    QEps out;
    out.value = acc.value();
    out.last_term_share =
        out.value > 0.0 ? dev[static_cast<std::size_t>(j_cut)] *
                              mu[static_cast<std::size_t>(j_cut)] / out.value
                        : 0.0;
    return out;
}

// ----------------------------------------------------------------------------
// kappa
// ----------------------------------------------------------------------------

KappaParts kappa(const GwiModel& model, const std::function<double(double)>& u_fn,
                 std::span<const double> mu) {
    const double sigma = model.sigma;
    if (!(sigma > 0.0) || sigma >= 1.0)
        throw DomainError("kappa: defined only for sigma < 1");
    if (mu.size() < 3) throw DomainError("kappa: needs mu up to at least j = 2");
    const double gamma = model.gamma;
    const double dy = model.immigration_variance;
    const double u0 = u_fn(0.0);

    const double delta = 1e-6;
    const double h = 1e-4;
    // Left strip: int_0^delta (U - U0)/s ds = U(delta) - U0 + O(delta^2).
    const double strip = u_fn(delta) - u0;
    const double body = integrate_simpson(
        [&](double s) { return (u_fn(s) - u0) / s; }, delta, 1.0 - h, 1e-10, 48);
    // Endpoint: U(s) ~ c (1-s)^{-sigma}; integrate the asymptote against
    // 1/s = 1 + (1-s) + O((1-s)^2) analytically.
    const double c = u_fn(1.0 - h) * std::pow(h, sigma);
    const double tail = c * (std::pow(h, 1.0 - sigma) / (1.0 - sigma) +
                             std::pow(h, 2.0 - sigma) / (2.0 - sigma)) +
                        u0 * std::log1p(-h);

    KappaParts parts;
    parts.integral_term = 2.0 * gamma * (strip + body + tail);
    NeumaierSum series;
    const std::size_t jmax = mu.size() - 1;
    for (std::size_t j = 1; j <= jmax; ++j)
        series.add(mu[j] / (static_cast<double>(j) * static_cast<double>(j)));
    parts.series_term = dy * series.value();
    parts.series_tail = dy * mu[jmax] / (static_cast<double>(jmax) * (2.0 - sigma));
    parts.total = parts.integral_term + parts.series_term + parts.series_tail;
    return parts;
}

KappaParts kappa(const GwiModel& model) {
    if (!model.conjugate)
        throw DomainError("kappa: closed-form providers need the conjugate family");
    const double sigma = model.sigma;
    const double gamma = model.gamma;
    std::vector<double> mu(10001);
    for (std::size_t j = 0; j < mu.size(); ++j)
        mu[j] = oracle::mu(sigma, gamma, j);
    return kappa(model, [&](double s) { return oracle::u_limit(sigma, gamma, s); }, mu);
}

// ----------------------------------------------------------------------------
// PGF envelope
// ----------------------------------------------------------------------------

std::vector<EnvelopePoint> pgf_envelope(const GwiModel& model, std::uint64_t n,
                                        std::span<const double> s_grid,
                                        double s_cap_factor) {
    if (n == 0) throw DomainError("pgf_envelope: requires n >= 1");
    const double nd = static_cast<double>(n);
    std::vector<EnvelopePoint> out;
    out.reserve(s_grid.size());
    for (double s : s_grid) {
        if (!(s > 0.0) || s > s_cap_factor * nd)
            throw DomainError("pgf_envelope: s outside (0, cap*n]");
        const double x = std::exp(-s / nd);
        const double u = -std::expm1(-s / nd);
        const double lg = pgf_H_log(model, n, x);
        EnvelopePoint pt;
        pt.s = s;
        pt.ratio_literal = std::exp(lg + model.sigma * std::log1p(model.gamma * s));
        pt.ratio_effective = std::exp(lg + model.sigma * std::log1p(model.gamma * nd * u));
        out.push_back(pt);
    }
    return out;
}

// ----------------------------------------------------------------------------
// Deviation bounds
// ----------------------------------------------------------------------------

BoundReport lower_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                            double slack, const LawOptions& opt) {
    if (k == 0) throw DomainError("lower_dev_bound: requires k >= 1");
    if (2 * k > n)
        throw DomainError("lower_dev_bound: requires k <= n/2 (small-generation regime)");
    BoundReport rpt;
    rpt.n = n;
    rpt.k = k;
    rpt.slack = slack;
    rpt.aux = static_cast<double>(k) / static_cast<double>(n);
    rpt.bound = std::exp(-model.sigma *
                         std::log1p(model.gamma * static_cast<double>(n) / static_cast<double>(k)));
    if (use_oracle(model, n, opt)) {
        const double p = oracle::cdf(model.sigma, model.gamma, n, k);
        rpt.probability = p;
        rpt.prob_lo = p * (1.0 - 1e-13);
        rpt.prob_hi = p * (1.0 + 1e-13);
        rpt.prob_source = kSourceOracle;
    } else {
        const Law law = law_at(model, n, static_cast<std::size_t>(k) + 1, opt);
        NeumaierSum acc;
        for (std::size_t j = 0; j <= k; ++j) acc.add(law.p[j]);
        rpt.probability = acc.value();
        rpt.prob_lo = rpt.probability;
        rpt.prob_hi = std::min(1.0, rpt.probability + law.defect);
        rpt.prob_source = kSourceSeries;
    }
    rpt.ratio = rpt.probability / rpt.bound;
    rpt.satisfied = rpt.prob_hi <= slack * rpt.bound;
    return rpt;
}

double upper_bound_value(const GwiModel& model, std::uint64_t n, std::uint64_t k) {
    if (n == 0) throw DomainError("upper_bound_value: requires n >= 1");
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double gamma = model.gamma;
    const double rmin = std::min(model.offspring.radius(), model.immigration.radius());
    if (!(rmin > 1.0))
        throw DomainError("upper_bound_value: needs convergence radius > 1");
    if (!std::isfinite(model.rho))
        throw DomainError("upper_bound_value: needs a finite third factorial moment");
    if (kd <= nd || kd >= nd * nd)
        throw DomainError("upper_bound_value: requires n < k < n^2");
    const double y0 = kd / (gamma * gamma * nd * nd) - 1.0 / (gamma * nd);
    if (!(y0 > 0.0))
        throw DomainError("upper_bound_value: tilt origin not positive at this (n, k)");
    if (!(y0 < rmin - 1.0))
        throw DomainError("upper_bound_value: tilt origin outside the convergence radius");
    const double bp = model.immigration.eval(1.0 + y0, 1);
    const double lam = 1.0 - model.rho / (6.0 * gamma * gamma);
    const double log_bound = (bp / gamma) * std::log(kd / (gamma * nd)) - kd / (gamma * nd) +
                             1.0 - (lam / gamma) * (kd / (nd * nd)) * std::log(kd / nd);
    return std::exp(log_bound);
}

BoundReport upper_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                            const LawOptions& opt) {
    BoundReport rpt;
    rpt.n = n;
    rpt.k = k;
    rpt.slack = 1.0;
    rpt.aux = static_cast<double>(k) / (static_cast<double>(n) * static_cast<double>(n));
    rpt.bound = upper_bound_value(model, n, k);
    if (use_oracle(model, n, opt)) {
        const double p = oracle::tail(model.sigma, model.gamma, n, k);
        rpt.probability = p;
        rpt.prob_lo = p * (1.0 - 1e-13);
        rpt.prob_hi = p * (1.0 + 1e-13);
        rpt.prob_source = kSourceOracle;
    } else {
        const Law law = law_at(model, n, static_cast<std::size_t>(k), opt);
        NeumaierSum below;
        for (std::size_t j = 0; j < k; ++j) below.add(law.p[j]);
        const double hi = std::clamp(1.0 - below.value(), 0.0, 1.0);
        rpt.probability = hi;
        rpt.prob_lo = std::max(0.0, hi - law.defect);
        rpt.prob_hi = hi;
        rpt.prob_source = kSourceSeries;
    }
    rpt.ratio = rpt.probability / rpt.bound;
    rpt.satisfied = rpt.prob_hi <= rpt.bound;
    return rpt;
}

BoundReport max_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                          const mc::McEstimate& est) {
    BoundReport rpt;
    rpt.n = n;
    rpt.k = k;
    rpt.slack = 1.0;
    rpt.aux = static_cast<double>(k) / (static_cast<double>(n) * static_cast<double>(n));
    rpt.bound = upper_bound_value(model, n, k);
    rpt.probability = est.value;
    rpt.prob_lo = est.ci_lo;
    rpt.prob_hi = est.ci_hi;
    rpt.prob_source = "monte-carlo";
    rpt.ratio = rpt.probability / rpt.bound;
    rpt.satisfied = rpt.prob_hi <= rpt.bound;
    return rpt;
}

// ----------------------------------------------------------------------------
// Tilt sequence
// ----------------------------------------------------------------------------

TiltSequence tilt_sequence(const GwiModel& model, std::uint64_t n, double y0,
                           std::string y0_rule) {
    if (!(y0 >= 0.0)) throw DomainError("tilt_sequence: y0 must be nonnegative");
    if (!(y0 < model.offspring.radius() - 1.0))
        throw DomainError("tilt_sequence: y0 must lie below radius - 1");
    if (!std::isfinite(model.rho))
        throw DomainError("tilt_sequence: needs a finite third factorial moment");
    TiltSequence seq;
    seq.y0_rule = std::move(y0_rule);
    seq.y.resize(static_cast<std::size_t>(n) + 1);
    seq.y[0] = y0;
    const bool lf = model.offspring.family() == PgfFamily::linear_fractional;
    const double gamma = model.gamma;
    const double dmax = std::max(1.0, model.offspring.eval(1.0 + y0, 1));
    NeumaierSum total;
    for (std::uint64_t m = 0; m < n; ++m) {
        const double ym = seq.y[static_cast<std::size_t>(m)];
        total.add(ym);
        double next;
        if (ym == 0.0) {
            next = 0.0;
        } else if (lf) {
            next = ym / (1.0 + gamma * ym);
        } else {
            next = solve_bracketed(
                [&](double z) { return model.offspring.eval(1.0 + z) - (1.0 + ym); }, 0.0,
                ym, 1e-13 / dmax);
        }
        seq.y[static_cast<std::size_t>(m) + 1] = next;
    }
    seq.sum = total.value();
    seq.log_reference = std::log1p(gamma * static_cast<double>(n) * y0) / gamma;
    return seq;
}

} // namespace gwi::analytics
