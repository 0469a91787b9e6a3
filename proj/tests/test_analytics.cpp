#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "gwi/analytics.hpp"
#include "gwi/errors.hpp"
#include "gwi/model.hpp"
#include "gwi/oracle.hpp"
#include "gwi/series.hpp"

using namespace gwi;
using namespace gwi::analytics;
using doctest::Approx;

namespace {

GwiModel conjugate_model(double sigma, double gamma) {
    return GwiModel::validate(PgfModel::linear_fractional(gamma),
                              PgfModel::negative_binomial(sigma, gamma));
}

GwiModel poisson_model() {
    return GwiModel::validate(PgfModel::poisson(1.0),
                              PgfModel::negative_binomial(1.0, 0.5));
}

} // namespace

TEST_CASE("law_at routes and labels its source") {
    GwiModel m = conjugate_model(1.0, 1.0);

    Law lo = law_at(m, 600, 32);
    CHECK(lo.source == "closed-form-oracle");
    CHECK(lo.p.size() >= 32);
    for (std::size_t j = 0; j < 32; ++j)
        CHECK(lo.p[j] == Approx(oracle::pmf(1.0, 1.0, 600, j)).epsilon(1e-14));

    Law le = law_at(m, 30, 32);
    CHECK(le.source == "exact-series");
    for (std::size_t j = 0; j < 32; ++j)
        CHECK(le.p[j] == Approx(oracle::pmf(1.0, 1.0, 30, j)).epsilon(1e-10));

    LawOptions force;
    force.route = LawRoute::oracle;
    CHECK_THROWS_AS(law_at(poisson_model(), 10, 8, force), DomainError);

    force.route = LawRoute::engine;
    Law lf = law_at(m, 600, 32, force);
    CHECK(lf.source == "exact-series");
}

TEST_CASE("delta vanishes exactly for the linear-fractional family") {
    GwiModel m = conjugate_model(0.5, 2.0);
    for (double x : {0.0, 0.3, 0.9, 0.999}) {
        CHECK(delta_fn(m, x) == 0.0);
        CHECK(h_n_point(m, x, 50) == 0.0);
    }
}

TEST_CASE("delta and epsilon at zero match hand values") {
    GwiModel p = poisson_model();
    // gamma = 1/2; at x = 0: delta = 1/2 - e^{-1}/(1 - e^{-1}) = 1/2 - 1/(e-1)
    double expect = 0.5 - 1.0 / (std::exp(1.0) - 1.0);
    CHECK(delta_fn(p, 0.0) == Approx(expect).epsilon(1e-12));

    GwiModel lf = conjugate_model(1.0, 1.0);
    // epsilon(x) = gamma^2 u / (1 + gamma u) for this family
    CHECK(epsilon_fn(lf, 0.0) == Approx(0.5).epsilon(1e-13));
    CHECK(epsilon_fn(lf, 0.75) == Approx(0.25 / 1.25).epsilon(1e-12));

    // quadratic offspring: drift is exactly gamma u^2, so epsilon is zero
    GwiModel q = GwiModel::validate(PgfModel::finite_support({0.25, 0.5, 0.25}),
                                    PgfModel::negative_binomial(1.0, 1.0));
    for (double x : {0.0, 0.4, 0.95}) {
        CHECK(epsilon_fn(q, x) == Approx(0.0).scale(1.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(delta_fn(p, 1.0), DomainError);
    CHECK_THROWS_AS(epsilon_fn(p, -0.1), DomainError);
}

TEST_CASE("h_n accumulates delta along the orbit") {
    GwiModel p = poisson_model();
    double x = 0.4;
    double h9 = h_n_point(p, x, 9);
    double a9 = iterate_pgf_point(p.offspring, x, 9);
    CHECK(h_n_point(p, x, 10) == Approx(h9 + delta_fn(p, a9)).epsilon(1e-12));
    CHECK(h_n_point(p, x, 0) == 0.0);
}

TEST_CASE("the reciprocal-survival identity closes to rounding error") {
    GwiModel lf = conjugate_model(1.0, 1.0);
    GwiModel p = poisson_model();
    GwiModel q = GwiModel::validate(PgfModel::finite_support({0.25, 0.5, 0.25}),
                                    PgfModel::negative_binomial(1.0, 1.0));
    for (std::uint64_t n : {10ull, 100ull, 1000ull}) {
        for (double x : {0.0, 0.5, 0.9, 0.99}) {
            CHECK(iteration_identity_residual(lf, x, n) <= 1e-10);
            CHECK(iteration_identity_residual(p, x, n) <= 1e-8 * (1.0 + double(n)));
            CHECK(iteration_identity_residual(q, x, n) <= 1e-8 * (1.0 + double(n)));
        }
    }
}

TEST_CASE("make_seq keeps the trailing half as the plateau") {
    std::vector<SeqPoint> pts = {{10, 4.0}, {20, 4.0}, {40, 8.0}, {80, 8.0}};
    EstimateSeq s = make_seq("demo", pts);
    CHECK(s.label == "demo");
    CHECK(s.plateau_value == Approx(8.0));
    CHECK(s.plateau_spread == Approx(0.0));

    std::vector<SeqPoint> bad = {{20, 1.0}, {10, 2.0}};
    CHECK_THROWS_AS(make_seq("bad", bad), DomainError);

    EstimateSeq one = make_seq("one", {{5, 3.0}});
    CHECK(one.plateau_value == Approx(3.0));
}

TEST_CASE("u_estimate approaches the scaled limit and its fixed point") {
    GwiModel m = conjugate_model(1.0, 1.0);
    std::vector<std::uint64_t> ns = {128, 192, 256, 384, 512};
    UEstimate u = u_estimate(m, 0.5, ns);
    CHECK(u.value == Approx(oracle::u_limit(1.0, 1.0, 0.5)).epsilon(0.02));
    CHECK(std::abs(u.functional_residual) <= 0.02 * u.value);

    UEstimate up = u_estimate(poisson_model(), 0.3, ns);
    CHECK(up.value > 0.0);
    CHECK(std::abs(up.functional_residual) <= 0.05 * up.value);
}

TEST_CASE("mu_estimate approaches the limit coefficients") {
    GwiModel m = conjugate_model(1.0, 1.0);
    std::vector<std::uint64_t> ns = {1000, 2000, 4000};
    for (std::uint64_t j : {1ull, 3ull, 7ull}) {
        EstimateSeq s = mu_estimate(m, j, ns);
        CHECK(s.plateau_value == Approx(oracle::mu(1.0, 1.0, j)).epsilon(0.01));
        CHECK(s.plateau_spread < 0.01);
    }
}

TEST_CASE("harmonic moments carry certified brackets on both routes") {
    GwiModel m = conjugate_model(1.0, 1.0);
    auto nu = nu_n(m, 1000);
    double closed = std::log(1001.0) / 1001.0;
    CHECK(nu.value == Approx(closed).epsilon(1e-13));
    CHECK(nu.bracket <= 1e-12 * nu.value);

    GwiModel mh = conjugate_model(0.5, 1.0);
    auto no = nu_n(mh, 200);
    LawOptions opt;
    opt.route = LawRoute::engine;
    opt.K = 4096;
    auto ne = nu_n(mh, 200, opt);
    CHECK(std::abs(no.value - ne.value) <= no.bracket + ne.bracket + 1e-13);

    auto so = nu_star(mh, 200);
    auto se = nu_star(mh, 200, opt);
    CHECK(std::abs(so.value - se.value) <= so.bracket + se.bracket + 1e-13);

    // 1/Z^2 <= 1/Z on the conditioning event
    double p0 = oracle::pmf(0.5, 1.0, 200, 0);
    CHECK(so.value <= no.value / (1.0 - p0) + 1e-12);
}

TEST_CASE("conditional ratio variance decomposes exactly") {
    GwiModel m = conjugate_model(1.0, 1.0);
    JnParts parts = j_n_exact(m, 5);
    CHECK(parts.total == Approx(parts.formula + parts.mean_shift).epsilon(1e-14));
    CHECK(parts.dx == Approx(m.offspring_variance));
    CHECK(parts.dy == Approx(m.immigration_variance));
    CHECK(parts.nu_cond >= parts.nu_star);

    // rebuild from the law directly
    DistVector d = distribution_at(m, 5, 4096);
    double p0 = d.p[0], s1 = 0.0, s2 = 0.0;
    for (std::size_t j = 1; j < d.p.size(); ++j) {
        s1 += d.p[j] / double(j);
        s2 += d.p[j] / double(j) / double(j);
    }
    double cond = 1.0 - p0;
    double nu_c = s1 / cond, nu_s = s2 / cond;
    double direct = parts.dx * nu_c + (parts.dy + m.beta * m.beta) * nu_s -
                    m.beta * m.beta * nu_c * nu_c;
    CHECK(parts.total == Approx(direct).epsilon(1e-9));
}

TEST_CASE("single-size deviation mass: exact dyadic case") {
    GwiModel m = conjugate_model(1.0, 1.0);
    // k = 1, window [0.5, 1.5]: only S+Y = 1 is accepted;
    // P(S+Y=1) = p0 q1 + p1 q0 = 1/8 + 1/8
    CHECK(a_k_eps(m, 1, 0.5) == 0.75);
}

TEST_CASE("single-size deviation mass matches a direct convolution") {
    for (const GwiModel& m : {conjugate_model(1.0, 1.0), poisson_model()}) {
        for (std::uint64_t k : {2ull, 3ull, 7ull}) {
            for (double eps : {0.25, 0.5, 1.0}) {
                std::uint64_t lo = std::uint64_t(std::ceil(double(k) * (1.0 - eps)));
                std::uint64_t hi = std::uint64_t(std::floor(double(k) * (1.0 + eps)));
                std::size_t len = std::size_t(hi) + 1;

                std::size_t src_len = m.offspring.support_bound(1e-22) + len;
                std::vector<double> pow(src_len, 0.0), coef(src_len, 0.0), tmp(src_len);
                pow[0] = 1.0;
                m.offspring.coeffs(coef);
                for (std::uint64_t rep = 0; rep < k; ++rep) {
                    for (std::size_t i = 0; i < src_len; ++i) {
                        double acc = 0.0;
                        for (std::size_t t = 0; t <= i; ++t) acc += coef[t] * pow[i - t];
                        tmp[i] = acc;
                    }
                    pow.swap(tmp);
                }
                std::vector<double> imm(src_len, 0.0);
                m.immigration.coeffs(imm);
                double window = 0.0;
                for (std::size_t i = lo; i <= hi; ++i) {
                    double acc = 0.0;
                    for (std::size_t t = 0; t <= i; ++t) acc += imm[t] * pow[i - t];
                    window += acc;
                }
                CHECK(a_k_eps(m, k, eps) == Approx(1.0 - window).epsilon(1e-11));
            }
        }
    }
}

TEST_CASE("the sweep equals the one-at-a-time values") {
    GwiModel m = conjugate_model(1.0, 1.0);
    auto sweep = a_k_eps_sweep(m, 40, 0.5);
    REQUIRE(sweep.size() == 41);
    CHECK(sweep[0] == 0.0);
    for (std::uint64_t k = 1; k <= 40; ++k) {
        CHECK(sweep[k] == Approx(a_k_eps(m, k, 0.5)).epsilon(1e-13));
    }
}

TEST_CASE("an undersized window cap only ever raises the mass") {
    GwiModel m = conjugate_model(1.0, 1.0);
    double full = a_k_eps(m, 10, 0.5);
    double capped = a_k_eps(m, 10, 0.5, 12);
    CHECK(capped >= full - 1e-15);
}

TEST_CASE("the exponential-moment bound dominates the exact mass") {
    for (const GwiModel& m : {conjugate_model(1.0, 1.0), conjugate_model(0.5, 2.0),
                              poisson_model()}) {
        for (double eps : {0.25, 0.5}) {
            for (std::uint64_t k : {1ull, 2ull, 5ull, 10ull, 30ull, 100ull}) {
                double bound = a_k_eps_bound(m, k, eps);
                CHECK(bound <= 1.0);
                CHECK(bound >= a_k_eps(m, k, eps) - 1e-15);
            }
            CHECK(a_k_eps_bound(m, 200, eps) < a_k_eps_bound(m, 20, eps));
        }
    }
}

TEST_CASE("ratio deviation probability agrees across law routes") {
    GwiModel m = conjugate_model(1.0, 1.0);
    LawOptions oracle_route, engine_route;
    oracle_route.route = LawRoute::oracle;
    engine_route.route = LawRoute::engine;
    auto vo = ld_ratio_prob(m, 300, 0.5, 400, oracle_route);
    auto ve = ld_ratio_prob(m, 300, 0.5, 400, engine_route);
    CHECK(std::abs(vo.value - ve.value) <= vo.bracket + ve.bracket + 1e-12);
    CHECK(vo.bracket >= 0.0);
    CHECK(ve.bracket >= 0.0);
}

TEST_CASE("q_eps is a plain weighted sum of the single-size masses") {
    GwiModel m = conjugate_model(1.0, 1.0);
    std::vector<double> mu = {0.0, 1.0, 1.0};
    QEps q = q_eps(m, 0.5, mu);
    double expect = a_k_eps(m, 1, 0.5) + a_k_eps(m, 2, 0.5);
    CHECK(q.value == Approx(expect).epsilon(1e-13));
    CHECK(q.last_term_share == Approx(a_k_eps(m, 2, 0.5) / expect).epsilon(1e-12));

    std::vector<double> mu500(501);
    for (std::size_t j = 0; j < mu500.size(); ++j) mu500[j] = oracle::mu(1.0, 1.0, j);
    CHECK(q_eps(m, 0.25, mu500).value > q_eps(m, 0.5, mu500).value);
}

TEST_CASE("kappa splits into a quadrature and a series part") {
    GwiModel m = conjugate_model(0.5, 1.0);
    KappaParts k = kappa(m);
    // integral: 2 * Int_0^1 ((1-s)^{-1/2} - 1)/s ds = 4 ln 2
    CHECK(k.integral_term == Approx(4.0 * std::log(2.0)).epsilon(1e-9));
    CHECK(k.series_term == Approx(0.6840276629).epsilon(1e-6));
    CHECK(k.total == Approx(k.integral_term + k.series_term + k.series_tail).epsilon(1e-12));
    CHECK(k.series_tail < 1e-5);

    CHECK_THROWS_AS(kappa(conjugate_model(1.0, 1.0)), DomainError);
    CHECK_THROWS_AS(kappa(poisson_model()), DomainError);

    // generic entry point with hand-supplied limit data reproduces it
    std::vector<double> mu(10001);
    for (std::size_t j = 0; j < mu.size(); ++j) mu[j] = oracle::mu(0.5, 1.0, j);
    KappaParts g = kappa(
        m, [](double x) { return oracle::u_limit(0.5, 1.0, x); }, mu);
    CHECK(g.total == Approx(k.total).epsilon(1e-10));
}

TEST_CASE("envelope ratios stay pinned for the closed-form family") {
    GwiModel m = conjugate_model(1.0, 1.0);
    std::vector<double> grid = {0.01, 1.0, 50.0, 100.0, 399.0, 400.0};
    auto pts = pgf_envelope(m, 100, grid);
    REQUIRE(pts.size() == grid.size());
    for (const auto& p : pts) {
        CHECK(p.ratio_effective == Approx(1.0).epsilon(1e-9));
        CHECK(p.ratio_literal >= 1.0 - 1e-9);
    }
    // at vanishing s the two normalizers coincide
    CHECK(pts[0].ratio_literal == Approx(1.0).epsilon(1e-3));

    std::vector<double> bad = {0.0};
    CHECK_THROWS_AS(pgf_envelope(m, 100, bad), DomainError);
    std::vector<double> over = {401.0};
    CHECK_THROWS_AS(pgf_envelope(m, 100, over), DomainError);
    std::vector<double> capped = {300.0};
    CHECK_THROWS_AS(pgf_envelope(m, 100, capped, 2.0), DomainError);
}

TEST_CASE("small-generation bound report") {
    GwiModel m = conjugate_model(1.0, 1.0);
    BoundReport r = lower_dev_bound(m, 100, 10);
    CHECK(r.n == 100);
    CHECK(r.k == 10);
    CHECK(r.aux == Approx(0.1));
    CHECK(r.prob_source == "exact-series");  // automatic route stays on the engine here
    CHECK(r.bound == Approx(1.0 / 11.0).epsilon(1e-12));
    double exact = oracle::cdf(1.0, 1.0, 100, 10);
    CHECK(r.probability == Approx(exact).epsilon(1e-12));
    CHECK(r.ratio == Approx(exact * 11.0).epsilon(1e-10));
    CHECK(r.satisfied);

    CHECK_THROWS_AS(lower_dev_bound(m, 100, 0), DomainError);
    CHECK_THROWS_AS(lower_dev_bound(m, 100, 51), DomainError);

    BoundReport e = lower_dev_bound(poisson_model(), 60, 15);
    CHECK(e.prob_source == "exact-series");
    CHECK(e.satisfied);
}

TEST_CASE("large-generation bound value and report") {
    GwiModel m = conjugate_model(1.0, 1.0);
    CHECK(upper_bound_value(m, 50, 500) == Approx(0.00378931).epsilon(1e-5));

    double exact_tail = oracle::tail(1.0, 1.0, 50, 500);
    LawOptions force;
    force.route = LawRoute::oracle;
    BoundReport r = upper_dev_bound(m, 50, 500, force);
    CHECK(r.probability == Approx(exact_tail).epsilon(1e-11));
    CHECK(r.probability == Approx(5.0109e-5).epsilon(1e-3));
    CHECK(r.aux == Approx(500.0 / 2500.0));
    CHECK(r.satisfied);
    CHECK(r.ratio < 0.05);

    // automatic route at n = 50 runs the engine: its interval is one-sided
    // conservative, so it brackets the closed-form value from above
    BoundReport s = upper_dev_bound(m, 50, 500);
    CHECK(s.prob_source == "exact-series");
    CHECK(s.prob_lo <= exact_tail);
    CHECK(s.prob_hi >= exact_tail);
    CHECK(s.prob_hi <= 2.0 * exact_tail);  // leaked mass stays comparable
    CHECK(s.satisfied);

    CHECK_THROWS_AS(upper_bound_value(m, 50, 50), DomainError);
    CHECK_THROWS_AS(upper_bound_value(m, 50, 2500), DomainError);
    GwiModel wide = GwiModel::validate(PgfModel::linear_fractional(0.5),
                                       PgfModel::negative_binomial(1.0, 0.5));
    CHECK_THROWS_AS(upper_bound_value(wide, 10, 90), DomainError);
}

TEST_CASE("running-maximum report consumes a caller-supplied estimate") {
    GwiModel m = conjugate_model(1.0, 1.0);
    mc::McEstimate est;
    est.kind = "probability";
    est.value = 1e-4;
    est.ci_lo = 5e-5;
    est.ci_hi = 2e-4;
    est.reps = 1000000;
    BoundReport r = max_dev_bound(m, 50, 500, est);
    CHECK(r.prob_source == "monte-carlo");
    CHECK(r.bound == Approx(upper_bound_value(m, 50, 500)));
    CHECK(r.satisfied);  // 2e-4 <= 3.79e-3
    est.ci_hi = 0.5;
    CHECK_FALSE(max_dev_bound(m, 50, 500, est).satisfied);
}

TEST_CASE("tilt sequence follows the closed-form backward orbit") {
    GwiModel m = conjugate_model(1.0, 1.0);
    TiltSequence t = tilt_sequence(m, 20, 0.5);
    REQUIRE(t.y.size() == 21);
    double sum = 0.0;
    for (std::uint64_t i = 0; i <= 20; ++i) {
        double closed = 0.5 / (1.0 + double(i) * 0.5);
        CHECK(t.y[i] == Approx(closed).epsilon(1e-10));
        if (i > 0) CHECK(t.y[i] < t.y[i - 1]);
        if (i < 20) sum += t.y[i];
    }
    CHECK(t.sum == Approx(sum).epsilon(1e-12));
    CHECK(t.log_reference == Approx(std::log(11.0)).epsilon(1e-12));
    CHECK(std::abs(t.sum - t.log_reference) <= 0.5 + 1e-12);

    // generic family: verify the defining relation pointwise
    GwiModel p = poisson_model();
    TiltSequence tp = tilt_sequence(p, 15, 0.4);
    for (std::size_t i = 0; i + 1 < tp.y.size(); ++i) {
        double img = p.offspring.eval(1.0 + tp.y[i + 1]);
        CHECK(img == Approx(1.0 + tp.y[i]).epsilon(1e-11));
    }

    CHECK_THROWS_AS(tilt_sequence(m, 10, -0.1), DomainError);
    CHECK_THROWS_AS(tilt_sequence(m, 10, 1.2), DomainError);
    TiltSequence z = tilt_sequence(m, 5, 0.0);
    for (double y : z.y) CHECK(y == 0.0);
}
