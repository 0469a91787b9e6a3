#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwi/errors.hpp"
#include "gwi/pgf.hpp"

using namespace gwi;
using doctest::Approx;

TEST_CASE("linear-fractional values and derivatives") {
    for (double g : {0.5, 1.0, 2.0}) {
        PgfModel a = PgfModel::linear_fractional(g);
        for (double x : {0.0, 0.3, 0.9, 1.0}) {
            double expect = 1.0 - (1.0 - x) / (1.0 + g * (1.0 - x));
            CHECK(a.eval(x) == Approx(expect).epsilon(1e-14));
        }
        CHECK(a.mean() == Approx(1.0).epsilon(1e-13));
        CHECK(a.second_factorial() == Approx(2.0 * g).epsilon(1e-12));
        CHECK(a.third_factorial() == Approx(6.0 * g * g).epsilon(1e-12));
        CHECK(a.variance() == Approx(2.0 * g).epsilon(1e-12));
        CHECK(a.radius() == Approx(1.0 + 1.0 / g));
    }
}

TEST_CASE("linear-fractional coefficients are the shifted geometric law") {
    double g = 0.7;
    PgfModel a = PgfModel::linear_fractional(g);
    CHECK(a.coeff(0) == Approx(g / (1.0 + g)).epsilon(1e-14));
    for (std::uint64_t j = 1; j <= 25; ++j) {
        double expect = std::pow(g, double(j - 1)) / std::pow(1.0 + g, double(j + 1));
        CHECK(a.coeff(j) == Approx(expect).epsilon(1e-12));
    }
    std::vector<double> head(8);
    a.coeffs(head);
    // bulk fill uses the ratio recurrence, pointwise uses powers: ulp-level gap
    for (std::uint64_t j = 0; j < head.size(); ++j)
        CHECK(head[j] == Approx(a.coeff(j)).epsilon(1e-13));
}

TEST_CASE("negative binomial matches its closed form") {
    double s = 1.5, g = 2.0;
    PgfModel b = PgfModel::negative_binomial(s, g);
    for (double x : {0.0, 0.5, 0.99}) {
        CHECK(b.eval(x) == Approx(std::pow(1.0 + g * (1.0 - x), -s)).epsilon(1e-14));
    }
    CHECK(b.mean() == Approx(s * g).epsilon(1e-13));
    CHECK(b.second_factorial() == Approx(s * (s + 1.0) * g * g).epsilon(1e-12));
    CHECK(b.variance() == Approx(s * g * (1.0 + g)).epsilon(1e-12));
    CHECK(b.radius() == Approx(1.0 + 1.0 / g));

    // p_{j+1}/p_j = (s+j)/(j+1) * g/(1+g)
    double q = g / (1.0 + g);
    double p = std::pow(1.0 + g, -s);
    for (std::uint64_t j = 0; j <= 30; ++j) {
        CHECK(b.coeff(j) == Approx(p).epsilon(1e-11));
        p *= (s + double(j)) / double(j + 1) * q;
    }
}

TEST_CASE("poisson matches its closed form") {
    PgfModel b = PgfModel::poisson(1.3);
    CHECK(b.eval(0.4) == Approx(std::exp(1.3 * (0.4 - 1.0))).epsilon(1e-14));
    CHECK(b.mean() == Approx(1.3));
    CHECK(b.second_factorial() == Approx(1.3 * 1.3).epsilon(1e-13));
    CHECK(b.variance() == Approx(1.3).epsilon(1e-12));
    CHECK(std::isinf(b.radius()));
    double p = std::exp(-1.3);
    for (std::uint64_t j = 0; j <= 20; ++j) {
        CHECK(b.coeff(j) == Approx(p).epsilon(1e-11));
        p *= 1.3 / double(j + 1);
    }
}

TEST_CASE("finite support aggregates") {
    PgfModel f = PgfModel::finite_support({0.25, 0.5, 0.25});
    CHECK(f.eval(0.5) == Approx(0.25 + 0.25 + 0.0625));
    CHECK(f.mean() == Approx(1.0));
    CHECK(f.second_factorial() == Approx(0.5));
    CHECK(f.third_factorial() == Approx(0.0));
    CHECK(f.coeff(2) == 0.25);
    CHECK(f.coeff(3) == 0.0);
    CHECK(std::isinf(f.radius()));
    CHECK(f.support_bound(1e-30) <= 3);
}

TEST_CASE("survival and drift avoid cancellation near one") {
    double g = 1.0;
    PgfModel a = PgfModel::linear_fractional(g);
    for (double u : {1e-6, 1e-10, 1e-13}) {
        CHECK(a.survival(u) == Approx(u / (1.0 + g * u)).epsilon(1e-13));
        CHECK(a.drift(u) == Approx(g * u * u / (1.0 + g * u)).epsilon(1e-12));
    }

    PgfModel p = PgfModel::poisson(1.0);
    // drift(u) = e^{-u} - 1 + u = u^2/2 - u^3/6 + ...
    for (double u : {1e-4, 1e-7}) {
        double expect = u * u / 2.0 - u * u * u / 6.0;
        CHECK(p.drift(u) == Approx(expect).epsilon(1e-9));
        CHECK(p.survival(u) == Approx(-std::expm1(-u)).epsilon(1e-13));
    }

    PgfModel b = PgfModel::negative_binomial(0.5, 2.0);
    for (double u : {1e-5, 1e-9}) {
        CHECK(b.survival(u) == Approx(-std::expm1(-0.5 * std::log1p(2.0 * u)))
                                   .epsilon(1e-13));
    }
}

TEST_CASE("log_eval_1m is exact in the log domain") {
    PgfModel b = PgfModel::negative_binomial(2.0, 0.5);
    for (double u : {0.0, 1e-12, 0.3, 1.0}) {
        CHECK(b.log_eval_1m(u) == Approx(-2.0 * std::log1p(0.5 * u)).epsilon(1e-14));
    }
    PgfModel p = PgfModel::poisson(0.8);
    CHECK(p.log_eval_1m(1e-9) == Approx(-0.8e-9).epsilon(1e-13));
}

TEST_CASE("iterated survival of the linear-fractional map is closed form") {
    double g = 0.5;
    PgfModel a = PgfModel::linear_fractional(g);
    for (double u : {1.0, 0.5, 1e-3}) {
        for (std::uint64_t m : {1ull, 7ull, 1000ull, 1000000ull}) {
            double expect = u / (1.0 + g * double(m) * u);
            CHECK(a.iterated_survival(u, m) == Approx(expect).epsilon(1e-12));
        }
        CHECK(a.iterated_survival(u, 0) == u);
    }
}

TEST_CASE("inverse_real inverts eval on the real branch above one") {
    for (PgfModel m : {PgfModel::linear_fractional(1.0),
                       PgfModel::negative_binomial(1.0, 1.0), PgfModel::poisson(1.0),
                       PgfModel::finite_support({0.25, 0.5, 0.25})}) {
        for (double x0 : {1.0, 1.1, 1.4}) {
            if (x0 >= m.radius()) continue;
            double y = m.eval(x0);
            CHECK(m.inverse_real(y) == Approx(x0).epsilon(1e-10));
        }
    }
}

TEST_CASE("support_bound covers all but the requested tail") {
    PgfModel p = PgfModel::poisson(1.0);
    std::size_t cut = p.support_bound(1e-18);
    CHECK(cut >= 15);
    CHECK(cut <= 64);
    CHECK(p.tail_mass(cut) <= 1e-15);

    PgfModel a = PgfModel::linear_fractional(2.0);
    std::size_t cut2 = a.support_bound(1e-12);
    // geometric ratio 2/3: need (2/3)^j ~ 1e-12, j ~ 68
    CHECK(cut2 >= 40);
    CHECK(a.tail_mass(cut2) <= 1e-9);
}

TEST_CASE("tail_mass complements the head sum") {
    PgfModel b = PgfModel::negative_binomial(1.0, 1.0);
    CHECK(b.tail_mass(0) == Approx(1.0).epsilon(1e-12));
    double head = 0.0;
    for (std::uint64_t j = 0; j < 10; ++j) head += b.coeff(j);
    CHECK(b.tail_mass(10) == Approx(1.0 - head).epsilon(1e-9));
}

TEST_CASE("family parameter accessors reject the wrong family") {
    CHECK_THROWS_AS(PgfModel::poisson(1.0).lf_gamma(), DomainError);
    CHECK_THROWS_AS(PgfModel::linear_fractional(1.0).nb_sigma(), DomainError);
    CHECK_THROWS_AS(PgfModel::negative_binomial(1.0, 1.0).poisson_mean(), DomainError);
    CHECK_THROWS_AS(PgfModel::linear_fractional(1.0).probs(), DomainError);
    CHECK(PgfModel::linear_fractional(0.25).lf_gamma() == 0.25);
    CHECK(PgfModel::negative_binomial(1.5, 0.5).nb_sigma() == 1.5);
    CHECK(PgfModel::negative_binomial(1.5, 0.5).nb_gamma() == 0.5);
}

TEST_CASE("degenerate family parameters are rejected") {
    CHECK_THROWS_AS(PgfModel::linear_fractional(0.0), DomainError);
    CHECK_THROWS_AS(PgfModel::linear_fractional(-1.0), DomainError);
    CHECK_THROWS_AS(PgfModel::negative_binomial(0.0, 1.0), DomainError);
    CHECK_THROWS_AS(PgfModel::negative_binomial(1.0, -0.5), DomainError);
    CHECK_THROWS_AS(PgfModel::poisson(-2.0), DomainError);
    CHECK_THROWS_AS(PgfModel::finite_support({}), DomainError);
    CHECK_THROWS_AS(PgfModel::finite_support({0.5, 0.6}), NormalizationError);
    CHECK_THROWS_AS(PgfModel::finite_support({0.5, -0.1, 0.6}), DomainError);
}

TEST_CASE("eval rejects points outside the radius") {
    PgfModel a = PgfModel::linear_fractional(1.0);
    CHECK_THROWS_AS(a.eval(2.5), DomainError);
    CHECK_NOTHROW(a.eval(1.5));
}
