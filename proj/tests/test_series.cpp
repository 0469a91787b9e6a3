#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gwi/model.hpp"
#include "gwi/oracle.hpp"
#include "gwi/series.hpp"

using namespace gwi;
using doctest::Approx;

namespace {

GwiModel conjugate_model(double sigma, double gamma) {
    return GwiModel::validate(PgfModel::linear_fractional(gamma),
                              PgfModel::negative_binomial(sigma, gamma));
}

} // namespace

TEST_CASE("ten generations of the unit conjugate model are geometric") {
    GwiModel m = conjugate_model(1.0, 1.0);
    DistVector d = distribution_at(m, 10, 512);
    CHECK(d.n == 10);
    // (1 + n(1-x))^{-1} at n = 10: p_j = (1/11)(10/11)^j
    double expect = 1.0 / 11.0;
    for (std::size_t j = 0; j <= 60; ++j) {
        CHECK(d.p[j] == Approx(expect).epsilon(1e-12));
        expect *= 10.0 / 11.0;
    }
    CHECK(d.mass_defect < 1e-9);
    CHECK_FALSE(d.defect_warning);
}

TEST_CASE("engine agrees with the closed-form law across the conjugate grid") {
    for (double gamma : {0.5, 1.0, 2.0}) {
        for (double sigma : {0.5, 1.0, 3.0}) {
            GwiModel m = conjugate_model(sigma, gamma);
            SeriesEngine eng(m, 1024);
            DistVector d = initial_dist(1024);
            std::vector<double> ref(d.p.size());
            for (std::uint64_t n = 1; n <= 50; ++n) {
                d = eng.step(d);
                oracle::pmf_prefix(sigma, gamma, n, ref);
                double err = 0.0;
                for (std::size_t j = 0; j < ref.size(); ++j)
                    err = std::max(err, std::abs(d.p[j] - ref[j]));
                REQUIRE(err <= 1e-12 + d.mass_defect);
            }
        }
    }
}

TEST_CASE("law invariants: nonnegative, summable, defect monotone") {
    GwiModel m = GwiModel::validate(PgfModel::poisson(1.0),
                                    PgfModel::negative_binomial(1.0, 0.5));
    SeriesEngine eng(m, 256);
    DistVector d = initial_dist(256);
    double last_defect = 0.0;
    for (int n = 1; n <= 40; ++n) {
        d = eng.step(d);
        double sum = 0.0;
        for (double p : d.p) {
            REQUIRE(p >= 0.0);
            sum += p;
        }
        CHECK(sum <= 1.0 + 1e-12);
        CHECK(sum + d.mass_defect >= 1.0 - 1e-9);
        CHECK(d.mass_defect >= last_defect);
        last_defect = d.mass_defect;
    }
}

TEST_CASE("advance and repeated step agree exactly") {
    GwiModel m = conjugate_model(0.5, 1.0);
    SeriesEngine eng(m, 128);
    DistVector a = initial_dist(128);
    for (int i = 0; i < 7; ++i) a = eng.step(a);
    DistVector b = eng.advance(initial_dist(128), 7);
    REQUIRE(a.p.size() == b.p.size());
    for (std::size_t j = 0; j < a.p.size(); ++j) CHECK(a.p[j] == b.p[j]);
    CHECK(a.mass_defect == b.mass_defect);

    DistVector c = distribution_at(m, 7, 128);
    for (std::size_t j = 0; j < a.p.size(); ++j) CHECK(a.p[j] == c.p[j]);
}

TEST_CASE("step_distribution matches the engine") {
    GwiModel m = conjugate_model(1.0, 0.5);
    DistVector d = distribution_at(m, 3, 64);
    DistVector e = step_distribution(d, m, 64);
    DistVector f = distribution_at(m, 4, 64);
    for (std::size_t j = 0; j < f.p.size(); ++j) CHECK(e.p[j] == f.p[j]);
}

TEST_CASE("undersized truncation raises the defect flag, never lies") {
    GwiModel m = conjugate_model(1.0, 1.0);
    DistVector d = distribution_at(m, 100, 64);  // mean 100 vs cutoff 64
    CHECK(d.defect_warning);
    CHECK(d.mass_defect > 0.1);
    std::vector<double> ref(d.p.size());
    oracle::pmf_prefix(1.0, 1.0, 100, ref);
    for (std::size_t j = 0; j < ref.size(); ++j) {
        CHECK(d.p[j] <= ref[j] + 1e-15);
        CHECK(ref[j] - d.p[j] <= d.mass_defect);
    }
}

TEST_CASE("pgf point evaluation matches the telescoped closed form") {
    for (double gamma : {0.5, 2.0}) {
        for (double sigma : {0.5, 3.0}) {
            GwiModel m = conjugate_model(sigma, gamma);
            for (std::uint64_t n : {1ull, 17ull, 400ull, 20000ull}) {
                for (double x : {0.0, 0.25, 0.9, 0.999, 1.0}) {
                    double expect = oracle::h_point(sigma, gamma, n, x);
                    CHECK(pgf_H_point(m, n, x) == Approx(expect).epsilon(1e-11));
                }
            }
        }
    }
}

TEST_CASE("pgf point evaluation is consistent with the truncated law") {
    GwiModel m = GwiModel::validate(PgfModel::poisson(1.0),
                                    PgfModel::negative_binomial(1.0, 0.5));
    DistVector d = distribution_at(m, 20, 512);
    for (double x : {0.3, 0.8}) {
        double from_law = 0.0, xp = 1.0;
        for (double p : d.p) {
            from_law += p * xp;
            xp *= x;
        }
        double h = pgf_H_point(m, 20, x);
        CHECK(h >= from_law - 1e-12);
        CHECK(h <= from_law + d.mass_defect + 1e-12);
    }
}

TEST_CASE("offspring iterate point map matches the closed form") {
    PgfModel a = PgfModel::linear_fractional(1.5);
    for (double x : {0.0, 0.5, 0.99}) {
        for (std::uint64_t mit : {0ull, 1ull, 9ull, 1000ull}) {
            double u = 1.0 - x;
            double expect = 1.0 - u / (1.0 + 1.5 * double(mit) * u);
            CHECK(iterate_pgf_point(a, x, mit) == Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("inverse moment of the unit conjugate law has a closed form") {
    GwiModel m = conjugate_model(1.0, 1.0);
    // E[(Z_n+1)^{-1}] = ln(1+n)/n for sigma = gamma = 1
    auto r = inverse_moment(m, 10, 1.0, 2048);
    CHECK(r.value == Approx(std::log(11.0) / 10.0).epsilon(1e-10));
    CHECK(r.bracket >= 0.0);
    CHECK(r.bracket < 1e-8);
}

TEST_CASE("default truncation scales with the mean") {
    GwiModel m = conjugate_model(1.0, 1.0);
    CHECK(default_truncation(m, 1) >= 256);
    std::size_t k100 = default_truncation(m, 100);
    CHECK(k100 >= 640);  // mean is 100
    CHECK(default_truncation(m, 1000) > k100);
}
