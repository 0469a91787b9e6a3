#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gwi {

enum class PgfFamily { finite_support, linear_fractional, negative_binomial, poisson };

const char* family_name(PgfFamily f) noexcept;

// One probability generating function F(x) = sum_j p_j x^j from a fixed menu
// of families. Evaluation near x = 1 is the numerically delicate case, so the
// class exposes cancellation-free forms parameterized by u = 1 - x:
//
//   survival(u)       = 1 - F(1-u)
//   drift(u)          = F(1-u) - (1-u)
//   log_eval_1m(u)    = log F(1-u)
//
// For a critical family (mean 1) drift(u) is O(u^2); computing it by literal
// subtraction would lose every significant digit for small u.
class PgfModel {
public:
    static PgfModel finite_support(std::vector<double> probs);
    static PgfModel linear_fractional(double gamma);
    static PgfModel negative_binomial(double sigma, double gamma);
    static PgfModel poisson(double mean);

    PgfFamily family() const noexcept { return family_; }
    std::string describe() const;

    // Convergence radius of the coefficient series (+inf for poisson and
    // finite support).
    double radius() const noexcept { return radius_; }

    // F(x) and derivatives: order 0..3 for parametric families, any order for
    // finite support. Requires |x| < radius.
    double eval(double x, int order = 0) const;

    double mean() const;              // F'(1)
    double second_factorial() const;  // F''(1)
    double third_factorial() const;   // F'''(1)
    double variance() const;

    double coeff(std::uint64_t j) const;
    void coeffs(std::span<double> out) const;     // p_0 .. p_{len-1}
    double tail_mass(std::uint64_t j) const;      // sum_{t >= j} p_t (upper estimate in deep tail)
    std::size_t support_bound(double tiny, std::size_t cap = 1u << 22) const;

    double survival(double u) const;                       // u in [0, 1]
    double iterated_survival(double u, std::uint64_t m) const;
    double drift(double u) const;
    double log_eval_1m(double u) const;

    // Solve F(x) = u for x in [1, radius); requires u >= 1.
    double inverse_real(double u) const;

    // Family parameter accessors (throw DomainError on family mismatch).
    const std::vector<double>& probs() const;
    double lf_gamma() const;
    double nb_sigma() const;
    double nb_gamma() const;
    double poisson_mean() const;

private:
    PgfModel() = default;

    PgfFamily family_ = PgfFamily::finite_support;
    double p1_ = 0.0;   // gamma (lf, nb), mean (poisson)
    double p2_ = 0.0;   // sigma (nb)
    double radius_ = 0.0;
    std::vector<double> probs_;  // finite support only
    double res_mass_ = 0.0;      // sum(probs) - 1, compensated
    double res_mean_ = 0.0;      // 1 - sum(j probs_j), compensated
};

} // namespace gwi
