#include "gwi/oracle.hpp"

#include <cmath>
#include <vector>

#include "gwi/errors.hpp"
#include "gwi/util.hpp"

namespace gwi::oracle {

namespace {

void check_params(double sigma, double gamma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("oracle: sigma outside (0, inf)");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("oracle: gamma outside (0, inf)");
}

// log of the success probability p = 1/(1+gamma*n) and of q = 1-p, written to
// stay accurate when gamma*n is large.
double log_p(double gn) { return -std::log1p(gn); }
double log_q(double gn) { return -std::log1p(1.0 / gn); }

} // namespace

double pmf(double sigma, double gamma, std::uint64_t n, std::uint64_t j) {
    check_params(sigma, gamma);
    if (n == 0) return (j == 0) ? 1.0 : 0.0;
    const double gn = gamma * static_cast<double>(n);
    return std::exp(log_binom_real(sigma + static_cast<double>(j) - 1.0, j) + sigma * log_p(gn) +
                    static_cast<double>(j) * log_q(gn));
}

void pmf_prefix(double sigma, double gamma, std::uint64_t n, std::span<double> out) {
    check_params(sigma, gamma);
    if (out.empty()) return;
    if (n == 0) {
        out[0] = 1.0;
        for (std::size_t j = 1; j < out.size(); ++j) out[j] = 0.0;
        return;
    }
    const double gn = gamma * static_cast<double>(n);
    const double q = gn / (1.0 + gn);
    out[0] = std::exp(sigma * log_p(gn));
    for (std::size_t j = 1; j < out.size(); ++j)
        out[j] = out[j - 1] * q * (sigma + static_cast<double>(j - 1)) / static_cast<double>(j);
}

double cdf(double sigma, double gamma, std::uint64_t n, std::uint64_t k) {
    check_params(sigma, gamma);
    if (n == 0) return 1.0;
    const double gn = gamma * static_cast<double>(n);
    const double q = gn / (1.0 + gn);
    double term = std::exp(sigma * log_p(gn));
    NeumaierSum s;
    s.add(term);
    for (std::uint64_t j = 1; j <= k; ++j) {
        term *= q * (sigma + static_cast<double>(j - 1)) / static_cast<double>(j);
        s.add(term);
    }
    return std::min(s.value(), 1.0);
}

double tail(double sigma, double gamma, std::uint64_t n, std::uint64_t k) {
    check_params(sigma, gamma);
    if (k == 0) return 1.0;
    if (n == 0) return 0.0;
    const double gn = gamma * static_cast<double>(n);
    if (sigma == 1.0) {
        // Geometric law: P(Z_n >= k) = q^k exactly.
        return std::exp(static_cast<double>(k) * log_q(gn));
    }
    const double q = gn / (1.0 + gn);
    // Forward sum from k. The term ratio tends to q < 1; majorize by
    // sup_{t>=j} ratio to certify the cut.
    double term = pmf(sigma, gamma, n, k);
    NeumaierSum s;
    std::uint64_t t = k;
    for (std::uint64_t guard = 0; guard < (1u << 26); ++guard, ++t) {
        s.add(term);
        const double r = q * (sigma + static_cast<double>(t)) / static_cast<double>(t + 1);
        const double sup = std::max(q, q * (sigma + static_cast<double>(t + 1)) / static_cast<double>(t + 2));
        if (sup < 1.0) {
            const double rem = term * r / (1.0 - sup);
            if (rem <= 1e-16 * s.value() + 1e-300) {
                s.add(rem);
                break;
            }
        }
        term *= r;
    }
    return std::min(s.value(), 1.0);
}

double h_point(double sigma, double gamma, std::uint64_t n, double x) {
    return std::exp(log_h_point(sigma, gamma, n, x));
}

double log_h_point(double sigma, double gamma, std::uint64_t n, double x) {
    check_params(sigma, gamma);
    const double gn = gamma * static_cast<double>(n);
    const double arg = gn * (1.0 - x);
    if (!(arg > -1.0)) throw DomainError("oracle h_point: x beyond 1 + 1/(gamma*n)");
    return -sigma * std::log1p(arg);
}

double mu(double sigma, double gamma, std::uint64_t j) {
    check_params(sigma, gamma);
    if (j < 64) return binom_real(sigma + static_cast<double>(j) - 1.0, j) * std::pow(gamma, -sigma);
    return std::exp(log_binom_real(sigma + static_cast<double>(j) - 1.0, j) - sigma * std::log(gamma));
}

double u_limit(double sigma, double gamma, double x) {
    check_params(sigma, gamma);
    if (!(x < 1.0)) throw DomainError("oracle u_limit: requires x < 1");
    return std::pow(gamma * (1.0 - x), -sigma);
}

double nu(double sigma, double gamma, std::uint64_t n) {
    check_params(sigma, gamma);
    if (n == 0) return 0.0;
    const double gn = gamma * static_cast<double>(n);
    if (sigma == 1.0) {
        // sum_{j>=1} p q^j / j = -p log p
        return std::log1p(gn) / (1.0 + gn);
    }
    // nu = integral_0^1 (H(t) - H(0)) / t dt with H(t) = (1+gn(1-t))^{-sigma}.
    const double h0 = std::exp(-sigma * std::log1p(gn));
    const auto f = [&](double t) {
        if (t == 0.0) return sigma * gn * std::exp(-(sigma + 1.0) * std::log1p(gn));
        return (std::exp(-sigma * std::log1p(gn * (1.0 - t))) - h0) / t;
    };
    // Split at the boundary layer near t = 1 where H climbs from ~0 to 1.
    const double split = (gn > 4.0) ? 1.0 - 4.0 / gn : 0.5;
    const double scale = 1.0 / (1.0 + gn);
    const double i1 = integrate_simpson(f, 0.0, split, 1e-16 + 1e-14 * scale, 48);
    const double i2 = integrate_simpson(f, split, 1.0, 1e-16 + 1e-14 * scale, 48);
    return i1 + i2;
}

double mean(double sigma, double gamma, std::uint64_t n) {
    check_params(sigma, gamma);
    return sigma * gamma * static_cast<double>(n);
}

} // namespace gwi::oracle
