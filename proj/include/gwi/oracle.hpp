#pragma once

#include <cstdint>
#include <span>

namespace gwi::oracle {

// Exact generation-n law for linear-fractional offspring (parameter gamma)
// with negative-binomial immigration (sigma, same gamma), started from zero.
// The generation-n PGF telescopes to (1 + gamma*n*(1-x))^{-sigma}, i.e. the
// law is negative-binomial with shape sigma and odds gamma*n. Everything here
// follows from that single fact; the functions are deliberately independent
// of the series engine so they can arbitrate it.

double pmf(double sigma, double gamma, std::uint64_t n, std::uint64_t j);
void pmf_prefix(double sigma, double gamma, std::uint64_t n, std::span<double> out);
double cdf(double sigma, double gamma, std::uint64_t n, std::uint64_t k);   // P(Z_n <= k)
double tail(double sigma, double gamma, std::uint64_t n, std::uint64_t k);  // P(Z_n >= k)

// E x^{Z_n}; valid for x < 1 + 1/(gamma*n).
double h_point(double sigma, double gamma, std::uint64_t n, double x);
double log_h_point(double sigma, double gamma, std::uint64_t n, double x);

// Scaled limits: mu_j = lim n^sigma P(Z_n = j), U(x) = lim n^sigma E x^{Z_n}.
double mu(double sigma, double gamma, std::uint64_t j);
double u_limit(double sigma, double gamma, double x);

// E[1/Z_n; Z_n >= 1]; closed form for sigma = 1, quadrature otherwise.
double nu(double sigma, double gamma, std::uint64_t n);

double mean(double sigma, double gamma, std::uint64_t n);

} // namespace gwi::oracle
