#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gwi/model.hpp"
#include "gwi/series.hpp"
#include "gwi/simulate.hpp"

namespace gwi::analytics {

// ----------------------------------------------------------------------------
// Distribution access
//
// Limit diagnostics need the law of Z_n at generations far beyond what the
// O(n K^2) series recursion can reach with a small certified defect. For the
// conjugate family the law is negative-binomial in closed form, so operations
// that consume a law can route through either source. The source used is
// recorded in every report.
// ----------------------------------------------------------------------------

enum class LawRoute { automatic, engine, oracle };

struct LawOptions {
    LawRoute route = LawRoute::automatic;
    std::size_t K = 0;                 // series truncation; 0 picks a default
    std::uint64_t engine_max_n = 512;  // automatic: engine up to here, else closed form
    double defect_budget = 1e-9;
};

struct Law {
    std::uint64_t n = 0;
    std::vector<double> p;    // p[j] <= P(Z_n = j); exact on the oracle route
    double defect = 0.0;      // certified bound on mass not represented in p
    std::string source;       // "exact-series" | "closed-form-oracle"
};

// Law of Z_n with at least `need` leading coefficients.
Law law_at(const GwiModel& model, std::uint64_t n, std::size_t need,
           const LawOptions& opt = {});

// ----------------------------------------------------------------------------
// Drift corrections of the single-step map
//
// With u = 1 - x, s(u) = 1 - A(1-u) and d(u) = A(1-u) - (1-u):
//   delta(x)   = gamma - d / (s u)
//   epsilon(x) = gamma - d / u^2
// delta vanishes identically for the linear-fractional family; epsilon is
// nonnegative, non-increasing, and -> 0 as x -> 1.
// ----------------------------------------------------------------------------

double delta_fn(const GwiModel& model, double x);
double epsilon_fn(const GwiModel& model, double x);

// Partial sum of delta along the iteration orbit: sum_{m<n} delta(A_m(x)).
double h_n_point(const GwiModel& model, double x, std::uint64_t n);

// | 1/(1-x) + n*gamma - 1/(1-A_n(x)) - h_n(x) |; zero in exact arithmetic.
double iteration_identity_residual(const GwiModel& model, double x, std::uint64_t n);

// ----------------------------------------------------------------------------
// Scaled-limit estimation
// ----------------------------------------------------------------------------

struct SeqPoint {
    std::uint64_t n;
    double value;
};

// A scaled sequence together with its finite-n convergence proxy: the mean
// and relative spread over the trailing half of the points.
struct EstimateSeq {
    std::string label;
    std::vector<SeqPoint> points;
    double plateau_value = 0.0;
    double plateau_spread = 0.0;  // (max - min) / |mean| over the trailing half
};

EstimateSeq make_seq(std::string label, std::vector<SeqPoint> points);

// n^sigma * E x^{Z_n} along n_list, with the fixed-point consistency check
// B(x) * U(A(x)) = U(x) evaluated on the plateau values.
struct UEstimate {
    EstimateSeq seq;
    double value = 0.0;           // plateau at x
    double value_at_image = 0.0;  // plateau at A(x)
    double functional_residual = 0.0;  // B(x) * value_at_image - value
};

UEstimate u_estimate(const GwiModel& model, double x,
                     std::span<const std::uint64_t> n_list);

// n^sigma * P(Z_n = j) along n_list.
EstimateSeq mu_estimate(const GwiModel& model, std::uint64_t j,
                        std::span<const std::uint64_t> n_list,
                        const LawOptions& opt = {});

// E[1/Z_n; Z_n >= 1] (unconditional weighting) with a certified bracket.
ValueWithBracket nu_n(const GwiModel& model, std::uint64_t n, const LawOptions& opt = {});

// E[1/Z_n^2 | Z_n >= 1].
ValueWithBracket nu_star(const GwiModel& model, std::uint64_t n, const LawOptions& opt = {});

// ----------------------------------------------------------------------------
// One-step ratio deviations
// ----------------------------------------------------------------------------

// Probability that a size-k generation moves by more than eps relatively:
// P(|S_k + Y - k| > eps*k) with S_k the k-fold offspring sum and Y one
// immigration draw. Exact up to float rounding: the acceptance window is a
// finite integer range and every needed convolution entry is exact.
// K = 0 sizes the computation to the window automatically; a smaller K pushes
// the missing window mass to the "exceeds" side (upper bracket).
double a_k_eps(const GwiModel& model, std::uint64_t k, double eps, std::size_t K = 0);

// a_k_eps for every k = 1..k_max sharing one incremental convolution table;
// out[0] = 0.
std::vector<double> a_k_eps_sweep(const GwiModel& model, std::uint64_t k_max, double eps);

// Exponential-moment upper bound on a_k_eps, valid simultaneously for every
// generation size >= k (the optimized tilt is checked for a negative
// per-individual rate, making the bound monotone). Returns 1 when no decaying
// tilt exists. Requires nothing beyond radius > 1 for the upper side.
double a_k_eps_bound(const GwiModel& model, std::uint64_t k, double eps);

// P(|Z_{n+1}/Z_n - 1| > eps | Z_n >= 1) = sum_j a_j_eps * P(Z_n = j | Z_n >= 1),
// summed exactly for j <= j_cut; bracket covers j > j_cut via a_k_eps_bound.
ValueWithBracket ld_ratio_prob(const GwiModel& model, std::uint64_t n, double eps,
                               std::uint64_t j_cut, const LawOptions& opt = {});

// sum_j a_j_eps * mu_j over j = 1..mu.size()-1, where mu[j] is the scaled
// limit of n^sigma P(Z_n = j).
struct QEps {
    double value = 0.0;
    double last_term_share = 0.0;  // truncation heuristic
};

QEps q_eps(const GwiModel& model, double eps, std::span<const double> mu);

// ----------------------------------------------------------------------------
// Conditional ratio variance
// ----------------------------------------------------------------------------

// Var(Z_{n+1}/Z_n | Z_n >= 1), exactly decomposed. "formula" is the
// leading-order decomposition D(X) nu_cond + D(Y) nu_star; "mean_shift" is
// the variance of the conditional mean, beta^2 (nu_star - nu_cond^2), which
// the leading decomposition drops; total = formula + mean_shift is the true
// conditional variance (what a simulation measures).
struct JnParts {
    double total = 0.0;
    double formula = 0.0;
    double mean_shift = 0.0;
    double nu_cond = 0.0;  // E[1/Z_n | Z_n >= 1]
    double nu_star = 0.0;  // E[1/Z_n^2 | Z_n >= 1]
    double dx = 0.0;
    double dy = 0.0;
    double bracket = 0.0;
};

JnParts j_n_exact(const GwiModel& model, std::uint64_t n, const LawOptions& opt = {});

// ----------------------------------------------------------------------------
// Limit constant for sigma < 1:
//   kappa = 2 gamma Int_0^1 (U(s) - U(0))/s ds + D(Y) sum_k mu_k / k^2
// u_fn supplies U on [0,1); mu[k] supplies the series coefficients.
// ----------------------------------------------------------------------------

struct KappaParts {
    double total = 0.0;
    double integral_term = 0.0;
    double series_term = 0.0;
    double series_tail = 0.0;  // analytic estimate of the dropped series tail
};

KappaParts kappa(const GwiModel& model, const std::function<double(double)>& u_fn,
                 std::span<const double> mu);

// Closed-form providers; requires a conjugate model (and sigma < 1).
KappaParts kappa(const GwiModel& model);

// ----------------------------------------------------------------------------
// Envelope of the generation PGF along x = e^{-s/n}
//
// ratio_literal normalizes by (1 + gamma s)^sigma; ratio_effective replaces s
// by its curvature-corrected image n(1 - e^{-s/n}), which is the comparison
// the two-sided envelope actually controls uniformly up to s ~ n. The two
// agree as n -> infinity at fixed s and differ by (s / (n(1-e^{-s/n})))^sigma
// at the far end of the range.
// ----------------------------------------------------------------------------

struct EnvelopePoint {
    double s;
    double ratio_literal;
    double ratio_effective;
};

std::vector<EnvelopePoint> pgf_envelope(const GwiModel& model, std::uint64_t n,
                                        std::span<const double> s_grid,
                                        double s_cap_factor = 4.0);

// ----------------------------------------------------------------------------
// Deviation bounds
// ----------------------------------------------------------------------------

struct BoundReport {
    std::uint64_t n = 0;
    std::uint64_t k = 0;
    double probability = 0.0;      // point value of the probability side
    double prob_lo = 0.0;          // certified / CI bracket around it
    double prob_hi = 0.0;
    std::string prob_source;       // "exact-series" | "closed-form-oracle" | "monte-carlo"
    double bound = 0.0;            // theoretical right-hand side
    double ratio = 0.0;            // probability / bound
    double slack = 1.0;            // allowed multiple of the bound
    bool satisfied = false;        // prob_hi <= slack * bound
    double aux = 0.0;              // regime scale (k/n below, k/n^2 above)
};

// P(Z_n <= k) against (1 + gamma n / k)^{-sigma}; requires 1 <= k <= n/2
// (small-generation regime). The observed ratio is the constant surrogate.
BoundReport lower_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                            double slack = 10.0, const LawOptions& opt = {});

// Right-hand side of the upper-deviation estimate at (n, k):
//   (k/(gamma n))^{B'(1+y0)/gamma} * exp(-k/(gamma n) + 1 - (lam/gamma)(k/n^2) ln(k/n))
// with y0 = k/(gamma^2 n^2) - 1/(gamma n) and lam = 1 - rho/(6 gamma^2).
// Requires radius > 1, finite rho, n < k < n^2, and 0 < y0 < radius - 1.
double upper_bound_value(const GwiModel& model, std::uint64_t n, std::uint64_t k);

// P(Z_n >= k) against upper_bound_value.
BoundReport upper_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                            const LawOptions& opt = {});

// P(max_{1<=m<=n} Z_m >= k) against the same right-hand side; the probability
// side comes from a Monte Carlo estimate supplied by the caller.
BoundReport max_dev_bound(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                          const mc::McEstimate& est);

// ----------------------------------------------------------------------------
// Tilt sequence: backward orbit of the offspring PGF above its fixed point,
// A(1 + y_{m+1}) = 1 + y_m. Strictly decreasing while positive.
// ----------------------------------------------------------------------------

struct TiltSequence {
    std::vector<double> y;        // y[0] = y0 down to y[n]
    std::string y0_rule;          // how y0 was chosen
    double sum = 0.0;             // sum of y[0..n-1]
    double log_reference = 0.0;   // log(1 + gamma n y0) / gamma
};

TiltSequence tilt_sequence(const GwiModel& model, std::uint64_t n, double y0,
                           std::string y0_rule = "user");

} // namespace gwi::analytics
