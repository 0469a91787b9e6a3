#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace gwi {

// Compensated (Neumaier) summation. Running error stays O(eps) independent of
// the number of terms, which the defect bookkeeping relies on.
class NeumaierSum {
public:
    void add(double x) noexcept {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double neumaier_total(std::span<const double> xs) noexcept;

struct Interval {
    double lo;
    double hi;
};

// Wilson score interval for a binomial proportion. z is the two-sided
// normal quantile (2.5758293035489004 for 99%).
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

inline constexpr double kZ99 = 2.5758293035489004;

// log C(a, k) for real a > k-1, integer k >= 0 (generalized binomial).
double log_binom_real(double a, std::uint64_t k);

// C(a, k) without overflow for moderate results.
double binom_real(double a, std::uint64_t k);

// Solve f(x) = 0 on [lo, hi] where f(lo) and f(hi) bracket a root.
// Bisection with secant acceleration; stops at |hi-lo| <= atol.
double solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                       double atol, int max_iter = 200);

// Adaptive Simpson quadrature with absolute tolerance.
double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double tol, int max_depth = 40);

} // namespace gwi
