#include "gwi/util.hpp"

#include <cmath>
#include <stdexcept>

#include "gwi/errors.hpp"

namespace gwi {

double neumaier_total(std::span<const double> xs) noexcept {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw DomainError("wilson_interval: zero trials");
    if (successes > trials) throw DomainError("wilson_interval: successes > trials");
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    double lo = (center - half) / denom;
    double hi = (center + half) / denom;
    if (lo < 0.0) lo = 0.0;
    if (hi > 1.0) hi = 1.0;
    return {lo, hi};
}

double log_binom_real(double a, std::uint64_t k) {
    if (k == 0) return 0.0;
    // lgamma(a+1) - lgamma(a-k+1) - lgamma(k+1); valid when a > k-1 so all
    // arguments are positive.
    const double kk = static_cast<double>(k);
    if (!(a > kk - 1.0)) throw DomainError("log_binom_real: a must exceed k-1");
    return std::lgamma(a + 1.0) - std::lgamma(a - kk + 1.0) - std::lgamma(kk + 1.0);
}

double binom_real(double a, std::uint64_t k) {
    if (k == 0) return 1.0;
    // Product form keeps exact integer results exact for small k.
    double r = 1.0;
    for (std::uint64_t i = 0; i < k; ++i)
        r *= (a - static_cast<double>(i)) / static_cast<double>(i + 1);
    return r;
}

double solve_bracketed(const std::function<double(double)>& f, double lo, double hi,
                       double atol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalError("solve_bracketed: endpoints do not bracket a root");
    for (int it = 0; it < max_iter; ++it) {
        const double scale = std::max(std::abs(lo), std::abs(hi));
        if (hi - lo <= std::max(atol, 8.0 * 2.220446049250313e-16 * scale)) break;
        // Secant proposal, clamped to the middle 80% of the bracket so we
        // always shrink geometrically.
        double mid = 0.5 * (lo + hi);
        double x = mid;
        const double df = fhi - flo;
        if (df != 0.0) {
            double sec = lo - flo * (hi - lo) / df;
            const double margin = 0.1 * (hi - lo);
            if (sec > lo + margin && sec < hi - margin) x = sec;
        }
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
    }
    return 0.5 * (lo + hi);
}

namespace {

double simpson_panel(const std::function<double(double)>& f, double a, double fa, double b,
                     double fb, double fm, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return simpson_panel(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1) +
           simpson_panel(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_simpson(const std::function<double(double)>& f, double a, double b,
                         double tol, int max_depth) {
    if (!(b > a)) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_panel(f, a, fa, b, fb, fm, whole, tol, max_depth);
}

} // namespace gwi
