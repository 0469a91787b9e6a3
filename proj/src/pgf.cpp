#include "gwi/pgf.hpp"

#include <cmath>
#include <limits>

#include "gwi/errors.hpp"
#include "gwi/util.hpp"

namespace gwi {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string(what) + " must be finite and positive");
}

// (1-u)^j - 1 + j*u for integer j >= 0; nonnegative on u in [0,1].
// Series in u for small j*u, expm1 form otherwise.
double pow_defect(std::uint64_t j, double u) {
    if (j < 2 || u == 0.0) return 0.0;
    const double ju = static_cast<double>(j) * u;
    if (ju < 1e-4) {
        const double jd = static_cast<double>(j);
        const double c2 = 0.5 * jd * (jd - 1.0);
        const double c3 = c2 * (jd - 2.0) / 3.0;
        const double c4 = c3 * (jd - 3.0) / 4.0;
        return u * u * (c2 - u * (c3 - u * c4));
    }
    if (u >= 1.0) return static_cast<double>(j) * u - 1.0 + ((u == 1.0) ? 0.0 : std::pow(1.0 - u, static_cast<double>(j)));
    return std::expm1(static_cast<double>(j) * std::log1p(-u)) + ju;
}

} // namespace

const char* family_name(PgfFamily f) noexcept {
    switch (f) {
        case PgfFamily::finite_support: return "finite-support";
        case PgfFamily::linear_fractional: return "linear-fractional";
        case PgfFamily::negative_binomial: return "negative-binomial";
        case PgfFamily::poisson: return "poisson";
    }
    return "?";
}

PgfModel PgfModel::finite_support(std::vector<double> probs) {
    if (probs.empty()) throw NormalizationError("finite_support: empty probability vector");
    NeumaierSum mass;
    NeumaierSum mean;
    for (std::size_t j = 0; j < probs.size(); ++j) {
        if (!(probs[j] >= 0.0) || !std::isfinite(probs[j]))
            throw NormalizationError("finite_support: negative or non-finite entry");
        mass.add(probs[j]);
        mean.add(static_cast<double>(j) * probs[j]);
    }
    const double total = mass.value();
    if (std::abs(total - 1.0) > 1e-12)
        throw NormalizationError("finite_support: probabilities sum to " + std::to_string(total));
    PgfModel m;
    m.family_ = PgfFamily::finite_support;
    m.radius_ = kInf;
    m.probs_ = std::move(probs);
    m.res_mass_ = total - 1.0;
    m.res_mean_ = 1.0 - mean.value();
    return m;
}

PgfModel PgfModel::linear_fractional(double gamma) {
    require_finite_positive(gamma, "linear_fractional: gamma");
    PgfModel m;
    m.family_ = PgfFamily::linear_fractional;
    m.p1_ = gamma;
    m.radius_ = 1.0 + 1.0 / gamma;
    return m;
}

PgfModel PgfModel::negative_binomial(double sigma, double gamma) {
    require_finite_positive(sigma, "negative_binomial: sigma");
    require_finite_positive(gamma, "negative_binomial: gamma");
    PgfModel m;
    m.family_ = PgfFamily::negative_binomial;
    m.p1_ = gamma;
    m.p2_ = sigma;
    m.radius_ = 1.0 + 1.0 / gamma;
    return m;
}

PgfModel PgfModel::poisson(double mean) {
    require_finite_positive(mean, "poisson: mean");
    PgfModel m;
    m.family_ = PgfFamily::poisson;
    m.p1_ = mean;
    m.radius_ = kInf;
    return m;
}

std::string PgfModel::describe() const {
    switch (family_) {
        case PgfFamily::finite_support: {
            std::string s = "finite-support[";
            for (std::size_t j = 0; j < probs_.size(); ++j) {
                if (j) s += ",";
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", probs_[j]);
                s += buf;
            }
            return s + "]";
        }
        case PgfFamily::linear_fractional:
            return "linear-fractional(gamma=" + std::to_string(p1_) + ")";
        case PgfFamily::negative_binomial:
            return "negative-binomial(sigma=" + std::to_string(p2_) + ",gamma=" + std::to_string(p1_) + ")";
        case PgfFamily::poisson:
            return "poisson(mean=" + std::to_string(p1_) + ")";
    }
    return "?";
}

double PgfModel::eval(double x, int order) const {
    if (order < 0) throw DomainError("pgf eval: negative order");
    if (!(std::abs(x) < radius_)) throw DomainError("pgf eval: |x| outside convergence radius");
    switch (family_) {
        case PgfFamily::finite_support: {
            // Falling-factorial Horner from the top coefficient.
            const std::size_t d = probs_.size();
            if (static_cast<std::size_t>(order) >= d) return 0.0;
            double acc = 0.0;
            for (std::size_t jj = d; jj-- > static_cast<std::size_t>(order);) {
                double ff = 1.0;
                for (int t = 0; t < order; ++t) ff *= static_cast<double>(jj - t);
                acc = acc * x + probs_[jj] * ff;
            }
            return acc;
        }
        case PgfFamily::linear_fractional: {
            if (order > 3) throw DomainError("pgf eval: order > 3 for parametric family");
            const double g = p1_;
            const double den = 1.0 + g * (1.0 - x);
            switch (order) {
                case 0: return 1.0 - (1.0 - x) / den;
                case 1: return 1.0 / (den * den);
                case 2: return 2.0 * g / (den * den * den);
                default: return 6.0 * g * g / (den * den * den * den);
            }
        }
        case PgfFamily::negative_binomial: {
            if (order > 3) throw DomainError("pgf eval: order > 3 for parametric family");
            const double g = p1_;
            const double s = p2_;
            const double base = 1.0 + g * (1.0 - x);
            double pre = 1.0;
            for (int t = 0; t < order; ++t) pre *= (s + t) * g;
            return pre * std::pow(base, -s - order);
        }
        case PgfFamily::poisson: {
            if (order > 3) throw DomainError("pgf eval: order > 3 for parametric family");
            const double lam = p1_;
            double pre = 1.0;
            for (int t = 0; t < order; ++t) pre *= lam;
            return pre * std::exp(lam * (x - 1.0));
        }
    }
    throw DomainError("pgf eval: bad family");
}

double PgfModel::mean() const {
    if (family_ == PgfFamily::finite_support) return eval(1.0, 1);
    switch (family_) {
        case PgfFamily::linear_fractional: return 1.0;
        case PgfFamily::negative_binomial: return p2_ * p1_;
        default: return p1_;
    }
}

double PgfModel::second_factorial() const {
    switch (family_) {
        case PgfFamily::finite_support: return eval(1.0, 2);
        case PgfFamily::linear_fractional: return 2.0 * p1_;
        case PgfFamily::negative_binomial: return p2_ * (p2_ + 1.0) * p1_ * p1_;
        case PgfFamily::poisson: return p1_ * p1_;
    }
    throw DomainError("pgf: bad family");
}

double PgfModel::third_factorial() const {
    switch (family_) {
        case PgfFamily::finite_support: return eval(1.0, 3);
        case PgfFamily::linear_fractional: return 6.0 * p1_ * p1_;
        case PgfFamily::negative_binomial: return p2_ * (p2_ + 1.0) * (p2_ + 2.0) * p1_ * p1_ * p1_;
        case PgfFamily::poisson: return p1_ * p1_ * p1_;
    }
    throw DomainError("pgf: bad family");
}

double PgfModel::variance() const {
    const double m = mean();
    return second_factorial() + m - m * m;
}

double PgfModel::coeff(std::uint64_t j) const {
    switch (family_) {
        case PgfFamily::finite_support:
            return (j < probs_.size()) ? probs_[j] : 0.0;
        case PgfFamily::linear_fractional: {
            const double g = p1_;
            const double q = g / (1.0 + g);
            if (j == 0) return q;
            return std::exp(static_cast<double>(j - 1) * std::log(q)) / ((1.0 + g) * (1.0 + g));
        }
        case PgfFamily::negative_binomial: {
            const double g = p1_;
            const double s = p2_;
            const double q = g / (1.0 + g);
            return std::exp(log_binom_real(s + static_cast<double>(j) - 1.0, j) +
                            static_cast<double>(j) * std::log(q) - s * std::log1p(g));
        }
        case PgfFamily::poisson: {
            const double lam = p1_;
            return std::exp(static_cast<double>(j) * std::log(lam) - lam -
                            std::lgamma(static_cast<double>(j) + 1.0));
        }
    }
    throw DomainError("pgf: bad family");
}

void PgfModel::coeffs(std::span<double> out) const {
    const std::size_t len = out.size();
    if (len == 0) return;
    switch (family_) {
        case PgfFamily::finite_support: {
            for (std::size_t j = 0; j < len; ++j)
                out[j] = (j < probs_.size()) ? probs_[j] : 0.0;
            return;
        }
        case PgfFamily::linear_fractional: {
            const double g = p1_;
            const double q = g / (1.0 + g);
            out[0] = q;
            if (len > 1) out[1] = 1.0 / ((1.0 + g) * (1.0 + g));
            for (std::size_t j = 2; j < len; ++j) out[j] = out[j - 1] * q;
            return;
        }
        case PgfFamily::negative_binomial: {
            const double g = p1_;
            const double s = p2_;
            const double q = g / (1.0 + g);
            out[0] = std::exp(-s * std::log1p(g));
            for (std::size_t j = 1; j < len; ++j)
                out[j] = out[j - 1] * q * (s + static_cast<double>(j - 1)) / static_cast<double>(j);
            return;
        }
        case PgfFamily::poisson: {
            const double lam = p1_;
            out[0] = std::exp(-lam);
            for (std::size_t j = 1; j < len; ++j)
                out[j] = out[j - 1] * lam / static_cast<double>(j);
            return;
        }
    }
}

double PgfModel::tail_mass(std::uint64_t j) const {
    if (j == 0) return 1.0;
    switch (family_) {
        case PgfFamily::finite_support: {
            NeumaierSum s;
            for (std::size_t t = j; t < probs_.size(); ++t) s.add(probs_[t]);
            return s.value();
        }
        case PgfFamily::linear_fractional: {
            const double g = p1_;
            const double q = g / (1.0 + g);
            return std::exp(static_cast<double>(j - 1) * std::log(q)) / (1.0 + g);
        }
        case PgfFamily::negative_binomial:
        case PgfFamily::poisson: {
            const auto step_ratio = [&](std::uint64_t t) {
                if (family_ == PgfFamily::poisson) return p1_ / static_cast<double>(t + 1);
                const double q = p1_ / (1.0 + p1_);
                return q * (p2_ + static_cast<double>(t)) / static_cast<double>(t + 1);
            };
            const auto ratio_sup = [&](std::uint64_t t) {
                // sup of step ratios over indices >= t
                if (family_ == PgfFamily::poisson) return p1_ / static_cast<double>(t + 1);
                const double q = p1_ / (1.0 + p1_);
                return std::max(q, step_ratio(t));
            };
            // Prefix complement while the tail is fat; forward sum with a
            // geometric remainder majorant once it is thin (or j is huge).
            if (j <= (1u << 20)) {
                std::vector<double> head(j);
                coeffs(head);
                NeumaierSum pre;
                for (double v : head) pre.add(v);
                const double complement = 1.0 - pre.value();
                if (complement > 1e-8) return complement;
            }
            double term = coeff(j);
            NeumaierSum tail;
            std::uint64_t t = j;
            for (std::uint64_t guard = 0; guard < (1u << 22); ++guard, ++t) {
                tail.add(term);
                const double r = step_ratio(t);
                const double sup = ratio_sup(t + 1);
                if (sup < 1.0) {
                    const double rem = term * r / (1.0 - sup);
                    if (rem <= 1e-16 * tail.value() + 1e-300) {
                        tail.add(rem);
                        break;
                    }
                }
                term *= r;
            }
            return tail.value();
        }
    }
    throw DomainError("pgf: bad family");
}

std::size_t PgfModel::support_bound(double tiny, std::size_t cap) const {
    if (!(tiny > 0.0)) throw DomainError("support_bound: tiny must be positive");
    if (family_ == PgfFamily::finite_support) {
        std::size_t s = probs_.size();
        while (s > 0 && tail_mass(s - 1) <= tiny) --s;
        return s;
    }
    if (family_ == PgfFamily::linear_fractional) {
        const double g = p1_;
        const double q = g / (1.0 + g);
        // tail(j) = q^{j-1}/(1+g) <= tiny
        const double jr = 1.0 + std::log(tiny * (1.0 + g)) / std::log(q);
        if (jr <= 1.0) return 1;
        const std::size_t s = static_cast<std::size_t>(std::ceil(jr));
        return std::min(s, cap);
    }
    // Walk the coefficient recurrence keeping a geometric tail majorant.
    double term = coeff(0);
    std::uint64_t j = 0;
    while (j < cap) {
        double r;
        if (family_ == PgfFamily::poisson) {
            r = p1_ / static_cast<double>(j + 1);
        } else {
            const double q = p1_ / (1.0 + p1_);
            r = q * (p2_ + static_cast<double>(j)) / static_cast<double>(j + 1);
            if (r < q) r = q;
        }
        if (r < 1.0 && term / (1.0 - r) <= tiny) return j;
        term *= (family_ == PgfFamily::poisson)
                    ? p1_ / static_cast<double>(j + 1)
                    : (p1_ / (1.0 + p1_)) * (p2_ + static_cast<double>(j)) / static_cast<double>(j + 1);
        ++j;
    }
    return cap;
}

double PgfModel::survival(double u) const {
    if (!(u >= 0.0) || u > 1.0) throw DomainError("survival: u outside [0, 1]");
    switch (family_) {
        case PgfFamily::finite_support: {
            if (u == 0.0) return 0.0;
            NeumaierSum s;
            const double l = (u < 1.0) ? std::log1p(-u) : -kInf;
            for (std::size_t j = 1; j < probs_.size(); ++j) {
                if (probs_[j] == 0.0) continue;
                const double pw = (u < 1.0) ? -std::expm1(static_cast<double>(j) * l) : 1.0;
                s.add(probs_[j] * pw);
            }
            return s.value();
        }
        case PgfFamily::linear_fractional:
            return u / (1.0 + p1_ * u);
        case PgfFamily::negative_binomial:
            return -std::expm1(-p2_ * std::log1p(p1_ * u));
        case PgfFamily::poisson:
            return -std::expm1(-p1_ * u);
    }
    throw DomainError("pgf: bad family");
}

double PgfModel::iterated_survival(double u, std::uint64_t m) const {
    if (!(u >= 0.0) || u > 1.0) throw DomainError("iterated_survival: u outside [0, 1]");
    if (family_ == PgfFamily::linear_fractional) {
        // Exact m-step composition; avoids accumulating per-step rounding.
        return u / (1.0 + p1_ * static_cast<double>(m) * u);
    }
    double v = u;
    for (std::uint64_t i = 0; i < m; ++i) v = survival(v);
    return v;
}

double PgfModel::drift(double u) const {
    if (!(u >= 0.0) || u > 1.0) throw DomainError("drift: u outside [0, 1]");
    switch (family_) {
        case PgfFamily::finite_support: {
            NeumaierSum s;
            s.add(res_mass_);
            s.add(u * res_mean_);
            for (std::size_t j = 2; j < probs_.size(); ++j) {
                if (probs_[j] == 0.0) continue;
                s.add(probs_[j] * pow_defect(j, u));
            }
            return s.value();
        }
        case PgfFamily::linear_fractional: {
            const double g = p1_;
            return g * u * u / (1.0 + g * u);
        }
        case PgfFamily::negative_binomial: {
            const double g = p1_;
            const double s = p2_;
            const double z = g * u;
            if ((s + 1.0) * z < 0.5) {
                // (1+z)^{-s} - 1 + u = (1 - s*g)u + sum_{i>=2} C(-s,i) z^i;
                // the size guard keeps the alternating series monotone.
                NeumaierSum acc;
                acc.add((1.0 - s * g) * u);
                double term = -s * z; // i = 1 term of the series
                for (int i = 2; i < 120; ++i) {
                    term *= -(s + static_cast<double>(i - 1)) * z / static_cast<double>(i);
                    acc.add(term);
                    if (std::abs(term) < 1e-20 * (std::abs(acc.value()) + 1e-300)) break;
                }
                return acc.value();
            }
            return u - survival(u);
        }
        case PgfFamily::poisson: {
            const double lam = p1_;
            const double z = lam * u;
            if (z < 0.5) {
                NeumaierSum acc;
                acc.add((1.0 - lam) * u);
                double term = -z;
                for (int i = 2; i < 80; ++i) {
                    term *= -z / static_cast<double>(i);
                    acc.add(term);
                    if (std::abs(term) < 1e-20 * (std::abs(acc.value()) + 1e-300)) break;
                }
                return acc.value();
            }
            return std::expm1(-z) + u;
        }
    }
    throw DomainError("pgf: bad family");
}

double PgfModel::log_eval_1m(double u) const {
    if (!(u >= 0.0) || u > 1.0) throw DomainError("log_eval_1m: u outside [0, 1]");
    switch (family_) {
        case PgfFamily::finite_support: {
            const double s = survival(u);
            return std::log1p(-s);
        }
        case PgfFamily::linear_fractional:
            return std::log1p(-u / (1.0 + p1_ * u));
        case PgfFamily::negative_binomial:
            return -p2_ * std::log1p(p1_ * u);
        case PgfFamily::poisson:
            return -p1_ * u;
    }
    throw DomainError("pgf: bad family");
}

double PgfModel::inverse_real(double u) const {
    if (!(u >= 1.0)) throw DomainError("inverse_real: requires u >= 1");
    if (u == 1.0) return 1.0;
    if (family_ == PgfFamily::linear_fractional) {
        const double d = u - 1.0;
        return 1.0 + d / (1.0 + p1_ * d);
    }
    // Bracket [1, hi] with F(hi) >= u, expanding toward the radius.
    double hi;
    if (std::isfinite(radius_)) {
        double step = 0.5 * (radius_ - 1.0);
        hi = 1.0 + step;
        while (eval(hi) < u) {
            step = 0.5 * (radius_ - hi);
            hi = radius_ - step * 0.5;
            if (radius_ - hi < 1e-15 * radius_)
                throw NumericalError("inverse_real: failed to bracket near radius");
        }
    } else {
        hi = 2.0;
        int guard = 0;
        while (eval(hi) < u) {
            hi = 1.0 + 2.0 * (hi - 1.0);
            if (++guard > 120) throw DomainError("inverse_real: value not attained (bounded pgf)");
        }
    }
    const auto f = [&](double x) { return eval(x) - u; };
    return solve_bracketed(f, 1.0, hi, 1e-13);
}

const std::vector<double>& PgfModel::probs() const {
    if (family_ != PgfFamily::finite_support) throw DomainError("probs: not a finite-support model");
    return probs_;
}

double PgfModel::lf_gamma() const {
    if (family_ != PgfFamily::linear_fractional) throw DomainError("lf_gamma: wrong family");
    return p1_;
}

double PgfModel::nb_sigma() const {
    if (family_ != PgfFamily::negative_binomial) throw DomainError("nb_sigma: wrong family");
    return p2_;
}

double PgfModel::nb_gamma() const {
    if (family_ != PgfFamily::negative_binomial) throw DomainError("nb_gamma: wrong family");
    return p1_;
}

double PgfModel::poisson_mean() const {
    if (family_ != PgfFamily::poisson) throw DomainError("poisson_mean: wrong family");
    return p1_;
}

} // namespace gwi
