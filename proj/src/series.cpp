#include "gwi/series.hpp"

#include <algorithm>
#include <cmath>

#include "gwi/errors.hpp"
#include "gwi/kernels.hpp"
#include "gwi/util.hpp"

namespace gwi {

namespace {

constexpr double kKernelTailTiny = 1e-18;
constexpr std::size_t kTableBytesMax = std::size_t{1} << 31;  // 2 GiB guard

std::vector<double> truncated_kernel(const PgfModel& m, std::size_t K) {
    std::size_t len = m.support_bound(kKernelTailTiny);
    if (len == 0) len = 1;
    len = std::min(len, K + 1);
    std::vector<double> k(len);
    m.coeffs(k);
    return k;
}

} // namespace

DistVector initial_dist(std::size_t K) {
    DistVector d;
    d.p.assign(K + 1, 0.0);
    d.p[0] = 1.0;
    return d;
}

SeriesEngine::SeriesEngine(const GwiModel& model, std::size_t K) : model_(model), K_(K) {
    if (K_ == 0) throw DomainError("SeriesEngine: truncation must be >= 1");
    const std::size_t row_bytes = (K_ + 1) * sizeof(double);
    if (row_bytes > kTableBytesMax / (K_ + 1))
        throw NumericalError("SeriesEngine: truncation too large for the power table");
    offspring_kernel_ = truncated_kernel(model_.offspring, K_);
    immigration_kernel_ = truncated_kernel(model_.immigration, K_);
    table_.assign(K_ + 1, 0.0);  // row 0 = identity for convolution
    table_[0] = 1.0;
    rows_built_ = 1;
}

const double* SeriesEngine::power_row(std::size_t j) const {
    if (j >= rows_built_) {
        table_.resize((j + 1) * (K_ + 1));
        for (std::size_t r = rows_built_; r <= j; ++r) {
            const double* prev = table_.data() + (r - 1) * (K_ + 1);
            double* cur = table_.data() + r * (K_ + 1);
            kernels::conv_trunc(cur, prev, K_ + 1, offspring_kernel_.data(),
                                offspring_kernel_.size());
        }
        rows_built_ = j + 1;
    }
    return table_.data() + j * (K_ + 1);
}

DistVector SeriesEngine::step(const DistVector& parent) const {
    if (parent.p.size() != K_ + 1)
        throw DomainError("SeriesEngine::step: parent truncation mismatch");
    std::size_t deg = 0;
    for (std::size_t j = K_ + 1; j-- > 0;) {
        if (parent.p[j] != 0.0) {
            deg = j;
            break;
        }
    }
    power_row(deg);  // build all rows up to deg in order

    // mix[i] = sum_j parent[j] * offspring^{*j}[i]
    std::vector<double> mix(K_ + 1, 0.0);
    for (std::size_t j = 0; j <= deg; ++j) {
        const double w = parent.p[j];
        if (w == 0.0) continue;
        kernels::axpy(mix.data(), table_.data() + j * (K_ + 1), K_ + 1, w);
    }

    DistVector child;
    child.n = parent.n + 1;
    child.p.assign(K_ + 1, 0.0);
    kernels::conv_trunc(child.p.data(), mix.data(), K_ + 1, immigration_kernel_.data(),
                        immigration_kernel_.size());

    const double total = neumaier_total(child.p);
    double defect = 1.0 - total;
    defect = std::max(defect, parent.mass_defect);
    defect = std::clamp(defect, 0.0, 1.0);
    child.mass_defect = defect;
    child.defect_warning = parent.defect_warning;
    return child;
}

DistVector SeriesEngine::advance(DistVector d, std::uint64_t steps) const {
    for (std::uint64_t i = 0; i < steps; ++i) d = step(d);
    return d;
}

DistVector step_distribution(const DistVector& parent, const GwiModel& model, std::size_t K) {
    if (parent.p.size() != K + 1) {
        DistVector resized = parent;
        resized.p.resize(K + 1, 0.0);
        if (parent.p.size() > K + 1) {
            // Mass beyond the new truncation moves into the defect.
            NeumaierSum lost;
            for (std::size_t j = K + 1; j < parent.p.size(); ++j) lost.add(parent.p[j]);
            resized.p.resize(K + 1);
            resized.mass_defect = std::clamp(parent.mass_defect + lost.value(), 0.0, 1.0);
        }
        SeriesEngine engine(model, K);
        return engine.step(resized);
    }
    SeriesEngine engine(model, K);
    return engine.step(parent);
}

DistVector distribution_at(const GwiModel& model, std::uint64_t n, std::size_t K,
                           double defect_budget) {
    SeriesEngine engine(model, K);
    DistVector d = engine.advance(initial_dist(K), n);
    if (d.mass_defect > defect_budget) d.defect_warning = true;
    return d;
}

std::size_t default_truncation(const GwiModel& model, std::uint64_t n) {
    const double k = 8.0 * model.gamma * model.sigma * static_cast<double>(n);
    if (!(k > 256.0)) return 256;
    return static_cast<std::size_t>(std::ceil(k));
}

double iterate_pgf_point(const PgfModel& offspring, double x, std::uint64_t m) {
    if (!(x >= 0.0) || x > 1.0) throw DomainError("iterate_pgf_point: x outside [0, 1]");
    return 1.0 - offspring.iterated_survival(1.0 - x, m);
}

double pgf_H_log(const GwiModel& model, std::uint64_t n, double x) {
    if (!(x >= 0.0) || x > 1.0) throw DomainError("pgf_H_log: x outside [0, 1]");
    const double u0 = 1.0 - x;
    NeumaierSum acc;
    const bool lf = model.offspring.family() == PgfFamily::linear_fractional;
    double u = u0;
    for (std::uint64_t m = 0; m < n; ++m) {
        acc.add(model.immigration.log_eval_1m(u));
        // Advance u = 1 - A_{m+1}(x). The linear-fractional family composes in
        // closed form, which avoids compounding per-step rounding.
        u = lf ? model.offspring.iterated_survival(u0, m + 1) : model.offspring.survival(u);
    }
    return acc.value();
}

double pgf_H_point(const GwiModel& model, std::uint64_t n, double x) {
    return std::exp(pgf_H_log(model, n, x));
}

ValueWithBracket inverse_moment(const GwiModel& model, std::uint64_t n, double r, std::size_t K) {
    if (!(r >= 0.0)) throw DomainError("inverse_moment: r must be >= 0");
    const DistVector d = distribution_at(model, n, K);
    NeumaierSum s;
    for (std::size_t j = 0; j < d.p.size(); ++j) {
        if (d.p[j] == 0.0) continue;
        s.add(d.p[j] * std::pow(static_cast<double>(j) + 1.0, -r));
    }
    const double bracket = d.mass_defect * std::pow(static_cast<double>(K) + 2.0, -r);
    return {s.value(), bracket};
}

} // namespace gwi
