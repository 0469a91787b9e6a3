#pragma once

#include <cstdint>
#include <vector>

#include "gwi/model.hpp"

namespace gwi {

// Distribution of one generation, truncated at index K. p[j] is an exact
// (floating-point-level) lower representation of P(Z_n = j); mass_defect is a
// certified upper bound on the probability mass the truncation lost, and is
// nondecreasing along generations.
struct DistVector {
    std::uint64_t n = 0;
    std::vector<double> p;
    double mass_defect = 0.0;
    bool defect_warning = false;

    std::size_t trunc() const { return p.size() - 1; }
};

DistVector initial_dist(std::size_t K);

// One-generation propagation: child[j] = sum_i parent[i] * (offspring^{*i} conv
// immigration)[j], all arrays truncated at K. Offspring convolution powers are
// cached in a table shared across steps; they are exact below the truncation
// because convolution output j only reads inputs <= j.
class SeriesEngine {
public:
    SeriesEngine(const GwiModel& model, std::size_t K);

    const GwiModel& model() const { return model_; }
    std::size_t trunc() const { return K_; }

    DistVector step(const DistVector& parent) const;
    DistVector advance(DistVector d, std::uint64_t steps) const;

private:
    const double* power_row(std::size_t j) const;

    GwiModel model_;
    std::size_t K_;
    std::vector<double> offspring_kernel_;
    std::vector<double> immigration_kernel_;
    mutable std::vector<double> table_;  // row j = offspring^{*j}, length K_+1
    mutable std::size_t rows_built_ = 0;
};

DistVector step_distribution(const DistVector& parent, const GwiModel& model, std::size_t K);

// n-fold propagation from the empty initial generation. If the final defect
// exceeds the budget the result is returned with defect_warning set.
DistVector distribution_at(const GwiModel& model, std::uint64_t n, std::size_t K,
                           double defect_budget = 1e-9);

// Default truncation: ~8x the mean population, floored at 256.
std::size_t default_truncation(const GwiModel& model, std::uint64_t n);

// m-fold composition of the offspring PGF evaluated at x in [0, 1].
double iterate_pgf_point(const PgfModel& offspring, double x, std::uint64_t m);

// E x^{Z_n} = prod_{m<n} B(A_m(x)) for x in [0, 1], accumulated in log space.
double pgf_H_log(const GwiModel& model, std::uint64_t n, double x);
double pgf_H_point(const GwiModel& model, std::uint64_t n, double x);

struct ValueWithBracket {
    double value;
    double bracket;  // certified one-sided slack from truncation
};

// E[(Z_n + 1)^{-r}] from the truncated law; bracket covers the missing mass.
ValueWithBracket inverse_moment(const GwiModel& model, std::uint64_t n, double r, std::size_t K);

} // namespace gwi
