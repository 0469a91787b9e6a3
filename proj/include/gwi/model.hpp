#pragma once

#include <string>

#include "gwi/pgf.hpp"

namespace gwi {

// A branching process with immigration: offspring law A (per-individual),
// immigration law B (per-generation), started from zero population.
//
// validate() enforces the structural conditions the asymptotic results need:
//   criticality        |A'(1) - 1| <= 1e-12
//   offspring zero     0 < A(0) < 1
//   immigration zero   0 < B(0) < 1
//   immigration mean   0 < B'(1) < inf
//   offspring spread   0 < A''(1)/2 < inf
// Each violation throws DomainError with a message naming the clause.
//
// unchecked() skips validation for plumbing tests with degenerate laws.
struct GwiModel {
    PgfModel offspring;
    PgfModel immigration;

    double alpha;    // offspring mean
    double beta;     // immigration mean
    double gamma;    // A''(1)/2
    double sigma;    // beta / gamma
    double rho;      // A'''(1)
    double offspring_variance;
    double immigration_variance;
    double radius;   // offspring convergence radius

    // True when offspring is linear-fractional and immigration is
    // negative-binomial with the same gamma: the product law of Z_n is then
    // negative-binomial in closed form and serves as the exact oracle.
    bool conjugate;

    static GwiModel validate(PgfModel offspring, PgfModel immigration);
    static GwiModel unchecked(PgfModel offspring, PgfModel immigration);

    std::string describe() const;
};

} // namespace gwi
