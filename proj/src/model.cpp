#include "gwi/model.hpp"

#include <cmath>

#include "gwi/errors.hpp"

namespace gwi {

namespace {

GwiModel build(PgfModel a, PgfModel b) {
    GwiModel m{std::move(a), std::move(b), 0, 0, 0, 0, 0, 0, 0, 0, false};
    m.alpha = m.offspring.mean();
    m.beta = m.immigration.mean();
    m.gamma = 0.5 * m.offspring.second_factorial();
    m.sigma = (m.gamma > 0.0) ? m.beta / m.gamma : 0.0;
    m.rho = m.offspring.third_factorial();
    m.offspring_variance = m.offspring.variance();
    m.immigration_variance = m.immigration.variance();
    m.radius = m.offspring.radius();
    m.conjugate = m.offspring.family() == PgfFamily::linear_fractional &&
                  m.immigration.family() == PgfFamily::negative_binomial &&
                  std::abs(m.offspring.lf_gamma() - m.immigration.nb_gamma()) <=
                      1e-12 * std::max(1.0, m.offspring.lf_gamma());
    return m;
}

} // namespace

GwiModel GwiModel::validate(PgfModel offspring, PgfModel immigration) {
    GwiModel m = build(std::move(offspring), std::move(immigration));
    if (std::abs(m.alpha - 1.0) > 1e-12)
        throw DomainError("model validation failed [criticality]: offspring mean " +
                          std::to_string(m.alpha) + " != 1");
    const double a0 = m.offspring.eval(0.0);
    if (!(a0 > 0.0 && a0 < 1.0))
        throw DomainError("model validation failed [offspring zero mass]: A(0) = " +
                          std::to_string(a0) + " outside (0, 1)");
    const double b0 = m.immigration.eval(0.0);
    if (!(b0 > 0.0 && b0 < 1.0))
        throw DomainError("model validation failed [immigration zero mass]: B(0) = " +
                          std::to_string(b0) + " outside (0, 1)");
    if (!(m.beta > 0.0) || !std::isfinite(m.beta))
        throw DomainError("model validation failed [immigration mean]: B'(1) = " +
                          std::to_string(m.beta) + " outside (0, inf)");
    if (!(m.gamma > 0.0) || !std::isfinite(m.gamma))
        throw DomainError("model validation failed [offspring spread]: A''(1)/2 = " +
                          std::to_string(m.gamma) + " outside (0, inf)");
    return m;
}

GwiModel GwiModel::unchecked(PgfModel offspring, PgfModel immigration) {
    return build(std::move(offspring), std::move(immigration));
}

std::string GwiModel::describe() const {
    return "offspring=" + offspring.describe() + " immigration=" + immigration.describe();
}

} // namespace gwi
