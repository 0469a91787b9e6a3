#pragma once

#include <stdexcept>
#include <string>

namespace gwi {

// Invalid mathematical input: out-of-domain argument, bad parameter, or a
// model that fails a structural requirement.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Probability vector does not sum to 1 within tolerance, or has negative entries.
class NormalizationError : public DomainError {
public:
    explicit NormalizationError(const std::string& what) : DomainError(what) {}
};

// A computation lost too much accuracy to certify its result (failed bracket,
// non-converging root find, defect budget exceeded where a hard guarantee was asked).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A conditional Monte Carlo estimate had no replications satisfying the
// conditioning event, so the estimate does not exist.
class DegenerateConditioning : public std::runtime_error {
public:
    explicit DegenerateConditioning(const std::string& what) : std::runtime_error(what) {}
};

// Simulated population left the representable range.
class OverflowError : public std::runtime_error {
public:
    explicit OverflowError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed experiment configuration (parse errors carry line numbers).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace gwi
