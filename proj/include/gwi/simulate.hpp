#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gwi/model.hpp"

namespace gwi::mc {

// Population cap. A replication whose population would pass this is aborted
// and tallied as overflowed rather than contributing a clipped value.
inline constexpr std::uint64_t kPopulationLimit = std::uint64_t{1} << 63;

// Counter-based substream generator: replication i of master seed s gets its
// own xoshiro256** state derived via SplitMix64 from (s, i). Streams can be
// created in any order by any worker, which is what makes the parallel
// reduction reproducible.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t replication);

    std::uint64_t next_u64();
    double next_double();  // uniform [0, 1), 53-bit
    double next_open();    // uniform (0, 1), excludes both endpoints

private:
    std::uint64_t s_[4];
};

// Exact-in-distribution samplers (no normal/CLT approximations of discrete
// laws anywhere). All throw OverflowError if a value would leave the
// representable range.
std::uint64_t sample_poisson(RngStream& rng, double mean);
std::uint64_t sample_binomial(RngStream& rng, std::uint64_t trials, double p);
std::uint64_t sample_geometric(RngStream& rng, double q);  // failures before success
double sample_std_normal(RngStream& rng);
double sample_gamma(RngStream& rng, double shape);  // unit scale
// Negative binomial via the Poisson-Gamma mixture: shape sigma, odds gamma.
std::uint64_t sample_negative_binomial(RngStream& rng, double shape, double odds);

// Walker alias table for finite-support laws.
class AliasTable {
public:
    explicit AliasTable(std::span<const double> probs);
    std::uint64_t draw(RngStream& rng) const;

private:
    std::vector<double> threshold_;
    std::vector<std::uint32_t> alias_;
};

// One PGF family bound to its exact sampler. draw_sum(m) samples the sum of m
// iid draws in O(1) where the family admits a closed-form aggregate
// (linear-fractional, negative-binomial, poisson) and by looping otherwise.
class Sampler {
public:
    explicit Sampler(const PgfModel& model);
    std::uint64_t draw(RngStream& rng) const;
    std::uint64_t draw_sum(RngStream& rng, std::uint64_t m) const;

private:
    PgfModel model_;
    std::vector<double> alias_probs_;
    std::unique_ptr<AliasTable> alias_;
};

struct Trajectory {
    std::uint64_t z_n = 0;
    std::uint64_t z_next = 0;  // population one generation past n
    std::uint64_t m_n = 0;     // max over generations 1..n
    bool overflow = false;
};

// Simulate one replication of the first n+1 generations from Z_0 = 0.
Trajectory sample_generation_n(const GwiModel& model, std::uint64_t n, RngStream& rng);

struct McOptions {
    std::uint64_t reps = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

struct McEstimate {
    std::string kind;  // "probability" | "variance"
    double value = 0.0;
    double ci_lo = 0.0;  // 99% confidence bounds
    double ci_hi = 0.0;
    std::uint64_t reps = 0;
    std::uint64_t contributing = 0;     // replications entering the estimate
    std::uint64_t zero_conditioned = 0; // excluded by the conditioning event
    std::uint64_t overflowed = 0;
    std::uint64_t seed = 0;
};

// P(Z_n >= k)
McEstimate mc_tail(const GwiModel& model, std::uint64_t n, std::uint64_t k, const McOptions& opt);
// P(max_{1<=m<=n} Z_m >= k)
McEstimate mc_max_tail(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                       const McOptions& opt);
// P(|Z_{n+1}/Z_n - 1| > eps | Z_n >= 1)
McEstimate mc_ratio_deviation(const GwiModel& model, std::uint64_t n, double eps,
                              const McOptions& opt);
// Var(Z_{n+1}/Z_n | Z_n >= 1)
McEstimate mc_conditional_ratio_variance(const GwiModel& model, std::uint64_t n,
                                         const McOptions& opt);

} // namespace gwi::mc
