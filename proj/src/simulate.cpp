#include "gwi/simulate.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

#include "gwi/errors.hpp"
#include "gwi/util.hpp"

namespace gwi::mc {

// ----------------------------------------------------------------------------
// RNG
// ----------------------------------------------------------------------------

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

} // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t replication) {
    // Injective in the replication index for a fixed master seed.
    std::uint64_t x = master_seed ^ (replication * 0x9E3779B97F4A7C15ull + 0x632BE59BD9B4E019ull);
    s_[0] = splitmix64(x);
    s_[1] = splitmix64(x);
    s_[2] = splitmix64(x);
    s_[3] = splitmix64(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

// ----------------------------------------------------------------------------
// Scalar samplers
// ----------------------------------------------------------------------------

namespace {

constexpr double kMaxCount = 4.0e18;  // refuse counts the integer types cannot hold

// Stirling series tail of log k!: log k! = k log k - k + 0.5 log(2 pi k) + ldc(k+1)
double stirling_tail(double x) {
    const double x2 = x * x;
    return (13860.0 - (462.0 - (132.0 - (99.0 - 140.0 / x2) / x2) / x2) / x2) / x / 166320.0;
}

std::uint64_t poisson_inversion(RngStream& rng, double mean) {
    const double u = rng.next_open();
    double p = std::exp(-mean);
    double cum = p;
    std::uint64_t k = 0;
    while (u > cum) {
        ++k;
        p *= mean / static_cast<double>(k);
        cum += p;
        if (k > 2000) break;  // unreachable for mean < 40 at double precision
    }
    return k;
}

// Transformed-rejection Poisson for mean >= 10 (PTRS).
std::uint64_t poisson_ptrs(RngStream& rng, double mean) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_open();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (kf < 0.0) continue;
        if (us >= 0.07 && v <= vr) {
            if (kf > kMaxCount) throw OverflowError("poisson sample beyond representable range");
            return static_cast<std::uint64_t>(kf);
        }
        if (us < 0.013 && v > us) continue;
        const double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
        const double logfact = kf * std::log(kf) - kf + 0.5 * std::log(2.0 * M_PI * kf) +
                               stirling_tail(kf + 1.0);
        const double rhs = kf * loglam - mean - ((kf < 1.0) ? 0.0 : logfact);
        if (lhs <= rhs) {
            if (kf > kMaxCount) throw OverflowError("poisson sample beyond representable range");
            return static_cast<std::uint64_t>(kf);
        }
    }
}

} // namespace

std::uint64_t sample_poisson(RngStream& rng, double mean) {
    if (!(mean >= 0.0)) throw DomainError("sample_poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > kMaxCount) throw OverflowError("poisson mean beyond representable range");
    return (mean < 40.0) ? poisson_inversion(rng, mean) : poisson_ptrs(rng, mean);
}

double sample_std_normal(RngStream& rng) {
    // Box-Muller; fixed two-uniform consumption.
    const double u1 = rng.next_open();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double sample_gamma(RngStream& rng, double shape) {
    if (!(shape >= 0.0)) throw DomainError("sample_gamma: negative shape");
    if (shape == 0.0) return 0.0;
    if (shape < 1.0) {
        // Boost from shape+1.
        const double g = sample_gamma(rng, shape + 1.0);
        const double u = rng.next_open();
        return g * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = sample_std_normal(rng);
        const double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        const double v = t * t * t;
        const double u = rng.next_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t sample_geometric(RngStream& rng, double q) {
    if (!(q >= 0.0) || q >= 1.0) throw DomainError("sample_geometric: q outside [0, 1)");
    if (q == 0.0) return 0;
    const double u = rng.next_open();
    const double g = std::floor(std::log(u) / std::log(q));
    if (g > kMaxCount) throw OverflowError("geometric sample beyond representable range");
    return static_cast<std::uint64_t>(g);
}

std::uint64_t sample_negative_binomial(RngStream& rng, double shape, double odds) {
    if (!(shape >= 0.0)) throw DomainError("sample_negative_binomial: negative shape");
    if (!(odds > 0.0)) throw DomainError("sample_negative_binomial: odds must be positive");
    if (shape == 0.0) return 0;
    if (shape == 1.0) return sample_geometric(rng, odds / (1.0 + odds));
    return sample_poisson(rng, sample_gamma(rng, shape) * odds);
}

namespace {

std::uint64_t binomial_inversion(RngStream& rng, std::uint64_t n, double p) {
    // n * p < ~44 guaranteed by caller; q^n stays in range.
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    double r = std::exp(static_cast<double>(n) * std::log(q));
    double u = rng.next_open();
    std::uint64_t k = 0;
    for (;;) {
        if (u <= r) return k;
        u -= r;
        ++k;
        if (k > n) return n;  // fp slack guard
        r *= a / static_cast<double>(k) - s;
    }
}

// BTPE (triangle / parallelogram / exponential-tails rejection) for
// n*min(p,1-p) >= 30.
std::uint64_t binomial_btpe(RngStream& rng, std::uint64_t n_, double p_) {
    const double n = static_cast<double>(n_);
    const double r = std::min(p_, 1.0 - p_);
    const double q = 1.0 - r;
    const double fm = n * r + r;
    const double m = std::floor(fm);
    const double nrq = n * r * q;
    const double p1 = std::floor(2.195 * std::sqrt(nrq) - 4.6 * q) + 0.5;
    const double xm = m + 0.5;
    const double xl = xm - p1;
    const double xr = xm + p1;
    const double c = 0.134 + 20.5 / (15.3 + m);
    double al = (fm - xl) / (fm - xl * r);
    const double lambda_l = al * (1.0 + 0.5 * al);
    al = (xr - fm) / (xr * q);
    const double lambda_r = al * (1.0 + 0.5 * al);
    const double p2 = p1 * (1.0 + 2.0 * c);
    const double p3 = p2 + c / lambda_l;
    const double p4 = p3 + c / lambda_r;

    double y;
    for (;;) {
        const double u = rng.next_double() * p4;
        double v = rng.next_open();
        if (u <= p1) {
            y = std::floor(xm - p1 * v + u);
            break;  // triangular region: accept immediately
        }
        if (u <= p2) {
            const double x = xl + (u - p1) / c;
            v = v * c + 1.0 - std::abs(x - xm) / p1;
            if (v > 1.0 || v <= 0.0) continue;
            y = std::floor(x);
        } else if (u <= p3) {
            y = std::floor(xl + std::log(v) / lambda_l);
            if (y < 0.0) continue;
            v = v * (u - p2) * lambda_l;
        } else {
            y = std::floor(xr - std::log(v) / lambda_r);
            if (y > n) continue;
            v = v * (u - p3) * lambda_r;
        }

        const double k = std::abs(y - m);
        if (k <= 20.0 || k >= 0.5 * nrq - 1.0) {
            // Direct ratio f(y)/f(m) by multiplying the pmf recurrence.
            const double s = r / q;
            const double aa = s * (n + 1.0);
            double f = 1.0;
            if (m < y) {
                for (double i = m + 1.0; i <= y; i += 1.0) f *= (aa / i - s);
            } else if (m > y) {
                for (double i = y + 1.0; i <= m; i += 1.0) f /= (aa / i - s);
            }
            if (v <= f) break;
            continue;
        }
        const double rho =
            (k / nrq) * ((k * (k / 3.0 + 0.625) + 1.0 / 6.0) / nrq + 0.5);
        const double t = -k * k / (2.0 * nrq);
        const double big_a = std::log(v);
        if (big_a < t - rho) break;
        if (big_a > t + rho) continue;
        // Exact log-pmf ratio test with Stirling tails.
        const double x1 = y + 1.0;
        const double f1 = m + 1.0;
        const double z = n + 1.0 - m;
        const double w = n - y + 1.0;
        const double rhs = xm * std::log(f1 / x1) + (n - m + 0.5) * std::log(z / w) +
                           (y - m) * std::log(w * r / (x1 * q)) + stirling_tail(f1) +
                           stirling_tail(z) + stirling_tail(x1) + stirling_tail(w);
        if (big_a <= rhs) break;
    }
    const std::uint64_t yy = static_cast<std::uint64_t>(y);
    return (p_ > 0.5) ? n_ - yy : yy;
}

} // namespace

std::uint64_t sample_binomial(RngStream& rng, std::uint64_t trials, double p) {
    if (!(p >= 0.0) || p > 1.0) throw DomainError("sample_binomial: p outside [0, 1]");
    if (trials == 0 || p == 0.0) return 0;
    if (p == 1.0) return trials;
    const double pr = std::min(p, 1.0 - p);
    const double np = static_cast<double>(trials) * pr;
    if (np < 30.0) {
        const std::uint64_t k = binomial_inversion(rng, trials, pr);
        return (p > 0.5) ? trials - k : k;
    }
    return binomial_btpe(rng, trials, p);
}

// ----------------------------------------------------------------------------
// Alias table
// ----------------------------------------------------------------------------

AliasTable::AliasTable(std::span<const double> probs) {
    const std::size_t n = probs.size();
    if (n == 0) throw DomainError("AliasTable: empty distribution");
    NeumaierSum total;
    for (double p : probs) {
        if (!(p >= 0.0)) throw NormalizationError("AliasTable: negative probability");
        total.add(p);
    }
    const double norm = total.value();
    if (!(norm > 0.0)) throw NormalizationError("AliasTable: zero total mass");
    threshold_.assign(n, 0.0);
    alias_.assign(n, 0);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i) scaled[i] = probs[i] * static_cast<double>(n) / norm;
    std::vector<std::uint32_t> small, large;
    small.reserve(n);
    large.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
        const std::uint32_t s = small.back();
        small.pop_back();
        const std::uint32_t l = large.back();
        large.pop_back();
        threshold_[s] = scaled[s];
        alias_[s] = l;
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        (scaled[l] < 1.0 ? small : large).push_back(l);
    }
    for (std::uint32_t i : large) threshold_[i] = 1.0;
    for (std::uint32_t i : small) threshold_[i] = 1.0;  // fp leftovers
}

std::uint64_t AliasTable::draw(RngStream& rng) const {
    const std::size_t n = threshold_.size();
    const double u = rng.next_double() * static_cast<double>(n);
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= n) i = n - 1;
    const double frac = u - static_cast<double>(i);
    return (frac < threshold_[i]) ? i : alias_[i];
}

// ----------------------------------------------------------------------------
// Family-bound sampler
// ----------------------------------------------------------------------------

Sampler::Sampler(const PgfModel& model) : model_(model) {
    if (model_.family() == PgfFamily::finite_support) {
        alias_probs_ = model_.probs();
        alias_ = std::make_unique<AliasTable>(alias_probs_);
    }
}

std::uint64_t Sampler::draw(RngStream& rng) const {
    switch (model_.family()) {
        case PgfFamily::finite_support:
            return alias_->draw(rng);
        case PgfFamily::linear_fractional: {
            const double g = model_.lf_gamma();
            const double q = g / (1.0 + g);
            if (rng.next_double() < q) return 0;  // zero mass is q
            return 1 + sample_geometric(rng, q);
        }
        case PgfFamily::negative_binomial:
            return sample_negative_binomial(rng, model_.nb_sigma(), model_.nb_gamma());
        case PgfFamily::poisson:
            return sample_poisson(rng, model_.poisson_mean());
    }
    throw DomainError("Sampler: bad family");
}

std::uint64_t Sampler::draw_sum(RngStream& rng, std::uint64_t m) const {
    if (m == 0) return 0;
    if (m == 1) return draw(rng);
    switch (model_.family()) {
        case PgfFamily::finite_support: {
            unsigned __int128 acc = 0;
            for (std::uint64_t i = 0; i < m; ++i) {
                acc += alias_->draw(rng);
                if (acc > kPopulationLimit) throw OverflowError("offspring sum overflow");
            }
            return static_cast<std::uint64_t>(acc);
        }
        case PgfFamily::linear_fractional: {
            const double g = model_.lf_gamma();
            if (g == 1.0) {
                // The gamma=1 law is plain geometric(1/2); the m-fold sum is
                // negative binomial directly.
                return sample_negative_binomial(rng, static_cast<double>(m), 1.0);
            }
            // Sum = (# positive draws) + sum of that many geometric(q) tails.
            const std::uint64_t b = sample_binomial(rng, m, 1.0 / (1.0 + g));
            if (b == 0) return 0;
            const std::uint64_t tail = sample_negative_binomial(rng, static_cast<double>(b), g);
            const unsigned __int128 acc = static_cast<unsigned __int128>(b) + tail;
            if (acc > kPopulationLimit) throw OverflowError("offspring sum overflow");
            return static_cast<std::uint64_t>(acc);
        }
        case PgfFamily::negative_binomial:
            return sample_negative_binomial(
                rng, model_.nb_sigma() * static_cast<double>(m), model_.nb_gamma());
        case PgfFamily::poisson: {
            const double lam = model_.poisson_mean() * static_cast<double>(m);
            return sample_poisson(rng, lam);
        }
    }
    throw DomainError("Sampler: bad family");
}

// ----------------------------------------------------------------------------
// Trajectories
// ----------------------------------------------------------------------------

namespace {

struct RunSpec {
    std::uint64_t n;
    bool need_next;
    std::uint64_t short_circuit;  // 0 = none; else stop once max reaches it
};

Trajectory run_one(const Sampler& off, const Sampler& imm, const RunSpec& spec,
                   RngStream& rng) {
    Trajectory t;
    try {
        std::uint64_t z = 0;
        for (std::uint64_t gen = 1; gen <= spec.n; ++gen) {
            const std::uint64_t births = off.draw_sum(rng, z);
            const std::uint64_t y = imm.draw(rng);
            const unsigned __int128 next =
                static_cast<unsigned __int128>(births) + static_cast<unsigned __int128>(y);
            if (next > kPopulationLimit) throw OverflowError("population overflow");
            z = static_cast<std::uint64_t>(next);
            if (z > t.m_n) t.m_n = z;
            if (spec.short_circuit != 0 && t.m_n >= spec.short_circuit) {
                t.z_n = z;
                return t;
            }
        }
        t.z_n = z;
        if (spec.need_next) {
            const std::uint64_t births = off.draw_sum(rng, z);
            const std::uint64_t y = imm.draw(rng);
            const unsigned __int128 next =
                static_cast<unsigned __int128>(births) + static_cast<unsigned __int128>(y);
            if (next > kPopulationLimit) throw OverflowError("population overflow");
            t.z_next = static_cast<std::uint64_t>(next);
        }
    } catch (const OverflowError&) {
        t.overflow = true;
    }
    return t;
}

} // namespace

Trajectory sample_generation_n(const GwiModel& model, std::uint64_t n, RngStream& rng) {
    const Sampler off(model.offspring);
    const Sampler imm(model.immigration);
    return run_one(off, imm, {n, true, 0}, rng);
}

// ----------------------------------------------------------------------------
// Block-deterministic reduction
// ----------------------------------------------------------------------------

namespace {

constexpr std::uint64_t kBlockReps = 65536;

struct BlockAccum {
    std::uint64_t hits = 0;
    std::uint64_t contributing = 0;
    std::uint64_t zeros = 0;
    std::uint64_t overflows = 0;
    NeumaierSum m1, m2, m3, m4;  // moments of (ratio - 1)
};

// Runs per_rep for every replication index, grouped into fixed blocks.
// Within a block replications run sequentially in index order; blocks may be
// claimed by any worker. Results depend only on (seed, reps), not on workers.
std::vector<BlockAccum> run_blocks(std::uint64_t reps, unsigned workers,
                                   const std::function<void(std::uint64_t, BlockAccum&)>& per_rep) {
    const std::uint64_t blocks = (reps + kBlockReps - 1) / kBlockReps;
    std::vector<BlockAccum> out(static_cast<std::size_t>(blocks));
    if (blocks == 0) return out;
    const auto run_block = [&](std::uint64_t b) {
        BlockAccum& acc = out[static_cast<std::size_t>(b)];
        const std::uint64_t lo = b * kBlockReps;
        const std::uint64_t hi = std::min(reps, lo + kBlockReps);
        for (std::uint64_t rep = lo; rep < hi; ++rep) per_rep(rep, acc);
    };
    if (workers <= 1 || blocks == 1) {
        for (std::uint64_t b = 0; b < blocks; ++b) run_block(b);
        return out;
    }
    std::atomic<std::uint64_t> next{0};
    const unsigned nthreads = static_cast<unsigned>(
        std::min<std::uint64_t>(workers, blocks));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t b = next.fetch_add(1);
                if (b >= blocks) return;
                run_block(b);
            }
        });
    }
    for (auto& th : pool) th.join();
    return out;
}

struct Combined {
    std::uint64_t hits = 0, contributing = 0, zeros = 0, overflows = 0;
    double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
};

Combined combine(const std::vector<BlockAccum>& blocks) {
    Combined c;
    NeumaierSum s1, s2, s3, s4;
    for (const BlockAccum& b : blocks) {
        c.hits += b.hits;
        c.contributing += b.contributing;
        c.zeros += b.zeros;
        c.overflows += b.overflows;
        s1.add(b.m1.value());
        s2.add(b.m2.value());
        s3.add(b.m3.value());
        s4.add(b.m4.value());
    }
    c.s1 = s1.value();
    c.s2 = s2.value();
    c.s3 = s3.value();
    c.s4 = s4.value();
    return c;
}

McEstimate finish_probability(const Combined& c, const McOptions& opt, std::string kind) {
    if (c.contributing == 0)
        throw DegenerateConditioning("monte carlo: no replication satisfied the conditioning event");
    McEstimate e;
    e.kind = std::move(kind);
    e.value = static_cast<double>(c.hits) / static_cast<double>(c.contributing);
    const Interval w = wilson_interval(c.hits, c.contributing, kZ99);
    e.ci_lo = w.lo;
    e.ci_hi = w.hi;
    e.reps = opt.reps;
    e.contributing = c.contributing;
    e.zero_conditioned = c.zeros;
    e.overflowed = c.overflows;
    e.seed = opt.seed;
    return e;
}

} // namespace

McEstimate mc_tail(const GwiModel& model, std::uint64_t n, std::uint64_t k, const McOptions& opt) {
    const Sampler off(model.offspring);
    const Sampler imm(model.immigration);
    const RunSpec spec{n, false, 0};
    const auto per_rep = [&](std::uint64_t rep, BlockAccum& acc) {
        RngStream rng(opt.seed, rep);
        const Trajectory t = run_one(off, imm, spec, rng);
        if (t.overflow) {
            ++acc.overflows;
            return;
        }
        ++acc.contributing;
        if (t.z_n >= k) ++acc.hits;
    };
    return finish_probability(combine(run_blocks(opt.reps, opt.workers, per_rep)), opt,
                              "probability");
}

McEstimate mc_max_tail(const GwiModel& model, std::uint64_t n, std::uint64_t k,
                       const McOptions& opt) {
    if (k == 0) throw DomainError("mc_max_tail: k must be >= 1");
    const Sampler off(model.offspring);
    const Sampler imm(model.immigration);
    const RunSpec spec{n, false, k};
    const auto per_rep = [&](std::uint64_t rep, BlockAccum& acc) {
        RngStream rng(opt.seed, rep);
        const Trajectory t = run_one(off, imm, spec, rng);
        if (t.overflow) {
            ++acc.overflows;
            return;
        }
        ++acc.contributing;
        if (t.m_n >= k) ++acc.hits;
    };
    return finish_probability(combine(run_blocks(opt.reps, opt.workers, per_rep)), opt,
                              "probability");
}

McEstimate mc_ratio_deviation(const GwiModel& model, std::uint64_t n, double eps,
                              const McOptions& opt) {
    if (!(eps > 0.0)) throw DomainError("mc_ratio_deviation: eps must be positive");
    const Sampler off(model.offspring);
    const Sampler imm(model.immigration);
    const RunSpec spec{n, true, 0};
    const auto per_rep = [&](std::uint64_t rep, BlockAccum& acc) {
        RngStream rng(opt.seed, rep);
        const Trajectory t = run_one(off, imm, spec, rng);
        if (t.overflow) {
            ++acc.overflows;
            return;
        }
        if (t.z_n == 0) {
            ++acc.zeros;
            return;
        }
        ++acc.contributing;
        const double r = static_cast<double>(t.z_next) / static_cast<double>(t.z_n);
        if (std::abs(r - 1.0) > eps) ++acc.hits;
    };
    return finish_probability(combine(run_blocks(opt.reps, opt.workers, per_rep)), opt,
                              "probability");
}

McEstimate mc_conditional_ratio_variance(const GwiModel& model, std::uint64_t n,
                                         const McOptions& opt) {
    const Sampler off(model.offspring);
    const Sampler imm(model.immigration);
    const RunSpec spec{n, true, 0};
    const auto per_rep = [&](std::uint64_t rep, BlockAccum& acc) {
        RngStream rng(opt.seed, rep);
        const Trajectory t = run_one(off, imm, spec, rng);
        if (t.overflow) {
            ++acc.overflows;
            return;
        }
        if (t.z_n == 0) {
            ++acc.zeros;
            return;
        }
        ++acc.contributing;
        const double y = static_cast<double>(t.z_next) / static_cast<double>(t.z_n) - 1.0;
        const double y2 = y * y;
        acc.m1.add(y);
        acc.m2.add(y2);
        acc.m3.add(y2 * y);
        acc.m4.add(y2 * y2);
    };
    const Combined c = combine(run_blocks(opt.reps, opt.workers, per_rep));
    if (c.contributing < 2)
        throw DegenerateConditioning("mc_conditional_ratio_variance: fewer than 2 conditioned replications");
    const double m = static_cast<double>(c.contributing);
    const double mean = c.s1 / m;
    const double m2c = std::max(0.0, c.s2 / m - mean * mean);
    const double var = m2c * m / (m - 1.0);
    const double m4c = std::max(
        0.0, c.s4 / m - 4.0 * mean * (c.s3 / m) + 6.0 * mean * mean * (c.s2 / m) -
                 3.0 * mean * mean * mean * mean);
    const double se = std::sqrt(std::max(0.0, m4c - m2c * m2c) / m);
    McEstimate e;
    e.kind = "variance";
    e.value = var;
    e.ci_lo = std::max(0.0, var - kZ99 * se);
    e.ci_hi = var + kZ99 * se;
    e.reps = opt.reps;
    e.contributing = c.contributing;
    e.zero_conditioned = c.zeros;
    e.overflowed = c.overflows;
    e.seed = opt.seed;
    return e;
}

} // namespace gwi::mc
