#include "gwi/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <string>

#include "gwi/errors.hpp"

namespace gwi::kernels {

// ----------------------------------------------------------------------------
// Scalar reference implementations. These define the exact arithmetic; the
// SIMD variants must reproduce them bit for bit.
// ----------------------------------------------------------------------------

namespace detail {

void axpy_scalar(double* dst, const double* src, std::size_t n, double w) {
    for (std::size_t i = 0; i < n; ++i) dst[i] += w * src[i];
}

void conv_trunc_scalar(double* out, const double* src, std::size_t n, const double* k,
                       std::size_t klen) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t tmax = (i + 1 < klen) ? i + 1 : klen;
        double acc = 0.0;
        for (std::size_t t = 0; t < tmax; ++t) acc += k[t] * src[i - t];
        out[i] = acc;
    }
}

#if defined(GWI_HAVE_AVX2)
void axpy_avx2(double* dst, const double* src, std::size_t n, double w);
void conv_trunc_avx2(double* out, const double* src, std::size_t n, const double* k,
                     std::size_t klen);
#endif
#if defined(GWI_HAVE_NEON)
void axpy_neon(double* dst, const double* src, std::size_t n, double w);
void conv_trunc_neon(double* out, const double* src, std::size_t n, const double* k,
                     std::size_t klen);
#endif

} // namespace detail

const char* name(Arch a) noexcept {
    switch (a) {
        case Arch::scalar: return "scalar";
        case Arch::avx2: return "avx2";
        case Arch::neon: return "neon";
    }
    return "?";
}

bool supported(Arch a) noexcept {
    switch (a) {
        case Arch::scalar:
            return true;
        case Arch::avx2:
#if defined(GWI_HAVE_AVX2)
            return __builtin_cpu_supports("avx2") != 0;
#else
            return false;
#endif
        case Arch::neon:
#if defined(GWI_HAVE_NEON)
            return true; // baseline on aarch64
#else
            return false;
#endif
    }
    return false;
}

namespace {

Arch pick_default() {
    if (supported(Arch::avx2)) return Arch::avx2;
    if (supported(Arch::neon)) return Arch::neon;
    return Arch::scalar;
}

Arch resolve_env() {
    const char* env = std::getenv("GWI_KERNELS");
    if (env == nullptr || std::strcmp(env, "auto") == 0) return pick_default();
    if (std::strcmp(env, "scalar") == 0) return Arch::scalar;
    if (std::strcmp(env, "avx2") == 0) {
        if (!supported(Arch::avx2)) throw DomainError("GWI_KERNELS=avx2: not supported on this host");
        return Arch::avx2;
    }
    if (std::strcmp(env, "neon") == 0) {
        if (!supported(Arch::neon)) throw DomainError("GWI_KERNELS=neon: not supported on this host");
        return Arch::neon;
    }
    throw DomainError(std::string("GWI_KERNELS: unknown value '") + env + "'");
}

struct State {
    Arch arch;
    State() : arch(resolve_env()) {}
};

State& state() {
    static State s;
    return s;
}

} // namespace

Arch active() { return state().arch; }

void force(Arch a) {
    if (!supported(a)) throw DomainError(std::string("kernels: ") + name(a) + " not supported on this host");
    state().arch = a;
}

void reset() { state().arch = resolve_env(); }

void axpy(double* dst, const double* src, std::size_t n, double w) {
    switch (state().arch) {
#if defined(GWI_HAVE_AVX2)
        case Arch::avx2: return detail::axpy_avx2(dst, src, n, w);
#endif
#if defined(GWI_HAVE_NEON)
        case Arch::neon: return detail::axpy_neon(dst, src, n, w);
#endif
        default: return detail::axpy_scalar(dst, src, n, w);
    }
}

void conv_trunc(double* out, const double* src, std::size_t n, const double* kernel,
                std::size_t klen) {
    switch (state().arch) {
#if defined(GWI_HAVE_AVX2)
        case Arch::avx2: return detail::conv_trunc_avx2(out, src, n, kernel, klen);
#endif
#if defined(GWI_HAVE_NEON)
        case Arch::neon: return detail::conv_trunc_neon(out, src, n, kernel, klen);
#endif
        default: return detail::conv_trunc_scalar(out, src, n, kernel, klen);
    }
}

} // namespace gwi::kernels
