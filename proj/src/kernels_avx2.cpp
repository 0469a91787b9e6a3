// AVX2 variants. Compiled with -mavx2 in its own translation unit; only
// reached after a runtime cpuid check.
//
// Equivalence contract: per output element the accumulation order is t
// ascending with separate multiply and add (no FMA), matching the scalar
// reference exactly. Lanes hold independent outputs, so vectorizing across
// outputs does not change any rounding.

#include <immintrin.h>

#include <cstddef>

namespace gwi::kernels::detail {

void axpy_avx2(double* dst, const double* src, std::size_t n, double w) {
    const __m256d vw = _mm256_set1_pd(w);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d s = _mm256_loadu_pd(src + i);
        const __m256d d = _mm256_loadu_pd(dst + i);
        _mm256_storeu_pd(dst + i, _mm256_add_pd(d, _mm256_mul_pd(vw, s)));
    }
    for (; i < n; ++i) dst[i] += w * src[i];
}

void conv_trunc_avx2(double* out, const double* src, std::size_t n, const double* k,
                     std::size_t klen) {
    // Head: outputs whose window is still growing (i < klen-1).
    std::size_t i = 0;
    const std::size_t head = (klen == 0) ? 0 : ((klen - 1 < n) ? klen - 1 : n);
    for (; i < head; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t <= i; ++t) acc += k[t] * src[i - t];
        out[i] = acc;
    }
    // Body: full window, four outputs per iteration.
    for (; i + 4 <= n; i += 4) {
        __m256d acc = _mm256_setzero_pd();
        for (std::size_t t = 0; t < klen; ++t) {
            const __m256d kv = _mm256_set1_pd(k[t]);
            const __m256d sv = _mm256_loadu_pd(src + (i - t));
            acc = _mm256_add_pd(acc, _mm256_mul_pd(kv, sv));
        }
        _mm256_storeu_pd(out + i, acc);
    }
    // Tail.
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < klen; ++t) acc += k[t] * src[i - t];
        out[i] = acc;
    }
}

} // namespace gwi::kernels::detail
