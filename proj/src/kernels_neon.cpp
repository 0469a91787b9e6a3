// NEON variants (aarch64, 2-wide f64). Same equivalence contract as the AVX2
// unit: per-output t-ascending accumulation, multiply then add, no fused ops.

#include <arm_neon.h>

#include <cstddef>

namespace gwi::kernels::detail {

void axpy_neon(double* dst, const double* src, std::size_t n, double w) {
    const float64x2_t vw = vdupq_n_f64(w);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t s = vld1q_f64(src + i);
        const float64x2_t d = vld1q_f64(dst + i);
        vst1q_f64(dst + i, vaddq_f64(d, vmulq_f64(vw, s)));
    }
    for (; i < n; ++i) dst[i] += w * src[i];
}

void conv_trunc_neon(double* out, const double* src, std::size_t n, const double* k,
                     std::size_t klen) {
    std::size_t i = 0;
    const std::size_t head = (klen == 0) ? 0 : ((klen - 1 < n) ? klen - 1 : n);
    for (; i < head; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t <= i; ++t) acc += k[t] * src[i - t];
        out[i] = acc;
    }
    for (; i + 2 <= n; i += 2) {
        float64x2_t acc = vdupq_n_f64(0.0);
        for (std::size_t t = 0; t < klen; ++t) {
            const float64x2_t kv = vdupq_n_f64(k[t]);
            const float64x2_t sv = vld1q_f64(src + (i - t));
            acc = vaddq_f64(acc, vmulq_f64(kv, sv));
        }
        vst1q_f64(out + i, acc);
    }
    for (; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t t = 0; t < klen; ++t) acc += k[t] * src[i - t];
        out[i] = acc;
    }
}

} // namespace gwi::kernels::detail
