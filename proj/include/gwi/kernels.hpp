#pragma once

#include <cstddef>

// ============================================================================
// Dense inner loops of the series engine.
//
// Two kernels carry essentially all arithmetic of the distribution engine:
//
//   axpy        dst[i] += w * src[i]
//   conv_trunc  out[i]  = sum_{t=0..min(i,klen-1)} k[t] * src[i-t]
//
// Every variant (scalar, AVX2, NEON) evaluates each output with the same
// operation order: t ascending, multiply then add, no FMA. That makes the
// variants bit-identical, so the selection is purely a speed knob and the
// equivalence tests can assert exact equality.
// ============================================================================

namespace gwi::kernels {

enum class Arch { scalar, avx2, neon };

const char* name(Arch a) noexcept;
bool supported(Arch a) noexcept;

// Currently selected implementation. Defaults to the widest supported
// instruction set; the GWI_KERNELS environment variable (scalar|avx2|neon|auto)
// overrides the default before first use.
Arch active();

// Pin the implementation (throws DomainError if unsupported on this host).
void force(Arch a);

// Return to automatic selection (environment override still applies).
void reset();

void axpy(double* dst, const double* src, std::size_t n, double w);
void conv_trunc(double* out, const double* src, std::size_t n, const double* kernel,
                std::size_t klen);

} // namespace gwi::kernels
