#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops of the framework: pixel conversion, affine
// resampling and the dense math the trainable backbones run on. Every kernel
// has a scalar reference implementation and, on x86-64 with AVX2+FMA, a
// vector variant selected once at startup. FERBENCH_SIMD=scalar|avx2|auto
// overrides the selection (tests use it for equivalence checks).

namespace ferbench::simd {

enum class Backend { scalar, avx2 };

Backend active_backend();
const char* backend_name();
bool avx2_available();

// Test hook. Throws ContractError when the backend is unavailable.
void force_backend(Backend b);

// sum_i a[i]*b[i]
float dot(const float* a, const float* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(float alpha, const float* x, float* y, std::size_t n);

// y[i] = clamp(scale * x[i] + bias, lo, hi)
void scale_bias(const float* x, float* y, std::size_t n,
                float scale, float bias, float lo, float hi);

// Interleaved 8-bit RGB -> BT.601 luma, float output on the 0..255 scale.
void luma_rgb8(const std::uint8_t* rgb, float* gray, std::size_t npixels);

// Inverse-mapped affine warp with bilinear sampling; source pixels outside
// the image contribute 0 (black padding). m maps destination (x, y) to
// source coordinates: sx = m[0]x + m[1]y + m[2], sy = m[3]x + m[4]y + m[5].
void warp_affine_bilinear(const float* src, int src_w, int src_h,
                          float* dst, int dst_w, int dst_h,
                          const float m[6]);

// Row-major dense products built on the primitives above.
// C(m x n) += A(m x k) * B(k x n)
void gemm_nn(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n);
// C(m x n) += A(m x k) * B(n x k)^T
void gemm_nt(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n);
// C(k x n) += A(m x k)^T * B(m x n)
void gemm_tn(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n);

}  // namespace ferbench::simd
