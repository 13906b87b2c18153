#include "ferbench/simd/kernels.hpp"

#include <cstdlib>
#include <mutex>
#include <string>

#include "ferbench/common.hpp"

namespace ferbench::simd {

namespace scalar {
float dot(const float*, const float*, std::size_t);
void axpy(float, const float*, float*, std::size_t);
void scale_bias(const float*, float*, std::size_t, float, float, float, float);
void luma_rgb8(const std::uint8_t*, float*, std::size_t);
void warp_affine_bilinear(const float*, int, int, float*, int, int, const float*);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
float dot(const float*, const float*, std::size_t);
void axpy(float, const float*, float*, std::size_t);
void scale_bias(const float*, float*, std::size_t, float, float, float, float);
void luma_rgb8(const std::uint8_t*, float*, std::size_t);
void warp_affine_bilinear(const float*, int, int, float*, int, int, const float*);
}  // namespace avx2
#endif

namespace {

struct KernelTable {
    Backend backend = Backend::scalar;
    float (*dot)(const float*, const float*, std::size_t) = &scalar::dot;
    void (*axpy)(float, const float*, float*, std::size_t) = &scalar::axpy;
    void (*scale_bias)(const float*, float*, std::size_t, float, float, float, float) =
        &scalar::scale_bias;
    void (*luma)(const std::uint8_t*, float*, std::size_t) = &scalar::luma_rgb8;
    void (*warp)(const float*, int, int, float*, int, int, const float*) =
        &scalar::warp_affine_bilinear;
};

KernelTable g_table;
std::once_flag g_init_flag;

void set_table(Backend b) {
    KernelTable t;
    t.backend = Backend::scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (b == Backend::avx2) {
        t.backend = Backend::avx2;
        t.dot = &avx2::dot;
        t.axpy = &avx2::axpy;
        t.scale_bias = &avx2::scale_bias;
        t.luma = &avx2::luma_rgb8;
        t.warp = &avx2::warp_affine_bilinear;
    }
#else
    (void)b;
#endif
    g_table = t;
}

void init_from_environment() {
    Backend pick = avx2_available() ? Backend::avx2 : Backend::scalar;
    if (const char* env = std::getenv("FERBENCH_SIMD")) {
        const std::string v(env);
        if (v == "scalar") {
            pick = Backend::scalar;
        } else if (v == "avx2") {
            if (!avx2_available())
                throw ContractError("FERBENCH_SIMD=avx2 but AVX2 is not available on this CPU");
            pick = Backend::avx2;
        }  // anything else (including "auto") keeps the detected default
    }
    set_table(pick);
}

const KernelTable& table() {
    std::call_once(g_init_flag, init_from_environment);
    return g_table;
}

}  // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend active_backend() { return table().backend; }

const char* backend_name() {
    return active_backend() == Backend::avx2 ? "avx2" : "scalar";
}

void force_backend(Backend b) {
    if (b == Backend::avx2 && !avx2_available())
        throw ContractError("AVX2 backend requested but not available");
    table();  // ensure one-time init ran first
    set_table(b);
}

float dot(const float* a, const float* b, std::size_t n) {
    return table().dot(a, b, n);
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    table().axpy(alpha, x, y, n);
}

void scale_bias(const float* x, float* y, std::size_t n,
                float scale, float bias, float lo, float hi) {
    table().scale_bias(x, y, n, scale, bias, lo, hi);
}

void luma_rgb8(const std::uint8_t* rgb, float* gray, std::size_t npixels) {
    table().luma(rgb, gray, npixels);
}

void warp_affine_bilinear(const float* src, int src_w, int src_h,
                          float* dst, int dst_w, int dst_h,
                          const float m[6]) {
    table().warp(src, src_w, src_h, dst, dst_w, dst_h, m);
}

void gemm_nn(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            axpy(a[i * k + l], b + l * n, c + i * n, n);
        }
    }
}

void gemm_nt(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            c[i * n + j] += dot(a + i * k, b + j * k, k);
        }
    }
}

void gemm_tn(const float* a, const float* b, float* c,
             std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < k; ++l) {
            axpy(a[i * k + l], b + i * n, c + l * n, n);
        }
    }
}

}  // namespace ferbench::simd
