// AVX2/FMA kernel variants. This translation unit is the only one compiled
// with -mavx2 -mfma; callers reach it through the dispatch table in
// kernels.cpp after the runtime CPU check.

#if defined(__x86_64__) || defined(_M_X64)

#include "ferbench/simd/kernels.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace ferbench::simd::avx2 {

namespace {

inline float hsum256(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    return _mm_cvtss_f32(lo);
}

}  // namespace

float dot(const float* a, const float* b, std::size_t n) {
    __m256 acc = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        acc = _mm256_fmadd_ps(va, vb, acc);
    }
    float sum = hsum256(acc);
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    const __m256 va = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256 vy = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(va, vx, vy));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_bias(const float* x, float* y, std::size_t n,
                float scale, float bias, float lo, float hi) {
    const __m256 vs = _mm256_set1_ps(scale);
    const __m256 vb = _mm256_set1_ps(bias);
    const __m256 vlo = _mm256_set1_ps(lo);
    const __m256 vhi = _mm256_set1_ps(hi);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 v = _mm256_fmadd_ps(vs, _mm256_loadu_ps(x + i), vb);
        v = _mm256_min_ps(vhi, _mm256_max_ps(vlo, v));
        _mm256_storeu_ps(y + i, v);
    }
    for (; i < n; ++i) y[i] = std::min(hi, std::max(lo, scale * x[i] + bias));
}

void luma_rgb8(const std::uint8_t* rgb, float* gray, std::size_t npixels) {
    const __m256 wr = _mm256_set1_ps(0.299f);
    const __m256 wg = _mm256_set1_ps(0.587f);
    const __m256 wb = _mm256_set1_ps(0.114f);
    const __m256i mask_ff = _mm256_set1_epi32(0xFF);
    // Byte offsets of 8 consecutive pixels; one 32-bit gather per pixel pulls
    // r, g, b together ([r g b r'] little-endian). The last gather touches one
    // byte past pixel i+7, so the vector loop stops two pixels early.
    const __m256i offs = _mm256_setr_epi32(0, 3, 6, 9, 12, 15, 18, 21);
    std::size_t i = 0;
    while (i + 8 <= npixels && (3 * (i + 7) + 4) <= 3 * npixels) {
        const int* base = reinterpret_cast<const int*>(rgb + 3 * i);
        const __m256i packed = _mm256_i32gather_epi32(base, offs, 1);
        const __m256 r = _mm256_cvtepi32_ps(_mm256_and_si256(packed, mask_ff));
        const __m256 g = _mm256_cvtepi32_ps(
            _mm256_and_si256(_mm256_srli_epi32(packed, 8), mask_ff));
        const __m256 b = _mm256_cvtepi32_ps(
            _mm256_and_si256(_mm256_srli_epi32(packed, 16), mask_ff));
        __m256 v = _mm256_mul_ps(wr, r);
        v = _mm256_fmadd_ps(wg, g, v);
        v = _mm256_fmadd_ps(wb, b, v);
        _mm256_storeu_ps(gray + i, v);
        i += 8;
    }
    for (; i < npixels; ++i) {
        gray[i] = 0.299f * rgb[3 * i + 0] + 0.587f * rgb[3 * i + 1] +
                  0.114f * rgb[3 * i + 2];
    }
}

void warp_affine_bilinear(const float* src, int src_w, int src_h,
                          float* dst, int dst_w, int dst_h,
                          const float m[6]) {
    const __m256 vm0 = _mm256_set1_ps(m[0]);
    const __m256 vm3 = _mm256_set1_ps(m[3]);
    const __m256 lane = _mm256_setr_ps(0, 1, 2, 3, 4, 5, 6, 7);
    const __m256i vsw = _mm256_set1_epi32(src_w);
    const __m256i vsh = _mm256_set1_epi32(src_h);
    const __m256i vzero = _mm256_setzero_si256();
    const __m256i vone = _mm256_set1_epi32(1);

    auto gather_masked = [&](__m256i xi, __m256i yi) -> __m256 {
        // valid = 0 <= xi < src_w && 0 <= yi < src_h
        __m256i okx = _mm256_and_si256(_mm256_cmpgt_epi32(vsw, xi),
                                       _mm256_cmpgt_epi32(xi, _mm256_sub_epi32(vzero, vone)));
        __m256i oky = _mm256_and_si256(_mm256_cmpgt_epi32(vsh, yi),
                                       _mm256_cmpgt_epi32(yi, _mm256_sub_epi32(vzero, vone)));
        __m256i ok = _mm256_and_si256(okx, oky);
        // Clamp indices so masked-off lanes still form valid addresses.
        __m256i cx = _mm256_min_epi32(_mm256_max_epi32(xi, vzero),
                                      _mm256_sub_epi32(vsw, vone));
        __m256i cy = _mm256_min_epi32(_mm256_max_epi32(yi, vzero),
                                      _mm256_sub_epi32(vsh, vone));
        __m256i idx = _mm256_add_epi32(_mm256_mullo_epi32(cy, vsw), cx);
        return _mm256_mask_i32gather_ps(_mm256_setzero_ps(), src, idx,
                                        _mm256_castsi256_ps(ok), 4);
    };

    for (int y = 0; y < dst_h; ++y) {
        const float fy = static_cast<float>(y);
        const float cx0 = m[1] * fy + m[2];
        const float cy0 = m[4] * fy + m[5];
        const __m256 vcx = _mm256_set1_ps(cx0);
        const __m256 vcy = _mm256_set1_ps(cy0);
        int x = 0;
        for (; x + 8 <= dst_w; x += 8) {
            const __m256 xs = _mm256_add_ps(_mm256_set1_ps(static_cast<float>(x)), lane);
            const __m256 sx = _mm256_fmadd_ps(vm0, xs, vcx);
            const __m256 sy = _mm256_fmadd_ps(vm3, xs, vcy);
            const __m256 x0f = _mm256_floor_ps(sx);
            const __m256 y0f = _mm256_floor_ps(sy);
            const __m256i x0 = _mm256_cvtps_epi32(x0f);
            const __m256i y0 = _mm256_cvtps_epi32(y0f);
            const __m256 wx = _mm256_sub_ps(sx, x0f);
            const __m256 wy = _mm256_sub_ps(sy, y0f);

            const __m256 v00 = gather_masked(x0, y0);
            const __m256 v10 = gather_masked(_mm256_add_epi32(x0, vone), y0);
            const __m256 v01 = gather_masked(x0, _mm256_add_epi32(y0, vone));
            const __m256 v11 = gather_masked(_mm256_add_epi32(x0, vone),
                                             _mm256_add_epi32(y0, vone));

            const __m256 top = _mm256_fmadd_ps(wx, _mm256_sub_ps(v10, v00), v00);
            const __m256 bot = _mm256_fmadd_ps(wx, _mm256_sub_ps(v11, v01), v01);
            const __m256 out = _mm256_fmadd_ps(wy, _mm256_sub_ps(bot, top), top);
            _mm256_storeu_ps(dst + static_cast<std::size_t>(y) * dst_w + x, out);
        }
        for (; x < dst_w; ++x) {
            const float fx = static_cast<float>(x);
            const float sx = m[0] * fx + cx0;
            const float sy = m[3] * fx + cy0;
            const float x0f = std::floor(sx);
            const float y0f = std::floor(sy);
            const int x0 = static_cast<int>(x0f);
            const int y0 = static_cast<int>(y0f);
            const float wx = sx - x0f;
            const float wy = sy - y0f;
            auto at = [&](int xi, int yi) -> float {
                if (xi < 0 || yi < 0 || xi >= src_w || yi >= src_h) return 0.0f;
                return src[static_cast<std::size_t>(yi) * src_w + xi];
            };
            const float v00 = at(x0, y0);
            const float v10 = at(x0 + 1, y0);
            const float v01 = at(x0, y0 + 1);
            const float v11 = at(x0 + 1, y0 + 1);
            const float top = v00 + wx * (v10 - v00);
            const float bot = v01 + wx * (v11 - v01);
            dst[static_cast<std::size_t>(y) * dst_w + x] = top + wy * (bot - top);
        }
    }
}

}  // namespace ferbench::simd::avx2

#endif  // x86_64
