#include "ferbench/simd/kernels.hpp"

#include <algorithm>
#include <cmath>

// Reference kernels. These define the semantics; the AVX2 variants must agree
// with them within floating-point reassociation tolerance (equivalence tests
// pin the bound).

namespace ferbench::simd::scalar {

float dot(const float* a, const float* b, std::size_t n) {
    float acc = 0.0f;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_bias(const float* x, float* y, std::size_t n,
                float scale, float bias, float lo, float hi) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::min(hi, std::max(lo, scale * x[i] + bias));
    }
}

void luma_rgb8(const std::uint8_t* rgb, float* gray, std::size_t npixels) {
    for (std::size_t i = 0; i < npixels; ++i) {
        const float r = static_cast<float>(rgb[3 * i + 0]);
        const float g = static_cast<float>(rgb[3 * i + 1]);
        const float b = static_cast<float>(rgb[3 * i + 2]);
        gray[i] = 0.299f * r + 0.587f * g + 0.114f * b;
    }
}

void warp_affine_bilinear(const float* src, int src_w, int src_h,
                          float* dst, int dst_w, int dst_h,
                          const float m[6]) {
    for (int y = 0; y < dst_h; ++y) {
        const float fy = static_cast<float>(y);
        for (int x = 0; x < dst_w; ++x) {
            const float fx = static_cast<float>(x);
            const float sx = m[0] * fx + m[1] * fy + m[2];
            const float sy = m[3] * fx + m[4] * fy + m[5];
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

}  // namespace ferbench::simd::scalar
