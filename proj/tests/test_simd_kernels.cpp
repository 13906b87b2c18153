#include <doctest.h>

#include <cmath>
#include <vector>

#include "ferbench/rng.hpp"
#include "ferbench/simd/kernels.hpp"

using namespace ferbench;

namespace {

std::vector<float> random_floats(Rng& rng, std::size_t n, float lo = -2.0f,
                                 float hi = 2.0f) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

// Runs `fn` under both backends and hands the results to `compare`.
template <typename Fn>
void with_both_backends(Fn fn) {
    if (!simd::avx2_available()) {
        // Scalar-only host: the dispatcher must still work.
        simd::force_backend(simd::Backend::scalar);
        fn();
        return;
    }
    simd::force_backend(simd::Backend::scalar);
    fn();
    simd::force_backend(simd::Backend::avx2);
    fn();
    simd::force_backend(simd::Backend::scalar);
}

}  // namespace

TEST_CASE("kernel dispatch reports a backend") {
    CHECK((simd::active_backend() == simd::Backend::scalar ||
           simd::active_backend() == simd::Backend::avx2));
    CHECK(simd::backend_name() != nullptr);
}

TEST_CASE("dot: avx2 matches scalar reference") {
    if (!simd::avx2_available()) return;
    Rng rng(11);
    for (std::size_t n : {0u, 1u, 7u, 8u, 9u, 63u, 64u, 257u, 1024u}) {
        const auto a = random_floats(rng, n);
        const auto b = random_floats(rng, n);
        simd::force_backend(simd::Backend::scalar);
        const float ref = simd::dot(a.data(), b.data(), n);
        simd::force_backend(simd::Backend::avx2);
        const float vec = simd::dot(a.data(), b.data(), n);
        simd::force_backend(simd::Backend::scalar);
        CHECK(std::abs(ref - vec) <= 1e-4f * (1.0f + std::abs(ref)));
    }
}

TEST_CASE("axpy: avx2 matches scalar reference") {
    if (!simd::avx2_available()) return;
    Rng rng(12);
    for (std::size_t n : {1u, 8u, 33u, 500u}) {
        const auto x = random_floats(rng, n);
        auto y0 = random_floats(rng, n);
        auto y1 = y0;
        simd::force_backend(simd::Backend::scalar);
        simd::axpy(0.37f, x.data(), y0.data(), n);
        simd::force_backend(simd::Backend::avx2);
        simd::axpy(0.37f, x.data(), y1.data(), n);
        simd::force_backend(simd::Backend::scalar);
        for (std::size_t i = 0; i < n; ++i)
            CHECK(std::abs(y0[i] - y1[i]) <= 1e-5f);
    }
}

TEST_CASE("scale_bias clamps and matches across backends") {
    Rng rng(13);
    const auto x = random_floats(rng, 301, -3.0f, 3.0f);
    std::vector<float> scalar_out(x.size()), vec_out(x.size());

    simd::force_backend(simd::Backend::scalar);
    simd::scale_bias(x.data(), scalar_out.data(), x.size(), 1.3f, -0.1f, 0.0f, 1.0f);
    for (float v : scalar_out) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
    if (simd::avx2_available()) {
        simd::force_backend(simd::Backend::avx2);
        simd::scale_bias(x.data(), vec_out.data(), x.size(), 1.3f, -0.1f, 0.0f, 1.0f);
        simd::force_backend(simd::Backend::scalar);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(scalar_out[i] - vec_out[i]) <= 1e-5f);
    }
}

TEST_CASE("luma: weights match the definition and backends agree") {
    Rng rng(14);
    const std::size_t npix = 517;
    std::vector<std::uint8_t> rgb(npix * 3);
    for (auto& b : rgb) b = static_cast<std::uint8_t>(rng.uniform_int(256));

    std::vector<float> ref(npix), vec(npix);
    simd::force_backend(simd::Backend::scalar);
    simd::luma_rgb8(rgb.data(), ref.data(), npix);
    for (std::size_t i = 0; i < npix; ++i) {
        const float expect = 0.299f * rgb[3 * i] + 0.587f * rgb[3 * i + 1] +
                             0.114f * rgb[3 * i + 2];
        CHECK(ref[i] == doctest::Approx(expect).epsilon(1e-6));
    }
    if (simd::avx2_available()) {
        simd::force_backend(simd::Backend::avx2);
        simd::luma_rgb8(rgb.data(), vec.data(), npix);
        simd::force_backend(simd::Backend::scalar);
        for (std::size_t i = 0; i < npix; ++i)
            CHECK(std::abs(ref[i] - vec[i]) <= 1e-2f);
    }
}

TEST_CASE("warp: identity transform reproduces the image") {
    with_both_backends([&]() {
        Rng rng(15);
        const int side = 37;
        auto src = random_floats(rng, static_cast<std::size_t>(side) * side, 0.0f, 1.0f);
        std::vector<float> dst(src.size());
        const float m[6] = {1, 0, 0, 0, 1, 0};
        simd::warp_affine_bilinear(src.data(), side, side, dst.data(), side, side, m);
        for (std::size_t i = 0; i < src.size(); ++i)
            CHECK(dst[i] == doctest::Approx(src[i]).epsilon(1e-5));
    });
}

TEST_CASE("warp: out-of-frame samples are black") {
    with_both_backends([&]() {
        std::vector<float> src(16, 1.0f);  // 4x4 all-ones
        std::vector<float> dst(16, -1.0f);
        const float m[6] = {1, 0, 100, 0, 1, 100};  // far outside
        simd::warp_affine_bilinear(src.data(), 4, 4, dst.data(), 4, 4, m);
        for (float v : dst) CHECK(v == 0.0f);
    });
}

TEST_CASE("warp: avx2 matches scalar on random affine transforms") {
    if (!simd::avx2_available()) return;
    Rng rng(16);
    const int sw = 53, sh = 41, dw = 64, dh = 33;
    const auto src = random_floats(rng, static_cast<std::size_t>(sw) * sh, 0.0f, 255.0f);
    for (int trial = 0; trial < 20; ++trial) {
        float m[6];
        for (float& v : m) v = static_cast<float>(rng.uniform(-1.5, 1.5));
        m[2] = static_cast<float>(rng.uniform(-10, sw + 10));
        m[5] = static_cast<float>(rng.uniform(-10, sh + 10));

        std::vector<float> ref(static_cast<std::size_t>(dw) * dh);
        std::vector<float> vec(ref.size());
        simd::force_backend(simd::Backend::scalar);
        simd::warp_affine_bilinear(src.data(), sw, sh, ref.data(), dw, dh, m);
        simd::force_backend(simd::Backend::avx2);
        simd::warp_affine_bilinear(src.data(), sw, sh, vec.data(), dw, dh, m);
        simd::force_backend(simd::Backend::scalar);
        for (std::size_t i = 0; i < ref.size(); ++i)
            CHECK(std::abs(ref[i] - vec[i]) <= 1e-2f);
    }
}

TEST_CASE("gemm_nn small case") {
    // [1 2; 3 4] * [5 6; 7 8] = [19 22; 43 50]
    const std::vector<float> a = {1, 2, 3, 4};
    const std::vector<float> b = {5, 6, 7, 8};
    with_both_backends([&]() {
        std::vector<float> c(4, 0.0f);
        simd::gemm_nn(a.data(), b.data(), c.data(), 2, 2, 2);
        CHECK(c[0] == doctest::Approx(19));
        CHECK(c[1] == doctest::Approx(22));
        CHECK(c[2] == doctest::Approx(43));
        CHECK(c[3] == doctest::Approx(50));
    });
}

TEST_CASE("gemm transposed variants agree with naive loops") {
    Rng rng(17);
    const std::size_t m = 5, k = 7, n = 6;
    const auto a = random_floats(rng, m * k);
    const auto bn = random_floats(rng, k * n);
    const auto bt = random_floats(rng, n * k);
    const auto g = random_floats(rng, m * n);

    // gemm_nt: C(m x n) += A * B^T with B stored n x k
    std::vector<float> c1(m * n, 0.0f);
    simd::gemm_nt(a.data(), bt.data(), c1.data(), m, k, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            float acc = 0;
            for (std::size_t l = 0; l < k; ++l) acc += a[i * k + l] * bt[j * k + l];
            CHECK(c1[i * n + j] == doctest::Approx(acc).epsilon(1e-4));
        }

    // gemm_tn: C(k x n) += A^T * G with A stored m x k
    std::vector<float> c2(k * n, 0.0f);
    simd::gemm_tn(a.data(), g.data(), c2.data(), m, k, n);
    for (std::size_t l = 0; l < k; ++l)
        for (std::size_t j = 0; j < n; ++j) {
            float acc = 0;
            for (std::size_t i = 0; i < m; ++i) acc += a[i * k + l] * g[i * n + j];
            CHECK(c2[l * n + j] == doctest::Approx(acc).epsilon(1e-4));
        }
    (void)bn;
}
