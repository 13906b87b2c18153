#include <doctest.h>

#include <cmath>

#include "ferbench/common.hpp"
#include "ferbench/pipeline/preprocess.hpp"
#include "ferbench/rng.hpp"
#include "ferbench/synth/generator.hpp"

using namespace ferbench;

TEST_CASE("output is always 224x224 single channel") {
    const SyntheticFace face = make_synthetic_face(200, 180, 12.0, 51);
    const AlignResult r = align_and_crop(face.image, face.eye_left, face.eye_right,
                                         face.bbox);
    CHECK(r.image.width == kProcessedSide);
    CHECK(r.image.height == kProcessedSide);
    CHECK(r.image.channels == 1);
}

TEST_CASE("horizontal eyes need no rotation") {
    const SyntheticFace face = make_synthetic_face(320, 320, 0.0, 52);
    const AlignResult r = align_and_crop(face.image, {100, 120}, {200, 120}, face.bbox);
    CHECK(r.rotation_deg == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("diagonal eyes rotate by minus forty-five degrees") {
    const SyntheticFace face = make_synthetic_face(320, 320, 0.0, 53);
    const AlignResult r = align_and_crop(face.image, {100, 100}, {200, 200}, face.bbox);
    CHECK(r.rotation_deg == doctest::Approx(-45.0).epsilon(1e-9));
}

TEST_CASE("fifty random faces come out aligned within half a degree") {
    Rng rng(54);
    for (int i = 0; i < 50; ++i) {
        const double angle = rng.uniform(-40.0, 40.0);
        const SyntheticFace face =
            make_synthetic_face(160, 160, angle, 1000 + static_cast<std::uint64_t>(i));
        const AlignResult r =
            align_and_crop(face.image, face.eye_left, face.eye_right, face.bbox);
        CHECK(r.image.width == kProcessedSide);
        CHECK(r.image.height == kProcessedSide);
        CHECK(r.image.channels == 1);
        const double dy = r.eye_right_out.y - r.eye_left_out.y;
        const double dx = r.eye_right_out.x - r.eye_left_out.x;
        const double residual = std::abs(std::atan2(dy, dx)) * 180.0 / M_PI;
        CHECK(residual <= 0.5);
        CHECK(r.eye_left_out.x < r.eye_right_out.x);
    }
}

TEST_CASE("swapped eye arguments are normalized by image side") {
    const SyntheticFace face = make_synthetic_face(160, 160, 10.0, 55);
    const AlignResult a =
        align_and_crop(face.image, face.eye_left, face.eye_right, face.bbox);
    const AlignResult b =
        align_and_crop(face.image, face.eye_right, face.eye_left, face.bbox);
    CHECK(a.image.pixels == b.image.pixels);
}

TEST_CASE("degenerate geometry is rejected") {
    const SyntheticFace face = make_synthetic_face(160, 160, 0.0, 56);
    CHECK_THROWS_AS(
        align_and_crop(face.image, {80, 70}, {80, 70}, face.bbox), AlignmentError);
    CHECK_THROWS_AS(
        align_and_crop(face.image, {60, 70}, {100, 70}, PixelBox{500, 500, 40, 40}),
        GeometryError);
    CHECK_THROWS_AS(
        align_and_crop(face.image, {60, 70}, {100, 70}, PixelBox{10, 10, -5, 40}),
        GeometryError);
}

TEST_CASE("crop with partial out-of-frame expansion pads black") {
    // Face box hugging the top-left corner: the expanded square leaves the
    // frame, and those pixels must come back black.
    const SyntheticFace face = make_synthetic_face(160, 160, 0.0, 57);
    const AlignResult r =
        align_and_crop(face.image, {20, 25}, {50, 25}, PixelBox{0, 0, 70, 70});
    CHECK(r.image.at(0, 0) == 0);
    CHECK(r.image.width == kProcessedSide);
}
