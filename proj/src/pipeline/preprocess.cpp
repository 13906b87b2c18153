#include "ferbench/pipeline/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ferbench/common.hpp"
#include "ferbench/simd/kernels.hpp"

namespace ferbench {

namespace {

constexpr double kCropMarginPerSide = 0.25;

}  // namespace

AlignResult align_and_crop(const io::Image& image,
                           PixelPoint eye_left,
                           PixelPoint eye_right,
                           const PixelBox& face_bbox) {
    if (image.empty()) throw ContractError("align_and_crop: empty image");

    // Convention: eye_left is the image-left eye. Normalize if the caller
    // handed them the other way around.
    if (eye_left.x > eye_right.x) std::swap(eye_left, eye_right);

    const double dx = eye_right.x - eye_left.x;
    const double dy = eye_right.y - eye_left.y;
    if (std::hypot(dx, dy) < 1e-9)
        throw AlignmentError("align_and_crop: coincident eye coordinates");

    if (face_bbox.width <= 0 || face_bbox.height <= 0 ||
        face_bbox.x + face_bbox.width <= 0 || face_bbox.y + face_bbox.height <= 0 ||
        face_bbox.x >= image.width || face_bbox.y >= image.height)
        throw GeometryError("align_and_crop: face box outside image");

    const double theta = std::atan2(dy, dx);  // eye-line angle; we rotate by -theta
    const double mid_x = 0.5 * (eye_left.x + eye_right.x);
    const double mid_y = 0.5 * (eye_left.y + eye_right.y);

    // Square crop window: bbox grown by 25% per side, squared about its center.
    const double grown_w = face_bbox.width * (1.0 + 2.0 * kCropMarginPerSide);
    const double grown_h = face_bbox.height * (1.0 + 2.0 * kCropMarginPerSide);
    const double side = std::max(grown_w, grown_h);
    const double center_x = face_bbox.x + 0.5 * face_bbox.width;
    const double center_y = face_bbox.y + 0.5 * face_bbox.height;
    const double crop_x0 = center_x - 0.5 * side;
    const double crop_y0 = center_y - 0.5 * side;

    // Grayscale first, then one inverse-mapped warp covering rotation, crop
    // and resize. The warp treats out-of-frame source pixels as black.
    const std::size_t npix = static_cast<std::size_t>(image.width) * image.height;
    std::vector<float> gray(npix);
    if (image.channels == 3) {
        simd::luma_rgb8(image.pixels.data(), gray.data(), npix);
    } else {
        for (std::size_t i = 0; i < npix; ++i)
            gray[i] = static_cast<float>(image.pixels[i]);
    }

    // Destination pixel centers map linearly onto the crop window, then
    // rotate by +theta about the eye midpoint back into source coordinates.
    const double scale = side / kProcessedSide;
    const double bx = crop_x0 + 0.5 * scale - 0.5;
    const double by = crop_y0 + 0.5 * scale - 0.5;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    const float m[6] = {
        static_cast<float>(c * scale),
        static_cast<float>(-s * scale),
        static_cast<float>(c * (bx - mid_x) - s * (by - mid_y) + mid_x),
        static_cast<float>(s * scale),
        static_cast<float>(c * scale),
        static_cast<float>(s * (bx - mid_x) + c * (by - mid_y) + mid_y),
    };

    std::vector<float> out(static_cast<std::size_t>(kProcessedSide) * kProcessedSide);
    simd::warp_affine_bilinear(gray.data(), image.width, image.height, out.data(),
                               kProcessedSide, kProcessedSide, m);

    AlignResult result;
    result.image = io::Image::make(kProcessedSide, kProcessedSide, 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        result.image.pixels[i] =
            static_cast<std::uint8_t>(std::clamp(std::lround(out[i]), 0l, 255l));
    }
    result.rotation_deg = -theta * 180.0 / M_PI;

    // Forward-map the eyes into output coordinates (inverse of the warp's
    // dst->src mapping) so callers can verify the eye line is horizontal.
    auto to_output = [&](const PixelPoint& p) -> PixelPoint {
        const double qx = c * (p.x - mid_x) + s * (p.y - mid_y);
        const double qy = -s * (p.x - mid_x) + c * (p.y - mid_y);
        return {(qx + mid_x - bx) / scale, (qy + mid_y - by) / scale};
    };
    result.eye_left_out = to_output(eye_left);
    result.eye_right_out = to_output(eye_right);
    return result;
}

}  // namespace ferbench
