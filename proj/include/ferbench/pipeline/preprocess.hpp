#pragma once

#include "ferbench/core/sample.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

inline constexpr int kProcessedSide = 224;

struct AlignResult {
    io::Image image;            // kProcessedSide x kProcessedSide, 1 channel
    double rotation_deg = 0;    // applied rotation (eye-line angle, negated)
    PixelPoint eye_left_out;    // eye coordinates mapped into the output image
    PixelPoint eye_right_out;
};

// Rotates about the eye midpoint until the eye line is horizontal, crops the
// face box expanded by 25% per side (squared about its center, black where it
// leaves the frame), resizes to kProcessedSide and converts to grayscale.
//
// Throws AlignmentError for coincident eyes, GeometryError when the box lies
// fully outside the image.
AlignResult align_and_crop(const io::Image& image,
                           PixelPoint eye_left,
                           PixelPoint eye_right,
                           const PixelBox& face_bbox);

}  // namespace ferbench
