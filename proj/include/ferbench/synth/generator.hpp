#pragma once

#include <filesystem>
#include <vector>

#include "ferbench/annotate/stub.hpp"
#include "ferbench/core/label.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

// Desk-scale stand-in data: stylized faces carrying one geometric glyph per
// expression class. Images are real PNGs on disk; everything a pretrained
// model would have produced lands in the sidecar for the stub adapters.

struct SyntheticFace {
    io::Image image;  // RGB
    PixelBox bbox;    // head bounds (ground truth)
    PixelPoint eye_left;
    PixelPoint eye_right;
};

// One face with the eye line at `eye_angle_deg`; used by the preprocessing
// tests to sweep rotation angles.
SyntheticFace make_synthetic_face(int width, int height, double eye_angle_deg,
                                  std::uint64_t seed);

struct GlyphDatasetSpec {
    std::string name;
    std::vector<ExpressionLabel> classes;
    int samples_per_class = 60;
    int user_count = 12;
    double rotation_jitter_deg = 8.0;   // eye-line angle range, +-deg
    double scale_jitter = 0.05;
    double noise_level = 0.04;          // background texture amplitude
    double pixel_noise = 0.02;          // whole-image speckle amplitude
    double eye_error_px = 0.0;          // sidecar eye coordinate error
    double brightness_jitter = 0.0;
    double label_noise = 0.0;           // fraction with a random wrong label
    double no_face_fraction = 0.0;      // images with no face at all
    double bad_pose_fraction = 0.0;     // images annotated as full profile
    bool dataset_demographics = false;  // carry age/gender in labels.jsonl
    std::uint64_t seed = 1;
};

// Writes root/images/*.png, root/labels.jsonl and root/sidecar.jsonl.
// labels.jsonl rows: sample_id, media_path, label_raw [, user_id, age_years,
// gender]. Returns the number of samples written.
std::size_t generate_glyph_dataset(const GlyphDatasetSpec& spec,
                                   const std::filesystem::path& root);

struct ClipDatasetSpec {
    std::string name;
    std::vector<ExpressionLabel> classes;
    int clips_per_class = 4;
    int frames_per_clip = 12;
    int user_count = 4;
    std::uint64_t seed = 1;
};

// Video-style layout: root/clips/<user>/<clip>__<label>/frame_NNNN.png plus a
// sidecar keyed by "<clip>#<frame_index>". Early frames show the neutral
// glyph, later frames the target expression.
std::size_t generate_clip_dataset(const ClipDatasetSpec& spec,
                                  const std::filesystem::path& root);

}  // namespace ferbench
