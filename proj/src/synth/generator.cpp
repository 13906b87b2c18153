#include "ferbench/synth/generator.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/rng.hpp"

namespace ferbench {

using nlohmann::json;

namespace {

constexpr int kCanvas = 160;

struct Rgb {
    std::uint8_t r, g, b;
};

void fill_background(io::Image& img, Rng& rng, double noise) {
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int n = static_cast<int>(rng.uniform() * 255.0 * noise);
            img.at(x, y, 0) = static_cast<std::uint8_t>(std::min(255, 26 + n));
            img.at(x, y, 1) = static_cast<std::uint8_t>(std::min(255, 30 + n));
            img.at(x, y, 2) = static_cast<std::uint8_t>(std::min(255, 34 + n));
        }
    }
}

void draw_ellipse(io::Image& img, double cx, double cy, double rx, double ry,
                  double angle_rad, Rgb color) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    const double ext = std::max(rx, ry) + 1;
    const int x0 = std::max(0, static_cast<int>(cx - ext));
    const int x1 = std::min(img.width - 1, static_cast<int>(cx + ext));
    const int y0 = std::max(0, static_cast<int>(cy - ext));
    const int y1 = std::min(img.height - 1, static_cast<int>(cy + ext));
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            const double u = (c * dx + s * dy) / rx;
            const double v = (-s * dx + c * dy) / ry;
            if (u * u + v * v <= 1.0) {
                img.at(x, y, 0) = color.r;
                img.at(x, y, 1) = color.g;
                img.at(x, y, 2) = color.b;
            }
        }
    }
}

void draw_segment(io::Image& img, double x0, double y0, double x1, double y1,
                  double thickness, Rgb color) {
    const double half = 0.5 * thickness;
    const int bx0 = std::max(0, static_cast<int>(std::min(x0, x1) - half - 1));
    const int bx1 = std::min(img.width - 1, static_cast<int>(std::max(x0, x1) + half + 1));
    const int by0 = std::max(0, static_cast<int>(std::min(y0, y1) - half - 1));
    const int by1 = std::min(img.height - 1, static_cast<int>(std::max(y0, y1) + half + 1));
    const double vx = x1 - x0;
    const double vy = y1 - y0;
    const double len2 = std::max(vx * vx + vy * vy, 1e-12);
    for (int y = by0; y <= by1; ++y) {
        for (int x = bx0; x <= bx1; ++x) {
            const double t = std::clamp(((x - x0) * vx + (y - y0) * vy) / len2, 0.0, 1.0);
            const double dx = x - (x0 + t * vx);
            const double dy = y - (y0 + t * vy);
            if (dx * dx + dy * dy <= half * half) {
                img.at(x, y, 0) = color.r;
                img.at(x, y, 1) = color.g;
                img.at(x, y, 2) = color.b;
            }
        }
    }
}

// Glyph strokes in a unit frame, rotated into image space around the glyph
// center. One distinctive shape per expression class.
void draw_glyph(io::Image& img, ExpressionLabel label, double cx, double cy,
                double half_size, double angle_rad, double thickness, Rgb color) {
    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    auto seg = [&](double ux0, double uy0, double ux1, double uy1) {
        const double ax = cx + half_size * (c * ux0 - s * uy0);
        const double ay = cy + half_size * (s * ux0 + c * uy0);
        const double bx = cx + half_size * (c * ux1 - s * uy1);
        const double by = cy + half_size * (s * ux1 + c * uy1);
        draw_segment(img, ax, ay, bx, by, thickness, color);
    };
    auto arc = [&](double deg0, double deg1, int steps) {
        double px = std::cos(deg0 * M_PI / 180.0);
        double py = std::sin(deg0 * M_PI / 180.0);
        for (int i = 1; i <= steps; ++i) {
            const double a = (deg0 + (deg1 - deg0) * i / steps) * M_PI / 180.0;
            const double qx = std::cos(a);
            const double qy = std::sin(a);
            seg(px, py, qx, qy);
            px = qx;
            py = qy;
        }
    };

    switch (label) {
        case ExpressionLabel::anger:  // X
            seg(-1, -1, 1, 1);
            seg(-1, 1, 1, -1);
            break;
        case ExpressionLabel::disgust:  // three bars
            seg(-1, -0.7, 1, -0.7);
            seg(-1, 0, 1, 0);
            seg(-1, 0.7, 1, 0.7);
            break;
        case ExpressionLabel::fear:  // triangle outline
            seg(-1, 0.8, 0, -1);
            seg(0, -1, 1, 0.8);
            seg(1, 0.8, -1, 0.8);
            break;
        case ExpressionLabel::happiness:  // U arc (image y grows downward)
            arc(20, 160, 10);
            break;
        case ExpressionLabel::sadness:  // inverted arc
            arc(200, 340, 10);
            break;
        case ExpressionLabel::surprise:  // circle outline
            arc(0, 360, 16);
            break;
        case ExpressionLabel::neutral:  // single bar
            seg(-1, 0, 1, 0);
            break;
    }
}

struct FaceLayout {
    PixelBox bbox;
    PixelPoint eye_left;
    PixelPoint eye_right;
};

FaceLayout draw_face(io::Image& img, double angle_rad, double scale,
                     double brightness, ExpressionLabel glyph, Rng& rng,
                     double noise) {
    fill_background(img, rng, noise);

    const double cx = img.width * 0.5;
    const double cy = img.height * 0.5;
    const double rx = 54.0 * scale * img.width / kCanvas;
    const double ry = 66.0 * scale * img.height / kCanvas;
    const int skin = std::clamp(static_cast<int>(198 * brightness), 0, 255);
    draw_ellipse(img, cx, cy, rx, ry, angle_rad,
                 {static_cast<std::uint8_t>(skin),
                  static_cast<std::uint8_t>(std::clamp(skin - 13, 0, 255)),
                  static_cast<std::uint8_t>(std::clamp(skin - 26, 0, 255))});

    const double c = std::cos(angle_rad);
    const double s = std::sin(angle_rad);
    auto local = [&](double ux, double uy) -> PixelPoint {
        return {cx + c * ux - s * uy, cy + s * ux + c * uy};
    };

    const double eye_half_gap = 21.0 * scale;
    const double eye_drop = -19.0 * scale;  // above center
    PixelPoint el = local(-eye_half_gap, eye_drop);
    PixelPoint er = local(eye_half_gap, eye_drop);
    draw_ellipse(img, el.x, el.y, 4.5 * scale, 4.5 * scale, 0, {20, 24, 28});
    draw_ellipse(img, er.x, er.y, 4.5 * scale, 4.5 * scale, 0, {20, 24, 28});

    const PixelPoint gc = local(0, 24.0 * scale);
    draw_glyph(img, glyph, gc.x, gc.y, 21.0 * scale, angle_rad, 4.0 * scale,
               {30, 30, 30});

    // Axis-aligned bounds of the rotated head ellipse, clipped to the frame.
    const double hw = std::sqrt(rx * rx * c * c + ry * ry * s * s);
    const double hh = std::sqrt(rx * rx * s * s + ry * ry * c * c);
    const double bx0 = std::max(0.0, cx - hw);
    const double by0 = std::max(0.0, cy - hh);
    const double bx1 = std::min(static_cast<double>(img.width), cx + hw);
    const double by1 = std::min(static_cast<double>(img.height), cy + hh);

    FaceLayout layout;
    layout.bbox = {bx0, by0, bx1 - bx0, by1 - by0};
    layout.eye_left = el.x <= er.x ? el : er;
    layout.eye_right = el.x <= er.x ? er : el;
    return layout;
}

std::string pad_index(std::size_t i, int width = 5) {
    std::string s = std::to_string(i);
    while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
    return s;
}

double user_age(int user_index) { return 6.0 + ((user_index * 13) % 70); }
Gender user_gender(int user_index) {
    return user_index % 2 == 0 ? Gender::female : Gender::male;
}

}  // namespace

SyntheticFace make_synthetic_face(int width, int height, double eye_angle_deg,
                                  std::uint64_t seed) {
    Rng rng(seed);
    SyntheticFace face;
    face.image = io::Image::make(width, height, 3);
    const FaceLayout layout =
        draw_face(face.image, eye_angle_deg * M_PI / 180.0, 1.0, 1.0,
                  ExpressionLabel::neutral, rng, 0.03);
    face.bbox = layout.bbox;
    face.eye_left = layout.eye_left;
    face.eye_right = layout.eye_right;
    return face;
}

std::size_t generate_glyph_dataset(const GlyphDatasetSpec& spec,
                                   const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (spec.classes.empty()) throw ContractError("glyph dataset: no classes");
    fs::create_directories(root / "images");

    Rng rng(hash_combine(spec.seed, spec.name));
    SidecarTruth sidecar;
    std::string labels_out;
    std::size_t written = 0;

    const std::size_t total =
        spec.classes.size() * static_cast<std::size_t>(spec.samples_per_class);
    for (std::size_t i = 0; i < total; ++i) {
        const ExpressionLabel truth =
            spec.classes[i % spec.classes.size()];
        const std::string sample_id = spec.name + "_" + pad_index(i);
        const std::string media_path = "images/" + sample_id + ".png";
        // Consecutive samples cycle through the classes, so each user
        // performs every expression (the acted-dataset structure).
        const int user_index = static_cast<int>(i / spec.classes.size()) %
                               std::max(1, spec.user_count);

        const bool no_face = rng.bernoulli(spec.no_face_fraction);
        const bool bad_pose = !no_face && rng.bernoulli(spec.bad_pose_fraction);
        // Per-sample nuisance magnitudes span [0, max], so a high-variability
        // dataset covers the low-variability regime as a subset.
        const double noise = rng.uniform(0.0, spec.noise_level);
        const double speckle = rng.uniform(0.0, spec.pixel_noise);
        const double eye_error = rng.uniform(0.0, spec.eye_error_px);
        const double angle =
            rng.uniform(-spec.rotation_jitter_deg, spec.rotation_jitter_deg) * M_PI / 180.0;
        const double scale = 1.0 + rng.uniform(-spec.scale_jitter, spec.scale_jitter);
        const double brightness =
            1.0 + rng.uniform(-spec.brightness_jitter, spec.brightness_jitter);

        io::Image img = io::Image::make(kCanvas, kCanvas, 3);
        SidecarEntry entry;
        entry.sample_id = sample_id;
        entry.media_path = media_path;
        if (no_face) {
            fill_background(img, rng, noise);
        } else {
            const FaceLayout layout =
                draw_face(img, angle, scale, brightness, truth, rng, noise);
            entry.faces.push_back({layout.bbox, 0.97});
            entry.eye_left = PixelPoint{layout.eye_left.x + eye_error * rng.normal(),
                                        layout.eye_left.y + eye_error * rng.normal()};
            entry.eye_right = PixelPoint{layout.eye_right.x + eye_error * rng.normal(),
                                         layout.eye_right.y + eye_error * rng.normal()};
            HeadPoseEstimate pose;
            pose.yaw = bad_pose ? (rng.bernoulli(0.5) ? 95.0 : -95.0)
                                : rng.uniform(-10.0, 10.0);
            entry.pose = pose;
            entry.age_years = user_age(user_index);
            entry.gender = user_gender(user_index);
        }
        if (speckle > 0) {
            for (auto& px : img.pixels) {
                const int v = static_cast<int>(px) +
                              static_cast<int>(rng.uniform(-speckle, speckle) * 255.0);
                px = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
            }
        }
        io::write_png(root / media_path, img);
        sidecar.add(std::move(entry));

        // Training label: the true glyph, or a different class under label noise.
        ExpressionLabel label = truth;
        if (spec.label_noise > 0 && rng.bernoulli(spec.label_noise) &&
            spec.classes.size() > 1) {
            ExpressionLabel other;
            do {
                other = spec.classes[static_cast<std::size_t>(
                    rng.uniform_int(static_cast<std::int64_t>(spec.classes.size())))];
            } while (other == truth);
            label = other;
        }

        json j;
        j["sample_id"] = sample_id;
        j["media_path"] = media_path;
        j["label_raw"] = to_string(label);
        j["user_id"] = "u" + pad_index(static_cast<std::size_t>(user_index), 3);
        if (spec.dataset_demographics) {
            j["age_years"] = user_age(user_index);
            j["gender"] = to_string(user_gender(user_index));
        }
        labels_out += j.dump();
        labels_out += '\n';
        ++written;
    }

    io::atomic_write(root / "labels.jsonl", labels_out);
    sidecar.save(root / "sidecar.jsonl");
    return written;
}

std::size_t generate_clip_dataset(const ClipDatasetSpec& spec,
                                  const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (spec.classes.empty()) throw ContractError("clip dataset: no classes");
    Rng rng(hash_combine(spec.seed, spec.name + "/clips"));
    SidecarTruth sidecar;
    std::size_t frames_written = 0;
    std::size_t clip_index = 0;

    for (ExpressionLabel label : spec.classes) {
        for (int k = 0; k < spec.clips_per_class; ++k) {
            const int user_index = static_cast<int>(clip_index) % spec.user_count;
            const std::string user = "u" + pad_index(static_cast<std::size_t>(user_index), 3);
            const std::string clip_id = spec.name + "_c" + pad_index(clip_index, 3);
            const fs::path clip_dir = root / "clips" / user / (clip_id + "__" + to_string(label));
            fs::create_directories(clip_dir);

            const double angle = rng.uniform(-8.0, 8.0) * M_PI / 180.0;
            for (int f = 0; f < spec.frames_per_clip; ++f) {
                // Neutral at the start of the clip, target expression later.
                const bool neutral_phase = f < spec.frames_per_clip / 2;
                io::Image img = io::Image::make(kCanvas, kCanvas, 3);
                const FaceLayout layout = draw_face(
                    img, angle, 1.0, 1.0,
                    neutral_phase ? ExpressionLabel::neutral : label, rng, 0.03);
                const std::string frame_name = "frame_" + pad_index(static_cast<std::size_t>(f), 4) + ".png";
                io::write_png(clip_dir / frame_name, img);

                SidecarEntry entry;
                entry.sample_id = clip_id + "#" + std::to_string(f);
                entry.media_path =
                    fs::relative(clip_dir / frame_name, root).generic_string();
                entry.faces.push_back({layout.bbox, 0.95});
                entry.eye_left = layout.eye_left;
                entry.eye_right = layout.eye_right;
                entry.pose = HeadPoseEstimate{rng.uniform(-8.0, 8.0), 0, 0};
                entry.age_years = user_age(user_index);
                entry.gender = user_gender(user_index);
                sidecar.add(std::move(entry));
                ++frames_written;
            }
            ++clip_index;
        }
    }
    sidecar.save(root / "sidecar.jsonl");
    return frames_written;
}

}  // namespace ferbench
