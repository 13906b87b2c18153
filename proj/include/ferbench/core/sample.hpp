#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ferbench/core/label.hpp"

namespace ferbench {

struct PixelPoint {
    double x = 0;
    double y = 0;
    bool operator==(const PixelPoint&) const = default;
};

struct PixelBox {
    double x = 0;
    double y = 0;
    double width = 0;
    double height = 0;
    bool operator==(const PixelBox&) const = default;
};

// One image or sampled video frame, as it moves through the normalization
// stages. Absent optionals serialize as omitted fields.
struct SampleRecord {
    std::string dataset;
    std::string sample_id;
    std::string media_path;  // relative to the dataset root
    MediaType media_type = MediaType::image;
    std::optional<std::int64_t> frame_index;  // present iff media_type == video

    std::string label_raw;
    std::optional<ExpressionLabel> label;  // absent when unmapped

    std::optional<std::string> user_id;
    std::optional<double> age_years;
    std::optional<Gender> gender;
    std::optional<AgeGroup> age_group;
    std::optional<HeadPose> head_pose;

    bool excluded = false;
    std::optional<std::string> exclusion_reason;  // present iff excluded

    std::optional<PixelBox> face_bbox;
    std::optional<PixelPoint> eye_left;   // image-left eye (smaller x)
    std::optional<PixelPoint> eye_right;

    bool operator==(const SampleRecord&) const = default;
};

// One manifest line <-> one record. Parsing reports the offending key on
// malformed values.
std::string serialize_record(const SampleRecord& rec);
SampleRecord parse_record(const std::string& line);

}  // namespace ferbench
