#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ferbench/core/sample.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

struct FaceDetection {
    PixelBox bbox;
    double confidence = 0;  // in [0, 1]
};

struct HeadPoseEstimate {
    double yaw = 0;    // degrees, positive = subject turning toward image-right
    double pitch = 0;
    double roll = 0;
};

struct LandmarkEstimate {
    PixelPoint eye_left;   // full-image pixel space
    PixelPoint eye_right;
    HeadPoseEstimate pose;
    std::optional<double> confidence;
};

struct AgeGenderEstimate {
    double age_years = 0;
    Gender gender = Gender::male;
    std::optional<double> confidence;
};

// Discretizes yaw into the pose classes used for exclusion. Bin edges sit at
// the midpoints 22.5 / 67.5 / 112.5 degrees; negative yaw maps to *_left.
HeadPose bin_head_pose(double yaw_deg);

// Adapter contracts. Implementations need not be thread-safe; the
// orchestrator serializes calls per instance.
class FaceDetector {
public:
    virtual ~FaceDetector() = default;
    // At most one detection: the highest-confidence face. nullopt means no
    // face was found (a downstream exclusion, not an error).
    virtual std::optional<FaceDetection> detect_primary_face(
        const std::string& sample_id, const std::filesystem::path& image_path) = 0;
};

class LandmarkEstimator {
public:
    virtual ~LandmarkEstimator() = default;
    virtual std::optional<LandmarkEstimate> estimate_landmarks_and_pose(
        const std::string& sample_id, const std::filesystem::path& image_path,
        const PixelBox& bbox) = 0;
};

class AgeGenderEstimator {
public:
    virtual ~AgeGenderEstimator() = default;
    virtual std::optional<AgeGenderEstimate> estimate_age_gender(
        const std::string& sample_id, const std::filesystem::path& image_path,
        const PixelBox& bbox) = 0;
};

struct AdapterSet {
    std::shared_ptr<FaceDetector> detector;
    std::shared_ptr<LandmarkEstimator> landmarks;
    std::shared_ptr<AgeGenderEstimator> age_gender;
};

}  // namespace ferbench
