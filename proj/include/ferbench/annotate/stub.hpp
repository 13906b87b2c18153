#pragma once

#include <map>

#include "ferbench/annotate/contracts.hpp"

namespace ferbench {

// Ground truth the synthetic generator writes next to its images, one JSON
// object per line. The stub adapters answer queries from it, which makes the
// whole pipeline runnable without any pretrained model.
struct SidecarEntry {
    std::string sample_id;
    std::string media_path;
    std::vector<FaceDetection> faces;  // empty = no face in the image
    std::optional<PixelPoint> eye_left;
    std::optional<PixelPoint> eye_right;
    std::optional<HeadPoseEstimate> pose;
    std::optional<double> age_years;
    std::optional<Gender> gender;
};

class SidecarTruth {
public:
    static SidecarTruth load(const std::filesystem::path& sidecar_path);

    void add(SidecarEntry entry);
    const SidecarEntry* find(const std::string& sample_id) const;
    std::size_t size() const { return by_id_.size(); }

    std::string serialize() const;
    void save(const std::filesystem::path& path) const;

private:
    std::map<std::string, SidecarEntry> by_id_;
};

// Deterministic stub adapters: pure lookups into the sidecar. They validate
// preconditions (bbox inside the image) like a real adapter wrapper would.
class StubFaceDetector final : public FaceDetector {
public:
    explicit StubFaceDetector(std::shared_ptr<const SidecarTruth> truth)
        : truth_(std::move(truth)) {}
    std::optional<FaceDetection> detect_primary_face(
        const std::string& sample_id, const std::filesystem::path& image_path) override;

private:
    std::shared_ptr<const SidecarTruth> truth_;
};

class StubLandmarkEstimator final : public LandmarkEstimator {
public:
    explicit StubLandmarkEstimator(std::shared_ptr<const SidecarTruth> truth)
        : truth_(std::move(truth)) {}
    std::optional<LandmarkEstimate> estimate_landmarks_and_pose(
        const std::string& sample_id, const std::filesystem::path& image_path,
        const PixelBox& bbox) override;

private:
    std::shared_ptr<const SidecarTruth> truth_;
};

class StubAgeGenderEstimator final : public AgeGenderEstimator {
public:
    explicit StubAgeGenderEstimator(std::shared_ptr<const SidecarTruth> truth)
        : truth_(std::move(truth)) {}
    std::optional<AgeGenderEstimate> estimate_age_gender(
        const std::string& sample_id, const std::filesystem::path& image_path,
        const PixelBox& bbox) override;

private:
    std::shared_ptr<const SidecarTruth> truth_;
};

AdapterSet make_stub_adapters(std::shared_ptr<const SidecarTruth> truth);

}  // namespace ferbench
