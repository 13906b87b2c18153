#include "ferbench/annotate/stub.hpp"

#include <json.hpp>

#include <algorithm>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

using nlohmann::json;

namespace {

void check_bbox_inside(const PixelBox& bbox, const std::filesystem::path& image_path) {
    io::PngHeader hdr;
    try {
        hdr = io::read_png_header(image_path);
    } catch (const InputError& e) {
        throw AnnotationError(std::string("stub adapter: ") + e.what());
    }
    if (bbox.x < 0 || bbox.y < 0 || bbox.width <= 0 || bbox.height <= 0 ||
        bbox.x + bbox.width > hdr.width || bbox.y + bbox.height > hdr.height)
        throw ContractError("adapter precondition: bbox outside image " +
                            image_path.string());
}

}  // namespace

SidecarTruth SidecarTruth::load(const std::filesystem::path& sidecar_path) {
    SidecarTruth truth;
    const auto lines = io::read_lines(sidecar_path);
    std::size_t lineno = 0;
    for (const auto& line : lines) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("sidecar line " + std::to_string(lineno) + ": " + e.what());
        }
        SidecarEntry e;
        e.sample_id = j.at("sample_id").get<std::string>();
        e.media_path = j.value("media_path", std::string());
        if (j.contains("faces")) {
            for (const auto& f : j["faces"]) {
                FaceDetection d;
                const auto& b = f.at("bbox");
                d.bbox = {b[0].get<double>(), b[1].get<double>(),
                          b[2].get<double>(), b[3].get<double>()};
                d.confidence = f.value("confidence", 1.0);
                e.faces.push_back(d);
            }
        }
        auto read_point = [&](const char* key) -> std::optional<PixelPoint> {
            if (!j.contains(key)) return std::nullopt;
            return PixelPoint{j[key][0].get<double>(), j[key][1].get<double>()};
        };
        e.eye_left = read_point("eye_left");
        e.eye_right = read_point("eye_right");
        if (j.contains("yaw")) {
            HeadPoseEstimate p;
            p.yaw = j["yaw"].get<double>();
            p.pitch = j.value("pitch", 0.0);
            p.roll = j.value("roll", 0.0);
            e.pose = p;
        }
        if (j.contains("age_years")) e.age_years = j["age_years"].get<double>();
        if (j.contains("gender")) {
            auto g = gender_from_string(j["gender"].get<std::string>());
            if (!g) throw InputError("sidecar line " + std::to_string(lineno) + ": bad gender");
            e.gender = g;
        }
        truth.add(std::move(e));
    }
    return truth;
}

void SidecarTruth::add(SidecarEntry entry) {
    by_id_[entry.sample_id] = std::move(entry);
}

const SidecarEntry* SidecarTruth::find(const std::string& sample_id) const {
    auto it = by_id_.find(sample_id);
    return it == by_id_.end() ? nullptr : &it->second;
}

std::string SidecarTruth::serialize() const {
    std::string out;
    for (const auto& [id, e] : by_id_) {
        json j;
        j["sample_id"] = e.sample_id;
        if (!e.media_path.empty()) j["media_path"] = e.media_path;
        json faces = json::array();
        for (const auto& f : e.faces) {
            faces.push_back({{"bbox", {f.bbox.x, f.bbox.y, f.bbox.width, f.bbox.height}},
                             {"confidence", f.confidence}});
        }
        j["faces"] = faces;
        if (e.eye_left) j["eye_left"] = {e.eye_left->x, e.eye_left->y};
        if (e.eye_right) j["eye_right"] = {e.eye_right->x, e.eye_right->y};
        if (e.pose) {
            j["yaw"] = e.pose->yaw;
            j["pitch"] = e.pose->pitch;
            j["roll"] = e.pose->roll;
        }
        if (e.age_years) j["age_years"] = *e.age_years;
        if (e.gender) j["gender"] = to_string(*e.gender);
        out += j.dump();
        out += '\n';
    }
    return out;
}

void SidecarTruth::save(const std::filesystem::path& path) const {
    io::atomic_write(path, serialize());
}

std::optional<FaceDetection> StubFaceDetector::detect_primary_face(
    const std::string& sample_id, const std::filesystem::path& image_path) {
    (void)image_path;
    const SidecarEntry* e = truth_->find(sample_id);
    if (!e || e->faces.empty()) return std::nullopt;
    return *std::max_element(e->faces.begin(), e->faces.end(),
                             [](const FaceDetection& a, const FaceDetection& b) {
                                 return a.confidence < b.confidence;
                             });
}

std::optional<LandmarkEstimate> StubLandmarkEstimator::estimate_landmarks_and_pose(
    const std::string& sample_id, const std::filesystem::path& image_path,
    const PixelBox& bbox) {
    check_bbox_inside(bbox, image_path);
    const SidecarEntry* e = truth_->find(sample_id);
    if (!e || !e->eye_left || !e->eye_right || !e->pose) return std::nullopt;
    LandmarkEstimate lm;
    lm.eye_left = *e->eye_left;
    lm.eye_right = *e->eye_right;
    lm.pose = *e->pose;
    lm.confidence = 1.0;
    return lm;
}

std::optional<AgeGenderEstimate> StubAgeGenderEstimator::estimate_age_gender(
    const std::string& sample_id, const std::filesystem::path& image_path,
    const PixelBox& bbox) {
    check_bbox_inside(bbox, image_path);
    const SidecarEntry* e = truth_->find(sample_id);
    if (!e || !e->age_years || !e->gender) return std::nullopt;
    AgeGenderEstimate ag;
    ag.age_years = *e->age_years;
    ag.gender = *e->gender;
    ag.confidence = 1.0;
    return ag;
}

AdapterSet make_stub_adapters(std::shared_ptr<const SidecarTruth> truth) {
    AdapterSet set;
    set.detector = std::make_shared<StubFaceDetector>(truth);
    set.landmarks = std::make_shared<StubLandmarkEstimator>(truth);
    set.age_gender = std::make_shared<StubAgeGenderEstimator>(truth);
    return set;
}

}  // namespace ferbench
