#include "ferbench/core/sample.hpp"

#include <json.hpp>

#include "ferbench/common.hpp"

namespace ferbench {

using nlohmann::json;

std::string serialize_record(const SampleRecord& r) {
    // Key order is fixed so serialization is byte-stable across runs.
    json j = json::object();
    j["dataset"] = r.dataset;
    j["sample_id"] = r.sample_id;
    j["media_path"] = r.media_path;
    j["media_type"] = to_string(r.media_type);
    if (r.frame_index) j["frame_index"] = *r.frame_index;
    j["label_raw"] = r.label_raw;
    if (r.label) j["label"] = to_string(*r.label);
    if (r.user_id) j["user_id"] = *r.user_id;
    if (r.age_years) j["age_years"] = *r.age_years;
    if (r.gender) j["gender"] = to_string(*r.gender);
    if (r.age_group) j["age_group"] = to_string(*r.age_group);
    if (r.head_pose) j["head_pose"] = to_string(*r.head_pose);
    j["excluded"] = r.excluded;
    if (r.exclusion_reason) j["exclusion_reason"] = *r.exclusion_reason;
    if (r.face_bbox) {
        j["face_bbox"] = {r.face_bbox->x, r.face_bbox->y, r.face_bbox->width,
                          r.face_bbox->height};
    }
    if (r.eye_left) j["eye_left"] = {r.eye_left->x, r.eye_left->y};
    if (r.eye_right) j["eye_right"] = {r.eye_right->x, r.eye_right->y};
    return j.dump();
}

namespace {

template <typename Enum>
Enum parse_enum(const json& j, const char* key,
                std::optional<Enum> (*from_string)(const std::string&)) {
    const std::string s = j.at(key).get<std::string>();
    auto v = from_string(s);
    if (!v) throw InputError(std::string("record: bad value for ") + key + ": " + s);
    return *v;
}

}  // namespace

SampleRecord parse_record(const std::string& line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::exception& e) {
        throw InputError(std::string("record: malformed json: ") + e.what());
    }
    if (!j.is_object()) throw InputError("record: expected a json object");

    SampleRecord r;
    try {
        r.dataset = j.at("dataset").get<std::string>();
        r.sample_id = j.at("sample_id").get<std::string>();
        r.media_path = j.at("media_path").get<std::string>();
        r.media_type = parse_enum<MediaType>(j, "media_type", &media_type_from_string);
        if (j.contains("frame_index")) r.frame_index = j["frame_index"].get<std::int64_t>();
        r.label_raw = j.at("label_raw").get<std::string>();
        if (j.contains("label"))
            r.label = parse_enum<ExpressionLabel>(j, "label", &expression_label_from_string);
        if (j.contains("user_id")) r.user_id = j["user_id"].get<std::string>();
        if (j.contains("age_years")) r.age_years = j["age_years"].get<double>();
        if (j.contains("gender")) r.gender = parse_enum<Gender>(j, "gender", &gender_from_string);
        if (j.contains("age_group"))
            r.age_group = parse_enum<AgeGroup>(j, "age_group", &age_group_from_string);
        if (j.contains("head_pose"))
            r.head_pose = parse_enum<HeadPose>(j, "head_pose", &head_pose_from_string);
        r.excluded = j.at("excluded").get<bool>();
        if (j.contains("exclusion_reason"))
            r.exclusion_reason = j["exclusion_reason"].get<std::string>();
        if (j.contains("face_bbox")) {
            const auto& b = j["face_bbox"];
            if (!b.is_array() || b.size() != 4)
                throw InputError("record: face_bbox must be [x, y, width, height]");
            r.face_bbox = PixelBox{b[0].get<double>(), b[1].get<double>(),
                                   b[2].get<double>(), b[3].get<double>()};
        }
        auto parse_point = [&](const char* key) -> std::optional<PixelPoint> {
            if (!j.contains(key)) return std::nullopt;
            const auto& p = j[key];
            if (!p.is_array() || p.size() != 2)
                throw InputError(std::string("record: ") + key + " must be [x, y]");
            return PixelPoint{p[0].get<double>(), p[1].get<double>()};
        };
        r.eye_left = parse_point("eye_left");
        r.eye_right = parse_point("eye_right");
    } catch (const json::exception& e) {
        throw InputError(std::string("record: ") + e.what());
    }
    return r;
}

}  // namespace ferbench
