#include "ferbench/core/label.hpp"

#include <cmath>

namespace ferbench {

AgeGroup age_group_for_years(double age_years) {
    const double floored = std::floor(age_years);
    if (floored <= 17.0) return AgeGroup::child;
    if (floored <= 59.0) return AgeGroup::adult;
    return AgeGroup::elderly;
}

const std::array<ExpressionLabel, kExpressionLabelCount>& all_expression_labels() {
    static const std::array<ExpressionLabel, kExpressionLabelCount> labels = {
        ExpressionLabel::anger,    ExpressionLabel::disgust,
        ExpressionLabel::fear,     ExpressionLabel::happiness,
        ExpressionLabel::sadness,  ExpressionLabel::surprise,
        ExpressionLabel::neutral,
    };
    return labels;
}

std::string to_string(ExpressionLabel label) {
    switch (label) {
        case ExpressionLabel::anger: return "anger";
        case ExpressionLabel::disgust: return "disgust";
        case ExpressionLabel::fear: return "fear";
        case ExpressionLabel::happiness: return "happiness";
        case ExpressionLabel::sadness: return "sadness";
        case ExpressionLabel::surprise: return "surprise";
        case ExpressionLabel::neutral: return "neutral";
    }
    return "?";
}

std::optional<ExpressionLabel> expression_label_from_string(const std::string& name) {
    for (ExpressionLabel l : all_expression_labels())
        if (to_string(l) == name) return l;
    return std::nullopt;
}

std::string to_string(MediaType t) {
    return t == MediaType::image ? "image" : "video";
}

std::optional<MediaType> media_type_from_string(const std::string& name) {
    if (name == "image") return MediaType::image;
    if (name == "video") return MediaType::video;
    return std::nullopt;
}

std::string to_string(Gender g) { return g == Gender::male ? "male" : "female"; }

std::optional<Gender> gender_from_string(const std::string& name) {
    if (name == "male") return Gender::male;
    if (name == "female") return Gender::female;
    return std::nullopt;
}

std::string to_string(AgeGroup g) {
    switch (g) {
        case AgeGroup::child: return "child";
        case AgeGroup::adult: return "adult";
        case AgeGroup::elderly: return "elderly";
    }
    return "?";
}

std::optional<AgeGroup> age_group_from_string(const std::string& name) {
    if (name == "child") return AgeGroup::child;
    if (name == "adult") return AgeGroup::adult;
    if (name == "elderly") return AgeGroup::elderly;
    return std::nullopt;
}

std::string to_string(HeadPose p) {
    switch (p) {
        case HeadPose::front: return "front";
        case HeadPose::half_left: return "half_left";
        case HeadPose::half_right: return "half_right";
        case HeadPose::full_left: return "full_left";
        case HeadPose::full_right: return "full_right";
        case HeadPose::back: return "back";
    }
    return "?";
}

std::optional<HeadPose> head_pose_from_string(const std::string& name) {
    if (name == "front") return HeadPose::front;
    if (name == "half_left") return HeadPose::half_left;
    if (name == "half_right") return HeadPose::half_right;
    if (name == "full_left") return HeadPose::full_left;
    if (name == "full_right") return HeadPose::full_right;
    if (name == "back") return HeadPose::back;
    return std::nullopt;
}

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::web_automatic: return "web_automatic";
        case Provenance::web_manual: return "web_manual";
        case Provenance::lab_controlled: return "lab_controlled";
    }
    return "?";
}

std::optional<Provenance> provenance_from_string(const std::string& name) {
    if (name == "web_automatic") return Provenance::web_automatic;
    if (name == "web_manual") return Provenance::web_manual;
    if (name == "lab_controlled") return Provenance::lab_controlled;
    return std::nullopt;
}

}  // namespace ferbench
