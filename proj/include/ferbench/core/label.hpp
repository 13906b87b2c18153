#pragma once

#include <array>
#include <optional>
#include <string>

namespace ferbench {

// The seven canonical expression classes. Everything downstream (class maps,
// confusion matrices, reports) is keyed on this enum, in this order.
enum class ExpressionLabel : int {
    anger = 0,
    disgust,
    fear,
    happiness,
    sadness,
    surprise,
    neutral,
};

inline constexpr int kExpressionLabelCount = 7;

const std::array<ExpressionLabel, kExpressionLabelCount>& all_expression_labels();

std::string to_string(ExpressionLabel label);
std::optional<ExpressionLabel> expression_label_from_string(const std::string& name);

enum class MediaType { image, video };
std::string to_string(MediaType t);
std::optional<MediaType> media_type_from_string(const std::string& name);

enum class Gender { male, female };
std::string to_string(Gender g);
std::optional<Gender> gender_from_string(const std::string& name);

enum class AgeGroup { child, adult, elderly };
std::string to_string(AgeGroup g);
std::optional<AgeGroup> age_group_from_string(const std::string& name);

enum class HeadPose { front, half_left, half_right, full_left, full_right, back };
std::string to_string(HeadPose p);
std::optional<HeadPose> head_pose_from_string(const std::string& name);

// Age-group boundaries: <=17 child, 18-59 adult, >=60 elderly. Non-integer
// ages are floored before comparison, so 17.9 is still a child.
AgeGroup age_group_for_years(double age_years);

enum class Provenance { web_automatic, web_manual, lab_controlled };
std::string to_string(Provenance p);
std::optional<Provenance> provenance_from_string(const std::string& name);

}  // namespace ferbench
