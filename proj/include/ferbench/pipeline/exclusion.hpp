#pragma once

#include "ferbench/core/sample.hpp"

namespace ferbench {

// Exclusion reasons, applied in this priority order.
inline constexpr const char* kReasonNoFace = "no_face";
inline constexpr const char* kReasonPoseFullOrBack = "pose_full_or_back";
inline constexpr const char* kReasonPoseMissing = "pose_missing";
inline constexpr const char* kReasonUnmappedLabel = "unmapped_label";

// Recomputes the exclusion state from the annotated fields. Pure and
// idempotent: a second application yields the identical record.
SampleRecord apply_exclusion(SampleRecord record);

}  // namespace ferbench
