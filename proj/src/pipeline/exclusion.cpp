#include "ferbench/pipeline/exclusion.hpp"

namespace ferbench {

SampleRecord apply_exclusion(SampleRecord record) {
    auto exclude = [&](const char* reason) {
        record.excluded = true;
        record.exclusion_reason = reason;
    };

    record.excluded = false;
    record.exclusion_reason.reset();

    if (!record.face_bbox) {
        exclude(kReasonNoFace);
    } else if (record.head_pose &&
               (*record.head_pose == HeadPose::full_left ||
                *record.head_pose == HeadPose::full_right ||
                *record.head_pose == HeadPose::back)) {
        exclude(kReasonPoseFullOrBack);
    } else if (!record.head_pose) {
        exclude(kReasonPoseMissing);
    } else if (!record.label) {
        exclude(kReasonUnmappedLabel);
    }
    return record;
}

}  // namespace ferbench
