#include "ferbench/annotate/contracts.hpp"

#include <cmath>

#include "ferbench/common.hpp"

namespace ferbench {

HeadPose bin_head_pose(double yaw_deg) {
    if (!(yaw_deg >= -180.0 && yaw_deg <= 180.0))
        throw ContractError("bin_head_pose: yaw " + format_double(yaw_deg) +
                            " outside [-180, 180]");
    const double a = std::abs(yaw_deg);
    if (a <= 22.5) return HeadPose::front;
    if (a > 112.5) return HeadPose::back;
    const bool left = yaw_deg < 0;
    if (a <= 67.5) return left ? HeadPose::half_left : HeadPose::half_right;
    return left ? HeadPose::full_left : HeadPose::full_right;
}

}  // namespace ferbench
