#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ferbench {

enum class SamplingKind {
    neutral_plus_apex,  // clip ramps from neutral to the target expression
    uniform_five,       // expression held throughout the clip
    passthrough,        // media is already still images
};

std::string to_string(SamplingKind k);
std::optional<SamplingKind> sampling_kind_from_string(const std::string& name);

struct SampledFrame {
    std::int64_t index = 0;
    bool is_neutral = false;  // set for the neutral frame of neutral_plus_apex
};

// Picks frame indices from a clip of `frame_count` frames. neutral_plus_apex
// emits [0, round(0.75*(N-1)), N-1]; uniform_five emits round(i*(N-1)/4) for
// i = 0..4. Rounding is half-up, indices strictly increasing.
std::vector<SampledFrame> sample_frames(std::int64_t frame_count,
                                        SamplingKind strategy,
                                        const std::string& clip_name = "");

}  // namespace ferbench
