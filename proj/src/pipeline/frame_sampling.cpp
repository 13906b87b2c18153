#include "ferbench/pipeline/frame_sampling.hpp"

#include <algorithm>

#include "ferbench/common.hpp"

namespace ferbench {

std::string to_string(SamplingKind k) {
    switch (k) {
        case SamplingKind::neutral_plus_apex: return "neutral_plus_apex";
        case SamplingKind::uniform_five: return "uniform_five";
        case SamplingKind::passthrough: return "passthrough";
    }
    return "?";
}

std::optional<SamplingKind> sampling_kind_from_string(const std::string& name) {
    if (name == "neutral_plus_apex") return SamplingKind::neutral_plus_apex;
    if (name == "uniform_five") return SamplingKind::uniform_five;
    if (name == "passthrough") return SamplingKind::passthrough;
    return std::nullopt;
}

std::vector<SampledFrame> sample_frames(std::int64_t frame_count,
                                        SamplingKind strategy,
                                        const std::string& clip_name) {
    auto too_short = [&](std::int64_t need) {
        throw SamplingError("clip '" + clip_name + "' has " +
                            std::to_string(frame_count) + " frames, strategy " +
                            to_string(strategy) + " needs at least " +
                            std::to_string(need));
    };

    switch (strategy) {
        case SamplingKind::passthrough:
            return {};
        case SamplingKind::neutral_plus_apex: {
            if (frame_count < 3) too_short(3);
            const std::int64_t last = frame_count - 1;
            std::int64_t apex = round_half_up(0.75 * static_cast<double>(last));
            // Keep the triple strictly increasing for the shortest clips.
            apex = std::clamp<std::int64_t>(apex, 1, last - 1);
            return {{0, true}, {apex, false}, {last, false}};
        }
        case SamplingKind::uniform_five: {
            if (frame_count < 5) too_short(5);
            std::vector<SampledFrame> out;
            for (int i = 0; i < 5; ++i) {
                out.push_back({round_half_up(static_cast<double>(i) *
                                             static_cast<double>(frame_count - 1) / 4.0),
                               false});
            }
            return out;
        }
    }
    throw ContractError("sample_frames: unknown strategy");
}

}  // namespace ferbench
