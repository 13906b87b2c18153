#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace ferbench {

struct AugmentationConfig {
    bool horizontal_flip = true;
    double flip_prob = 0.5;
    double rotation_deg = 15.0;      // +- range
    double translation_frac = 0.10;  // +- fraction of the side
    double scale_min = 0.9;
    double scale_max = 1.1;
    double brightness = 0.2;  // +- on the 0..1 scale
    double contrast = 0.2;    // multiplicative +-
};

struct TrainingConfig {
    std::string architecture_id = "tiny";
    int max_epochs = 20;
    double early_stop_min_delta = 0.01;  // absolute validation-accuracy gain
    int early_stop_patience = 5;         // consecutive non-improving epochs
    int fold_count = 5;
    std::uint64_t seed = 0;
    AugmentationConfig augmentation;
    bool pretrained_init = false;
    std::optional<std::filesystem::path> initial_weights;  // required if pretrained_init

    // Optimizer knobs; defaults are ours, not benchmarked values.
    std::string optimizer = "adam";  // adam | sgd
    int batch_size = 16;
    double learning_rate = 0.004;
    double momentum = 0.9;  // sgd only
};

// Throws ContractError when an invariant (max_epochs >= 1, fold_count >= 2,
// patience >= 1, ...) is violated.
void validate(const TrainingConfig& config);

}  // namespace ferbench
