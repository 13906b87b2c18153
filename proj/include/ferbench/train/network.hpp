#pragma once

#include <filesystem>
#include <vector>

#include "ferbench/core/label.hpp"
#include "ferbench/io/image.hpp"
#include "ferbench/rng.hpp"
#include "ferbench/train/config.hpp"

namespace ferbench {

struct ConvStage {
    int out_channels = 8;
    int kernel = 3;
    int stride = 1;  // valid padding
};

// Structural description of a trainable backbone: optional conv stages (each
// followed by relu), then dense layers over the flattened features. `tiny`
// is the desk-scale workhorse; `swin_t` and `convnext_t` are reduced
// stand-in profiles keeping the benchmark's full-scale slots wired through
// the orchestrator — swap in real backbones behind the same spec.
struct ArchitectureSpec {
    std::string id;
    int input_side = 32;     // processed images are resampled to this side
    int input_channels = 1;  // grayscale replicated when > 1
    std::vector<ConvStage> conv;
    std::vector<int> hidden;  // fully connected widths before the class head
};

class ArchitectureRegistry {
public:
    static const ArchitectureRegistry& instance();

    const ArchitectureSpec& get(const std::string& id) const;  // throws ContractError
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;

private:
    ArchitectureRegistry();
    std::vector<ArchitectureSpec> specs_;
};

// Processed 224x224 grayscale -> normalized input vector for a backbone
// (bilinear resample to input_side, 0..1 range, channel replication).
std::vector<float> prepare_input(const io::Image& processed, int side, int channels);

// Seeded train-time jitter: flip / rotate / translate / scale as one affine
// warp, then brightness / contrast. Operates on a single-channel plane in
// [0,1]. Each call bumps a global counter so tests can prove validation
// samples were never augmented.
std::vector<float> augment_plane(const std::vector<float>& plane, int side,
                                 const AugmentationConfig& config, Rng& rng);
std::uint64_t augment_apply_count();

// Trainable conv+dense softmax classifier over the class list it was trained
// with. Scores align with `classes()` (sorted canonical order).
class Network {
public:
    Network(const ArchitectureSpec& spec, std::vector<ExpressionLabel> classes,
            std::uint64_t init_seed);

    const ArchitectureSpec& spec() const { return spec_; }
    const std::vector<ExpressionLabel>& classes() const { return classes_; }
    std::size_t input_size() const;

    std::vector<float> scores(const std::vector<float>& input) const;

    // One minibatch of weighted cross-entropy. `optimizer` is "adam" or
    // "sgd" (momentum). Returns the mean loss; the caller checks it for
    // divergence.
    double train_batch(const std::vector<std::vector<float>>& inputs,
                       const std::vector<int>& class_indices,
                       const std::vector<float>& sample_weights,
                       double learning_rate, const std::string& optimizer,
                       double momentum);

    // Loss without an update; the gradient-check test diffs this.
    double loss_only(const std::vector<std::vector<float>>& inputs,
                     const std::vector<int>& class_indices,
                     const std::vector<float>& sample_weights) const;

    std::vector<float> snapshot_weights() const;
    void restore_weights(const std::vector<float>& snapshot);

    void save(const std::filesystem::path& path) const;
    static Network load(const std::filesystem::path& path);

private:
    struct Shape {
        int side = 0;
        int channels = 0;
        std::size_t size() const {
            return static_cast<std::size_t>(side) * side * channels;
        }
    };
    struct Layer {
        bool is_conv = false;
        ConvStage conv;          // conv layers
        Shape in_shape, out_shape;
        std::size_t in = 0, out = 0;  // dense layers
        bool relu = false;
        std::vector<float> w;
        std::vector<float> b;
        // Optimizer state: sgd velocity doubles as the adam second moment.
        std::vector<float> vw, vb, mw, mb;
    };

    Network() = default;
    void build_layers(std::uint64_t init_seed);
    // Forward pass; returns per-layer activations (acts[0] = centered input).
    std::vector<std::vector<float>> forward(const std::vector<float>& centered) const;

    ArchitectureSpec spec_;
    std::vector<ExpressionLabel> classes_;
    std::vector<Layer> layers_;
    std::int64_t step_ = 0;  // adam timestep
};

}  // namespace ferbench
