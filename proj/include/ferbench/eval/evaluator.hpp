#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <set>

#include "ferbench/core/manifest.hpp"
#include "ferbench/eval/confusion.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

// What the evaluator needs from a trained model: its class list and scores
// (aligned with classes()) for a processed 224x224 grayscale image.
class Classifier {
public:
    virtual ~Classifier() = default;
    virtual const std::vector<ExpressionLabel>& classes() const = 0;
    virtual std::vector<float> scores_for_image(const io::Image& processed) = 0;
};

struct ClassIntersection {
    std::vector<ExpressionLabel> classes_used;       // trained ∩ test, sorted
    std::vector<const SampleRecord*> test_samples;   // kept non-excluded samples
};

// Keeps non-excluded test samples whose label the model was trained on.
// Empty classes_used means the pair must be skipped (recorded as missing).
ClassIntersection class_intersection_filter(
    const std::set<ExpressionLabel>& class_set_trained,
    const DatasetManifest& test_manifest);

struct EvalResult {
    std::string model_id;
    std::string architecture_id;
    std::string train_dataset;
    int fold_index = 0;
    std::string test_dataset;
    std::vector<ExpressionLabel> classes_used;
    std::size_t n_test = 0;
    ConfusionMatrix confusion;
    std::map<ExpressionLabel, double> per_class_f1;
    double macro_f1 = 0;
};

struct EvalKey {
    std::string model_id;
    std::string architecture_id;
    std::string train_dataset;
    int fold_index = 0;
};

// Deterministic inference over the filtered test set; predictions are the
// argmax over classes_used (ties to the earlier class). Returns nullopt when
// the class intersection is empty — the caller records a skip, not a zero.
std::optional<EvalResult> evaluate_model(
    Classifier& classifier, const EvalKey& key,
    const DatasetManifest& test_manifest,
    const std::filesystem::path& processed_root);

}  // namespace ferbench
