#pragma once

#include <filesystem>
#include <memory>

#include "ferbench/core/manifest.hpp"
#include "ferbench/eval/evaluator.hpp"
#include "ferbench/train/config.hpp"
#include "ferbench/train/folds.hpp"
#include "ferbench/train/network.hpp"

namespace ferbench {

struct TrainedModelHandle {
    std::string model_id;  // "<arch>/<dataset>/fold<k>"
    std::string architecture_id;
    std::string train_dataset;
    int fold_index = 0;
    std::vector<ExpressionLabel> class_set_trained;  // sorted
    std::filesystem::path artifact_path;             // directory with weights + metadata
    int epochs_run = 0;
    double best_val_accuracy = 0;
    double val_macro_f1 = 0;  // over the validation fold, best weights
};

// Trains one (dataset, architecture, fold) cell: weighted cross-entropy,
// train-only augmentation, early stopping on validation accuracy, best-epoch
// checkpointing. Deterministic in (config.seed, cell key). Artifacts land in
// models_root/<dataset>/<arch>/fold<k>/.
TrainedModelHandle train_model(const std::string& architecture_id,
                               const DatasetManifest& manifest,
                               const FoldSplit& fold,
                               const TrainingConfig& config,
                               const std::filesystem::path& processed_root,
                               const std::filesystem::path& models_root);

// Handle metadata round-trip (meta.json inside the artifact directory).
void save_handle(const TrainedModelHandle& handle);
TrainedModelHandle load_handle(const std::filesystem::path& artifact_dir);

// Classifier view over a stored model artifact.
class TrainedClassifier final : public Classifier {
public:
    explicit TrainedClassifier(const std::filesystem::path& artifact_dir);

    const std::vector<ExpressionLabel>& classes() const override;
    std::vector<float> scores_for_image(const io::Image& processed) override;

private:
    Network net_;
};

}  // namespace ferbench
