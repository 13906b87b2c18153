#include "ferbench/train/trainer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/train/rules.hpp"

namespace ferbench {

using nlohmann::json;

namespace {

struct CellSample {
    const SampleRecord* record;
    int class_index;             // into the sorted trained class list
    std::vector<float> input;    // prepared plane(s), no augmentation
};

std::vector<float> load_prepared(const SampleRecord& s,
                                 const std::filesystem::path& processed_root,
                                 int side, int channels) {
    const auto path = io::processed_image_path(processed_root, s.dataset, s.sample_id);
    io::Image img;
    try {
        img = io::read_png(path);
    } catch (const InputError& e) {
        throw DataError("training: missing processed image for sample '" + s.sample_id +
                        "': " + e.what());
    }
    return prepare_input(img, side, channels);
}

}  // namespace

TrainedModelHandle train_model(const std::string& architecture_id,
                               const DatasetManifest& manifest,
                               const FoldSplit& fold,
                               const TrainingConfig& config,
                               const std::filesystem::path& processed_root,
                               const std::filesystem::path& models_root) {
    validate(config);
    const ArchitectureSpec& spec = ArchitectureRegistry::instance().get(architecture_id);

    // Class inventory of the training split; absent classes cannot be learned.
    std::map<ExpressionLabel, std::size_t> train_counts;
    std::vector<const SampleRecord*> train_records;
    std::vector<const SampleRecord*> val_records;
    for (const auto& s : manifest.samples) {
        if (s.excluded || !s.label) continue;
        if (fold.train_ids.count(s.sample_id)) {
            train_records.push_back(&s);
            ++train_counts[*s.label];
        } else if (fold.val_ids.count(s.sample_id)) {
            val_records.push_back(&s);
        }
    }
    if (train_counts.size() < 2)
        throw TrainingError("dataset '" + manifest.name + "' fold " +
                            std::to_string(fold.fold_index) +
                            ": training split has fewer than two classes");

    std::vector<ExpressionLabel> trained_classes;
    for (const auto& [label, n] : train_counts) trained_classes.push_back(label);
    const auto class_weights = compute_class_weights(train_counts);

    auto class_index = [&](ExpressionLabel l) -> int {
        const auto it = std::lower_bound(trained_classes.begin(), trained_classes.end(), l);
        return static_cast<int>(it - trained_classes.begin());
    };

    const std::string cell_key = architecture_id + "/" + manifest.name + "/fold" +
                                 std::to_string(fold.fold_index);
    const std::size_t plane = static_cast<std::size_t>(spec.input_side) * spec.input_side;

    // Cache prepared inputs once; augmentation works on copies per epoch.
    std::vector<CellSample> train_set;
    for (const auto* r : train_records) {
        CellSample cs{r, class_index(*r->label),
                      load_prepared(*r, processed_root, spec.input_side, spec.input_channels)};
        train_set.push_back(std::move(cs));
    }
    std::vector<CellSample> val_set;
    for (const auto* r : val_records) {
        // Validation samples with labels outside the trained set are skipped,
        // mirroring the class-intersection rule at test time.
        if (!std::binary_search(trained_classes.begin(), trained_classes.end(), *r->label))
            continue;
        CellSample cs{r, class_index(*r->label),
                      load_prepared(*r, processed_root, spec.input_side, spec.input_channels)};
        val_set.push_back(std::move(cs));
    }

    Network net(spec, trained_classes, hash_combine(config.seed, cell_key + "/init"));
    if (config.pretrained_init) {
        // validate() already guaranteed initial_weights is set.
        Network pre = Network::load(*config.initial_weights);
        net.restore_weights(pre.snapshot_weights());
    }

    Rng epoch_rng(hash_combine(config.seed, cell_key + "/epochs"));
    EarlyStopMonitor monitor(config.early_stop_min_delta, config.early_stop_patience);

    auto val_accuracy = [&]() -> double {
        if (val_set.empty()) return 0.0;
        std::size_t hits = 0;
        for (const auto& cs : val_set) {
            const auto scores = net.scores(cs.input);
            std::size_t best = 0;
            for (std::size_t i = 1; i < scores.size(); ++i)
                if (scores[i] > scores[best]) best = i;
            if (static_cast<int>(best) == cs.class_index) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(val_set.size());
    };

    std::vector<float> best_weights = net.snapshot_weights();
    double best_acc = -1.0;
    int epochs_run = 0;

    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        epoch_rng.shuffle(order);
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            std::vector<std::vector<float>> inputs;
            std::vector<int> targets;
            std::vector<float> weights;
            for (std::size_t i = start; i < stop; ++i) {
                const CellSample& cs = train_set[order[i]];
                // Train-time augmentation, applied per plane then replicated.
                std::vector<float> base(cs.input.begin(),
                                        cs.input.begin() + static_cast<std::ptrdiff_t>(plane));
                std::vector<float> aug =
                    augment_plane(base, spec.input_side, config.augmentation, epoch_rng);
                if (spec.input_channels > 1) {
                    std::vector<float> rep;
                    rep.reserve(aug.size() * static_cast<std::size_t>(spec.input_channels));
                    for (int c = 0; c < spec.input_channels; ++c)
                        rep.insert(rep.end(), aug.begin(), aug.end());
                    aug = std::move(rep);
                }
                inputs.push_back(std::move(aug));
                targets.push_back(cs.class_index);
                weights.push_back(static_cast<float>(
                    class_weights.at(trained_classes[static_cast<std::size_t>(cs.class_index)])));
            }
            const double loss =
                net.train_batch(inputs, targets, weights, config.learning_rate,
                                config.optimizer, config.momentum);
            if (!std::isfinite(loss))
                throw TrainingError("training diverged (non-finite loss) at epoch " +
                                    std::to_string(epoch) + " for " + cell_key);
        }

        epochs_run = epoch;
        const double acc = val_accuracy();
        if (acc > best_acc) {
            best_acc = acc;
            best_weights = net.snapshot_weights();
        }
        if (monitor.observe(acc) == StopDecision::stop) break;
    }

    net.restore_weights(best_weights);

    TrainedModelHandle handle;
    handle.model_id = cell_key;
    handle.architecture_id = architecture_id;
    handle.train_dataset = manifest.name;
    handle.fold_index = fold.fold_index;
    handle.class_set_trained = trained_classes;
    handle.artifact_path = models_root / manifest.name / architecture_id /
                           ("fold" + std::to_string(fold.fold_index));
    handle.epochs_run = epochs_run;
    handle.best_val_accuracy = std::max(best_acc, 0.0);

    std::filesystem::create_directories(handle.artifact_path);
    {
        json job;
        job["dataset"] = manifest.name;
        job["architecture_id"] = architecture_id;
        job["fold_index"] = fold.fold_index;
        job["seed"] = config.seed;
        job["config_hash"] = training_config_digest(config);
        io::atomic_write(handle.artifact_path / "job.json", job.dump(2) + "\n");
    }
    net.save(handle.artifact_path / "weights.bin");

    // Validation macro-F1 with the saved weights, via the evaluation path so
    // the two report identical numbers.
    {
        DatasetManifest val_manifest;
        val_manifest.name = manifest.name;
        val_manifest.provenance = manifest.provenance;
        for (const auto* r : val_records) val_manifest.samples.push_back(*r);
        TrainedClassifier classifier(handle.artifact_path);
        EvalKey key{handle.model_id, handle.architecture_id, handle.train_dataset,
                    handle.fold_index};
        const auto result = evaluate_model(classifier, key, val_manifest, processed_root);
        handle.val_macro_f1 = result ? result->macro_f1 : 0.0;
    }

    save_handle(handle);
    return handle;
}

void save_handle(const TrainedModelHandle& handle) {
    json j;
    j["model_id"] = handle.model_id;
    j["architecture_id"] = handle.architecture_id;
    j["train_dataset"] = handle.train_dataset;
    j["fold_index"] = handle.fold_index;
    std::vector<std::string> classes;
    for (ExpressionLabel l : handle.class_set_trained) classes.push_back(to_string(l));
    j["class_set_trained"] = classes;
    j["epochs_run"] = handle.epochs_run;
    j["best_val_accuracy"] = handle.best_val_accuracy;
    j["val_macro_f1"] = handle.val_macro_f1;
    io::atomic_write(handle.artifact_path / "meta.json", j.dump(2) + "\n");
}

TrainedModelHandle load_handle(const std::filesystem::path& artifact_dir) {
    json j;
    try {
        j = json::parse(io::read_text(artifact_dir / "meta.json"));
    } catch (const json::exception& e) {
        throw DataError("model metadata: " + std::string(e.what()));
    }
    TrainedModelHandle h;
    h.model_id = j.at("model_id").get<std::string>();
    h.architecture_id = j.at("architecture_id").get<std::string>();
    h.train_dataset = j.at("train_dataset").get<std::string>();
    h.fold_index = j.at("fold_index").get<int>();
    for (const auto& name : j.at("class_set_trained")) {
        auto l = expression_label_from_string(name.get<std::string>());
        if (!l) throw DataError("model metadata: bad class name");
        h.class_set_trained.push_back(*l);
    }
    h.artifact_path = artifact_dir;
    h.epochs_run = j.at("epochs_run").get<int>();
    h.best_val_accuracy = j.at("best_val_accuracy").get<double>();
    h.val_macro_f1 = j.at("val_macro_f1").get<double>();
    return h;
}

TrainedClassifier::TrainedClassifier(const std::filesystem::path& artifact_dir)
    : net_(Network::load(artifact_dir / "weights.bin")) {}

const std::vector<ExpressionLabel>& TrainedClassifier::classes() const {
    return net_.classes();
}

std::vector<float> TrainedClassifier::scores_for_image(const io::Image& processed) {
    return net_.scores(prepare_input(processed, net_.spec().input_side,
                                     net_.spec().input_channels));
}

}  // namespace ferbench
