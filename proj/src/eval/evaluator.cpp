#include "ferbench/eval/evaluator.hpp"

#include <algorithm>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

ClassIntersection class_intersection_filter(
    const std::set<ExpressionLabel>& class_set_trained,
    const DatasetManifest& test_manifest) {
    ClassIntersection out;
    std::set<ExpressionLabel> seen;
    for (const auto& s : test_manifest.samples) {
        if (s.excluded || !s.label) continue;
        if (!class_set_trained.count(*s.label)) continue;
        out.test_samples.push_back(&s);
        seen.insert(*s.label);
    }
    out.classes_used.assign(seen.begin(), seen.end());
    return out;
}

std::optional<EvalResult> evaluate_model(Classifier& classifier, const EvalKey& key,
                                         const DatasetManifest& test_manifest,
                                         const std::filesystem::path& processed_root) {
    std::set<ExpressionLabel> trained(classifier.classes().begin(),
                                      classifier.classes().end());
    ClassIntersection filtered = class_intersection_filter(trained, test_manifest);
    if (filtered.classes_used.empty()) return std::nullopt;

    // Map classes_used into positions of the model's score vector.
    std::vector<std::size_t> used_score_index;
    for (ExpressionLabel l : filtered.classes_used) {
        const auto& list = classifier.classes();
        const auto it = std::find(list.begin(), list.end(), l);
        used_score_index.push_back(static_cast<std::size_t>(it - list.begin()));
    }

    EvalResult result;
    result.model_id = key.model_id;
    result.architecture_id = key.architecture_id;
    result.train_dataset = key.train_dataset;
    result.fold_index = key.fold_index;
    result.test_dataset = test_manifest.name;
    result.classes_used = filtered.classes_used;
    result.confusion = ConfusionMatrix::zeros(filtered.classes_used);

    for (const SampleRecord* s : filtered.test_samples) {
        const auto path =
            io::processed_image_path(processed_root, s->dataset, s->sample_id);
        io::Image img;
        try {
            img = io::read_png(path);
        } catch (const InputError& e) {
            throw DataError("evaluation: missing processed image for sample '" +
                            s->sample_id + "': " + e.what());
        }
        const std::vector<float> scores = classifier.scores_for_image(img);

        // Argmax over the intersection classes; ties go to the earlier class.
        std::size_t best = 0;
        for (std::size_t i = 1; i < used_score_index.size(); ++i)
            if (scores[used_score_index[i]] > scores[used_score_index[best]]) best = i;
        result.confusion.add(*s->label, filtered.classes_used[best]);
    }

    result.n_test = filtered.test_samples.size();
    result.per_class_f1 = per_class_f1(result.confusion);
    result.macro_f1 = macro_f1(result.confusion);
    return result;
}

}  // namespace ferbench
