#include "ferbench/train/rules.hpp"

#include <algorithm>
#include <cstdio>

#include "ferbench/common.hpp"

namespace ferbench {

void validate(const TrainingConfig& config) {
    if (config.max_epochs < 1) throw ContractError("training config: max_epochs must be >= 1");
    if (config.fold_count < 2) throw ContractError("training config: fold_count must be >= 2");
    if (config.early_stop_patience < 1)
        throw ContractError("training config: early_stop_patience must be >= 1");
    if (config.early_stop_min_delta < 0)
        throw ContractError("training config: early_stop_min_delta must be >= 0");
    if (config.batch_size < 1) throw ContractError("training config: batch_size must be >= 1");
    if (!(config.learning_rate > 0))
        throw ContractError("training config: learning_rate must be > 0");
    if (config.optimizer != "adam" && config.optimizer != "sgd")
        throw ContractError("training config: optimizer must be 'adam' or 'sgd'");
    if (config.augmentation.scale_min > config.augmentation.scale_max)
        throw ContractError("training config: scale_min > scale_max");
    if (config.pretrained_init && !config.initial_weights)
        throw ContractError(
            "training config: pretrained_init requires initial_weights; no pretrained "
            "weights ship with this framework");
}

std::map<ExpressionLabel, double> compute_class_weights(
    const std::map<ExpressionLabel, std::size_t>& class_counts) {
    if (class_counts.empty())
        throw ContractError("compute_class_weights: no classes present");
    double total = 0;
    for (const auto& [label, n] : class_counts) {
        if (n == 0)
            throw ContractError("compute_class_weights: class '" + to_string(label) +
                                "' has zero count; drop it before weighting");
        total += static_cast<double>(n);
    }
    const double k = static_cast<double>(class_counts.size());
    std::map<ExpressionLabel, double> weights;
    for (const auto& [label, n] : class_counts)
        weights[label] = total / (k * static_cast<double>(n));
    return weights;
}

EarlyStopMonitor::EarlyStopMonitor(double min_delta, int patience)
    : min_delta_(min_delta), patience_(patience) {
    if (patience < 1) throw ContractError("early stopping: patience must be >= 1");
}

StopDecision EarlyStopMonitor::observe(double val_accuracy) {
    ++epochs_;
    const bool improved = !any_ || val_accuracy >= best_ + min_delta_;
    if (improved) {
        stale_epochs_ = 0;
    } else {
        ++stale_epochs_;
    }
    best_ = any_ ? std::max(best_, val_accuracy) : val_accuracy;
    any_ = true;
    return stale_epochs_ >= patience_ ? StopDecision::stop
                                      : StopDecision::continue_training;
}

std::string training_config_digest(const TrainingConfig& config) {
    std::string blob = config.architecture_id + "|" + std::to_string(config.max_epochs) +
                       "|" + format_double(config.early_stop_min_delta) + "|" +
                       std::to_string(config.early_stop_patience) + "|" +
                       std::to_string(config.fold_count) + "|" +
                       std::to_string(config.seed) + "|" + config.optimizer + "|" +
                       std::to_string(config.batch_size) + "|" +
                       format_double(config.learning_rate) + "|" +
                       format_double(config.momentum) + "|" +
                       (config.pretrained_init ? "pre" : "scratch");
    const auto& a = config.augmentation;
    blob += "|" + std::to_string(a.horizontal_flip) + "," + format_double(a.flip_prob) +
            "," + format_double(a.rotation_deg) + "," + format_double(a.translation_frac) +
            "," + format_double(a.scale_min) + "," + format_double(a.scale_max) + "," +
            format_double(a.brightness) + "," + format_double(a.contrast);
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hash_combine(0x5eedf00d, blob)));
    return buf;
}

StopDecision early_stop_decision(const std::vector<double>& val_accuracy_history,
                                 double min_delta, int patience) {
    if (val_accuracy_history.empty())
        throw ContractError("early_stop_decision: empty history");
    EarlyStopMonitor monitor(min_delta, patience);
    StopDecision decision = StopDecision::continue_training;
    for (double acc : val_accuracy_history) decision = monitor.observe(acc);
    return decision;
}

}  // namespace ferbench
