#pragma once

#include <map>
#include <vector>

#include "ferbench/core/label.hpp"
#include "ferbench/train/config.hpp"

namespace ferbench {

// Inverse-frequency loss weights: weight_c = N / (K * n_c) over the K classes
// present in the training split. A balanced split yields all-ones, and
// sum_c n_c * weight_c == N holds exactly.
std::map<ExpressionLabel, double> compute_class_weights(
    const std::map<ExpressionLabel, std::size_t>& class_counts);

enum class StopDecision { continue_training, stop };

// Tracks validation accuracy across epochs. An epoch improves when its
// accuracy reaches the running best plus min_delta (absolute); after
// `patience` consecutive non-improving epochs the decision flips to stop.
class EarlyStopMonitor {
public:
    EarlyStopMonitor(double min_delta, int patience);

    StopDecision observe(double val_accuracy);

    double best() const { return best_; }
    int epochs_seen() const { return epochs_; }

private:
    double min_delta_;
    int patience_;
    double best_ = 0;
    bool any_ = false;
    int stale_epochs_ = 0;
    int epochs_ = 0;
};

// Decision after feeding the whole history through a fresh monitor.
StopDecision early_stop_decision(const std::vector<double>& val_accuracy_history,
                                 double min_delta = 0.01, int patience = 5);

// Stable digest of every training knob; written into each cell's job file so
// results can be traced to the exact configuration.
std::string training_config_digest(const TrainingConfig& config);

}  // namespace ferbench
