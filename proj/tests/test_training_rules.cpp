#include <doctest.h>

#include "ferbench/common.hpp"
#include "ferbench/rng.hpp"
#include "ferbench/train/rules.hpp"

using namespace ferbench;

TEST_CASE("training config invariants") {
    TrainingConfig ok;
    CHECK_NOTHROW(validate(ok));

    TrainingConfig bad = ok;
    bad.max_epochs = 0;
    CHECK_THROWS_AS(validate(bad), ContractError);
    bad = ok;
    bad.fold_count = 1;
    CHECK_THROWS_AS(validate(bad), ContractError);
    bad = ok;
    bad.early_stop_patience = 0;
    CHECK_THROWS_AS(validate(bad), ContractError);
    bad = ok;
    bad.pretrained_init = true;  // no weights shipped
    CHECK_THROWS_AS(validate(bad), ContractError);
    bad = ok;
    bad.optimizer = "rmsprop";
    CHECK_THROWS_AS(validate(bad), ContractError);
}

TEST_CASE("class weights: balanced split weighs one") {
    const auto w = compute_class_weights(
        {{ExpressionLabel::happiness, 20}, {ExpressionLabel::anger, 20}});
    CHECK(w.at(ExpressionLabel::happiness) == doctest::Approx(1.0));
    CHECK(w.at(ExpressionLabel::anger) == doctest::Approx(1.0));
}

TEST_CASE("class weights: inverse frequency") {
    const auto w = compute_class_weights(
        {{ExpressionLabel::happiness, 30}, {ExpressionLabel::fear, 10}});
    CHECK(w.at(ExpressionLabel::happiness) == doctest::Approx(40.0 / (2 * 30)));
    CHECK(w.at(ExpressionLabel::fear) == doctest::Approx(2.0));
}

TEST_CASE("class weight identity holds exactly") {
    Rng rng(71);
    for (int trial = 0; trial < 200; ++trial) {
        std::map<ExpressionLabel, std::size_t> counts;
        const int k = 2 + static_cast<int>(rng.uniform_int(6));
        std::size_t total = 0;
        for (int c = 0; c < k; ++c) {
            const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform_int(200));
            counts[all_expression_labels()[static_cast<std::size_t>(c)]] = n;
            total += n;
        }
        const auto weights = compute_class_weights(counts);
        double weighted = 0;
        for (const auto& [label, n] : counts)
            weighted += static_cast<double>(n) * weights.at(label);
        CHECK(weighted == doctest::Approx(static_cast<double>(total)).epsilon(1e-12));
    }
}

TEST_CASE("class weights reject zero counts and empty maps") {
    CHECK_THROWS_AS(compute_class_weights({}), ContractError);
    CHECK_THROWS_AS(
        compute_class_weights({{ExpressionLabel::fear, 0}, {ExpressionLabel::anger, 3}}),
        ContractError);
}

TEST_CASE("early stopping: slow creep stops after epoch seven") {
    const std::vector<double> history = {0.50, 0.52, 0.521, 0.522, 0.523, 0.524, 0.525};
    EarlyStopMonitor monitor(0.01, 5);
    std::vector<StopDecision> decisions;
    for (double acc : history) decisions.push_back(monitor.observe(acc));
    for (std::size_t i = 0; i + 1 < decisions.size(); ++i)
        CHECK(decisions[i] == StopDecision::continue_training);
    CHECK(decisions.back() == StopDecision::stop);
    CHECK(early_stop_decision(history) == StopDecision::stop);
}

TEST_CASE("early stopping: steady gains never stop") {
    std::vector<double> history;
    double acc = 0.1;
    for (int epoch = 0; epoch < 20; ++epoch) {
        acc += 0.02;
        history.push_back(acc);
        CHECK(early_stop_decision(history) == StopDecision::continue_training);
    }
}

TEST_CASE("early stopping: flat history stops after epoch six") {
    const std::vector<double> history = {0.50, 0.50, 0.50, 0.50, 0.50, 0.50};
    EarlyStopMonitor monitor(0.01, 5);
    StopDecision last = StopDecision::continue_training;
    int stop_epoch = 0;
    for (std::size_t i = 0; i < history.size(); ++i) {
        last = monitor.observe(history[i]);
        if (last == StopDecision::stop && stop_epoch == 0)
            stop_epoch = static_cast<int>(i) + 1;
    }
    CHECK(stop_epoch == 6);
}

TEST_CASE("early stopping never fires before patience plus one epochs") {
    Rng rng(72);
    for (int trial = 0; trial < 1000; ++trial) {
        const int patience = 1 + static_cast<int>(rng.uniform_int(8));
        EarlyStopMonitor monitor(0.01, patience);
        const int epochs = 1 + static_cast<int>(rng.uniform_int(30));
        for (int e = 1; e <= epochs; ++e) {
            const StopDecision d = monitor.observe(rng.uniform(0, 1));
            if (d == StopDecision::stop) {
                CHECK(e >= patience + 1);
                break;
            }
        }
    }
    CHECK_THROWS_AS(early_stop_decision({}), ContractError);
}

TEST_CASE("config digest tracks every knob") {
    TrainingConfig a;
    TrainingConfig b = a;
    CHECK(training_config_digest(a) == training_config_digest(b));
    b.learning_rate = 0.01;
    CHECK(training_config_digest(a) != training_config_digest(b));
    b = a;
    b.augmentation.rotation_deg = 5;
    CHECK(training_config_digest(a) != training_config_digest(b));
}
