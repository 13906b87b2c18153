#pragma once

#include <map>
#include <vector>

#include "ferbench/core/label.hpp"

namespace ferbench {

// Square confusion matrix over an explicit class list, rows = true class,
// columns = predicted class.
struct ConfusionMatrix {
    std::vector<ExpressionLabel> classes;  // sorted canonical order
    std::vector<std::vector<std::int64_t>> counts;

    static ConfusionMatrix zeros(std::vector<ExpressionLabel> classes);
    void add(ExpressionLabel truth, ExpressionLabel predicted);
    std::int64_t total() const;
    std::int64_t row_sum(std::size_t row) const;
    std::int64_t col_sum(std::size_t col) const;
};

// Per-class F1 with the conventions: precision with an empty predicted
// column is 0; classes with no true samples are omitted entirely.
std::map<ExpressionLabel, double> per_class_f1(const ConfusionMatrix& m);

// Unweighted mean of per-class F1 over the supported classes. Throws
// ContractError when no class has support.
double macro_f1(const ConfusionMatrix& m);

}  // namespace ferbench
