#include "ferbench/eval/confusion.hpp"

#include <algorithm>

#include "ferbench/common.hpp"

namespace ferbench {

ConfusionMatrix ConfusionMatrix::zeros(std::vector<ExpressionLabel> classes) {
    if (classes.empty()) throw ContractError("confusion matrix: empty class list");
    std::sort(classes.begin(), classes.end());
    ConfusionMatrix m;
    m.classes = std::move(classes);
    m.counts.assign(m.classes.size(), std::vector<std::int64_t>(m.classes.size(), 0));
    return m;
}

void ConfusionMatrix::add(ExpressionLabel truth, ExpressionLabel predicted) {
    auto index_of = [&](ExpressionLabel l) -> std::size_t {
        auto it = std::lower_bound(classes.begin(), classes.end(), l);
        if (it == classes.end() || *it != l)
            throw ContractError("confusion matrix: label '" + to_string(l) +
                                "' not in class list");
        return static_cast<std::size_t>(it - classes.begin());
    };
    ++counts[index_of(truth)][index_of(predicted)];
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t n = 0;
    for (const auto& row : counts)
        for (std::int64_t v : row) n += v;
    return n;
}

std::int64_t ConfusionMatrix::row_sum(std::size_t row) const {
    std::int64_t n = 0;
    for (std::int64_t v : counts[row]) n += v;
    return n;
}

std::int64_t ConfusionMatrix::col_sum(std::size_t col) const {
    std::int64_t n = 0;
    for (const auto& row : counts) n += row[col];
    return n;
}

std::map<ExpressionLabel, double> per_class_f1(const ConfusionMatrix& m) {
    std::map<ExpressionLabel, double> out;
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const std::int64_t support = m.row_sum(c);
        if (support == 0) continue;  // no true samples: excluded from the metric
        const std::int64_t predicted = m.col_sum(c);
        const double tp = static_cast<double>(m.counts[c][c]);
        const double precision = predicted == 0 ? 0.0 : tp / static_cast<double>(predicted);
        const double recall = tp / static_cast<double>(support);
        const double f1 = (precision + recall) == 0.0
                              ? 0.0
                              : 2.0 * precision * recall / (precision + recall);
        out[m.classes[c]] = f1;
    }
    return out;
}

double macro_f1(const ConfusionMatrix& m) {
    const auto f1 = per_class_f1(m);
    if (f1.empty())
        throw ContractError("macro_f1: every class has zero support, score undefined");
    double sum = 0;
    for (const auto& [label, v] : f1) sum += v;
    return sum / static_cast<double>(f1.size());
}

}  // namespace ferbench
