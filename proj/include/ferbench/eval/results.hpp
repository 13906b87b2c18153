#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ferbench/eval/evaluator.hpp"

namespace ferbench {

// One results-store row. Skipped (empty-intersection) pairs appear with
// n_test = 0 and no macro_f1, so missingness survives the round trip.
struct EvalRow {
    std::string model_id;
    std::string architecture_id;
    std::string train_dataset;
    int fold_index = 0;
    std::string test_dataset;
    std::size_t n_test = 0;
    std::vector<ExpressionLabel> classes_used;
    std::optional<double> macro_f1;
    std::map<ExpressionLabel, double> per_class_f1;
};

EvalRow row_from_result(const EvalResult& result);
EvalRow skip_row(const EvalKey& key, const std::string& test_dataset);

// Header + rows in lexicographic key order (architecture, train, fold, test).
std::string serialize_results_csv(std::vector<EvalRow> rows);
std::vector<EvalRow> parse_results_csv(const std::string& text);
void save_results_csv(const std::filesystem::path& path, std::vector<EvalRow> rows);
std::vector<EvalRow> load_results_csv(const std::filesystem::path& path);

struct TensorKey {
    std::string architecture;
    std::string train_dataset;
    std::string test_dataset;
    auto operator<=>(const TensorKey&) const = default;
};

// Fold-averaged scores per (architecture, train, test). Pairs skipped by
// every fold are listed in `missing`, never zero-filled.
struct PerformanceTensor {
    std::map<TensorKey, double> scores;
    std::map<TensorKey, int> fold_counts;
    std::vector<TensorKey> missing;

    std::vector<std::string> architectures() const;
    std::vector<std::string> datasets() const;
    std::optional<double> score(const std::string& arch, const std::string& train,
                                const std::string& test) const;
};

// Throws IntegrityError on duplicate (architecture, train, fold, test) rows.
PerformanceTensor build_performance_tensor(const std::vector<EvalRow>& rows);

}  // namespace ferbench
