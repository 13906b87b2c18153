#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ferbench/eval/results.hpp"

namespace ferbench {

// CS(d1, d2): mean theta-hat over the models that cover the pair; LS, GS and
// PS derive from it. Missing pairs stay missing and shrink the averaging
// denominator rather than contributing zeros.
struct CrossSimilarity {
    double value = 0;
    int model_count = 0;  // |M'|, the models contributing to the mean
};

std::optional<CrossSimilarity> cross_similarity(const PerformanceTensor& tensor,
                                                const std::string& d_train,
                                                const std::string& d_test);

std::optional<double> local_similarity(const PerformanceTensor& tensor,
                                       const std::string& dataset);

std::optional<double> global_similarity(const PerformanceTensor& tensor,
                                        const std::string& d_train);

// PS = CS(d_train, d_test) / CS(d_test, d_test); nullopt when the denominator
// is missing or zero (undefined, never silently 0). May exceed 1.
std::optional<double> paired_similarity(const PerformanceTensor& tensor,
                                        const std::string& d_train,
                                        const std::string& d_test);

struct SimilarityTable {
    // All matrices/vectors indexed by the report's dataset order.
    std::vector<std::vector<std::optional<double>>> cs;
    std::vector<std::optional<double>> ls;
    std::vector<std::optional<double>> gs;
    std::vector<std::vector<std::optional<double>>> ps;
};

struct SimilarityReport {
    std::vector<std::string> models;    // architecture ids, sorted
    std::vector<std::string> datasets;  // sorted
    SimilarityTable aggregate;
    std::map<std::string, SimilarityTable> per_model;
    std::vector<std::pair<std::string, std::string>> missing_pairs;  // (train, test)

    std::size_t dataset_index(const std::string& name) const;
};

SimilarityReport build_similarity_report(const PerformanceTensor& tensor);

// local_global.csv, paired_similarity.csv plus per-model variants suffixed
// __<architecture>. Values render with four decimals; missing cells are
// empty. Returns the written file names.
std::vector<std::string> write_similarity_csv(const SimilarityReport& report,
                                              const std::filesystem::path& out_dir);

// The local/global table alone (used by the report stage to render published
// value fixtures byte-exactly).
std::string render_local_global_csv(const std::vector<std::string>& datasets,
                                    const std::vector<std::optional<double>>& ls,
                                    const std::vector<std::optional<double>>& gs);

}  // namespace ferbench
