#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ferbench/core/manifest.hpp"

namespace ferbench {

// Dataset-level statistics over non-excluded samples. Maps keyed by dataset
// name; datasets that carry no user ids are absent from the user-based maps.
struct StatisticsBundle {
    std::map<std::string, std::size_t> image_count_per_dataset;
    std::map<std::string, std::size_t> user_count_per_dataset;
    std::map<std::string, double> images_per_user;
    std::map<std::int64_t, std::size_t> age_histogram;  // 1-year bins, all datasets combined
    std::map<std::string, std::map<Gender, double>> gender_distribution;
    std::map<std::string, std::map<AgeGroup, double>> age_group_distribution;
    std::map<std::string, std::map<ExpressionLabel, double>> class_distribution;
};

StatisticsBundle compute_statistics(const std::vector<DatasetManifest>& manifests);

// One CSV per statistic, header row first, rows ordered by dataset name.
// Returns the written file names.
std::vector<std::string> export_statistics_csv(const StatisticsBundle& stats,
                                               const std::filesystem::path& out_dir);

}  // namespace ferbench
