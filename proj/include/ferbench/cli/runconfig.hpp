#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ferbench/core/label.hpp"
#include "ferbench/pipeline/frame_sampling.hpp"
#include "ferbench/train/config.hpp"

namespace ferbench {

struct DatasetEntry {
    std::string name;
    std::filesystem::path root;
    std::string layout;  // class_dirs | user_class_dirs | frame_clips | synthetic
    Provenance provenance = Provenance::lab_controlled;
    SamplingKind sampling = SamplingKind::passthrough;
};

struct AdapterEntry {
    std::string mode = "stub";  // stub | command
    std::string command;        // invoked as `command <request> <response>`
};

struct RunConfig {
    std::filesystem::path output_root;
    std::uint64_t seed = 0;
    std::optional<std::filesystem::path> class_map_path;  // builtin table if absent
    std::map<std::string, DatasetEntry> datasets;
    AdapterEntry adapters;
    std::vector<std::string> architectures;
    TrainingConfig training;
    int jobs = 1;

    // Stage artifact layout under output_root.
    std::filesystem::path manifest_path(const std::string& dataset,
                                        const std::string& stage) const;
    std::filesystem::path annotations_path(const std::string& dataset) const;
    std::filesystem::path folds_path(const std::string& dataset) const;
    std::filesystem::path processed_root() const;
    std::filesystem::path models_root() const;
    std::filesystem::path stats_dir() const;
    std::filesystem::path results_path() const;
    std::filesystem::path metrics_dir() const;
    std::filesystem::path figures_dir() const;
};

// Parses the JSON config, applies the FERBENCH_OUT override and validates
// that every referenced path exists.
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace ferbench
