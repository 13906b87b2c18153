#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ferbench/core/manifest.hpp"

namespace ferbench {

struct FoldSplit {
    int fold_index = 0;
    std::set<std::string> train_ids;
    std::set<std::string> val_ids;
};

// Cross-validation folds over the non-excluded samples. When at least 90% of
// them carry a user id the split is subject-disjoint (users packed greedily
// into the smallest fold, samples without a user treated as singletons);
// otherwise assignment is stratified by class. Deterministic in
// (manifest, fold_count, seed).
//
// Throws FoldError when a single user holds more than (1 - 1/fold_count) of
// the samples, or when there are fewer samples than folds.
std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int fold_count,
                                  std::uint64_t seed);

std::string serialize_folds(const std::vector<FoldSplit>& folds);
std::vector<FoldSplit> parse_folds(const std::string& text);
void save_folds(const std::filesystem::path& path, const std::vector<FoldSplit>& folds);
std::vector<FoldSplit> load_folds(const std::filesystem::path& path);

}  // namespace ferbench
