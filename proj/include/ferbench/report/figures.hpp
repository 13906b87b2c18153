#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ferbench/core/statistics.hpp"
#include "ferbench/metrics/similarity.hpp"

namespace ferbench {

struct FigureOutput {
    std::vector<std::string> written;  // file names under out_dir
    std::vector<std::string> notices;  // skipped figures, with the reason
};

// Emits the exploration and benchmark figures as SVG, each with a sibling
// CSV holding exactly the plotted numbers. Either input may be null; the
// figures it would feed are skipped with a notice.
FigureOutput render_figures(const StatisticsBundle* stats,
                            const SimilarityReport* report,
                            const std::filesystem::path& out_dir);

}  // namespace ferbench
