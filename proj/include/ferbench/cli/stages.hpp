#pragma once

#include <optional>
#include <ostream>

#include "ferbench/cli/runconfig.hpp"

namespace ferbench {

// Shared subcommand flags. Stages log one line per unit of work to `log`
// and throw on failure; the CLI maps exceptions to exit codes.
struct StageFilter {
    std::optional<std::string> dataset;
    std::optional<std::string> architecture;
    std::optional<int> fold;
    bool dry_run = false;
    int jobs = 1;
};

void stage_ingest(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_sample_frames(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_unify_classes(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_annotate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_age_groups(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_exclude(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_preprocess(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_validate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_stats(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_split(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_train(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_evaluate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_metrics(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);
void stage_report(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);

// Convenience: every stage in order (the desk-scale end-to-end path).
void run_all_stages(const RunConfig& cfg, const StageFilter& filter, std::ostream& log);

}  // namespace ferbench
