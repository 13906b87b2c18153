// ferbench command-line front end. One subcommand per pipeline stage; each
// stage reads the previous stage's artifact and can be re-run in isolation.

#include <CLI11.hpp>

#include <iostream>

#include "ferbench/annotate/batch_protocol.hpp"
#include "ferbench/annotate/stub.hpp"
#include "ferbench/cli/runconfig.hpp"
#include "ferbench/cli/stages.hpp"
#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/pipeline/class_map.hpp"
#include "ferbench/simd/kernels.hpp"
#include "ferbench/synth/generator.hpp"

namespace {

using ferbench::RunConfig;
using ferbench::StageFilter;

struct CommonFlags {
    std::string config_path;
    std::string dataset;
    std::string architecture;
    int fold = -1;
    int jobs = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool dry_run = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool needs_config = true) {
    auto* opt = cmd->add_option("--config", flags.config_path, "run configuration file");
    if (needs_config) opt->required();
    cmd->add_option("--dataset", flags.dataset, "restrict to one dataset");
    cmd->add_option("--arch", flags.architecture, "restrict to one architecture");
    cmd->add_option("--fold", flags.fold, "restrict to one fold index");
    cmd->add_option("--jobs", flags.jobs, "max concurrent jobs")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", flags.seed, "override the config seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    cmd->add_flag("--dry-run", flags.dry_run, "print planned work without running");
}

StageFilter make_filter(const CommonFlags& flags) {
    StageFilter f;
    if (!flags.dataset.empty()) f.dataset = flags.dataset;
    if (!flags.architecture.empty()) f.architecture = flags.architecture;
    if (flags.fold >= 0) f.fold = flags.fold;
    f.dry_run = flags.dry_run;
    f.jobs = flags.jobs;
    return f;
}

RunConfig load_config(const CommonFlags& flags) {
    RunConfig cfg = ferbench::load_run_config(flags.config_path);
    if (flags.seed_set) {
        cfg.seed = flags.seed;
        cfg.training.seed = flags.seed;
    }
    return cfg;
}

// Demo corpus: three glyph image datasets exercising the qualitative axes
// (clean vs label noise vs a higher-variability class superset) plus one
// clip dataset for the frame-sampling path, with a ready-to-run config.
int run_synth(const std::string& out_dir, std::uint64_t seed) {
    namespace fs = std::filesystem;
    using namespace ferbench;
    const fs::path root(out_dir);

    const std::vector<ExpressionLabel> base_classes = {
        ExpressionLabel::anger, ExpressionLabel::happiness, ExpressionLabel::sadness,
        ExpressionLabel::neutral};

    GlyphDatasetSpec clean;
    clean.name = "glyphs_clean";
    clean.classes = base_classes;
    clean.samples_per_class = 56;
    clean.rotation_jitter_deg = 8;
    clean.noise_level = 0.03;
    clean.dataset_demographics = true;
    clean.seed = seed;
    std::cout << "synth: glyphs_clean " << generate_glyph_dataset(clean, root / "glyphs_clean")
              << " samples\n";

    GlyphDatasetSpec noisy = clean;
    noisy.name = "glyphs_noisy";
    noisy.label_noise = 0.30;
    noisy.dataset_demographics = false;
    noisy.no_face_fraction = 0.02;
    std::cout << "synth: glyphs_noisy " << generate_glyph_dataset(noisy, root / "glyphs_noisy")
              << " samples\n";

    GlyphDatasetSpec super;
    super.name = "glyphs_super";
    super.classes = std::vector<ExpressionLabel>(all_expression_labels().begin(),
                                                 all_expression_labels().end());
    super.samples_per_class = 96;
    super.rotation_jitter_deg = 16;
    super.scale_jitter = 0.20;
    super.noise_level = 0.35;
    super.pixel_noise = 0.30;
    super.eye_error_px = 5.0;
    super.brightness_jitter = 0.50;
    super.bad_pose_fraction = 0.03;
    super.seed = seed;
    std::cout << "synth: glyphs_super " << generate_glyph_dataset(super, root / "glyphs_super")
              << " samples\n";

    ClipDatasetSpec clips;
    clips.name = "glyph_clips";
    clips.classes = base_classes;
    clips.seed = seed;
    std::cout << "synth: glyph_clips " << generate_clip_dataset(clips, root / "glyph_clips")
              << " frames\n";

    // Paths in the config are relative to the config file itself.
    RunConfig cfg;
    cfg.output_root = "out";
    cfg.seed = seed;
    cfg.architectures = {"tiny"};
    cfg.training.fold_count = 2;
    cfg.training.max_epochs = 20;
    auto add = [&](const std::string& name, const std::string& layout, SamplingKind s) {
        DatasetEntry e;
        e.name = name;
        e.root = name;
        e.layout = layout;
        e.provenance = Provenance::lab_controlled;
        e.sampling = s;
        cfg.datasets[name] = e;
    };
    add("glyphs_clean", "synthetic", SamplingKind::passthrough);
    add("glyphs_noisy", "synthetic", SamplingKind::passthrough);
    add("glyphs_super", "synthetic", SamplingKind::passthrough);
    add("glyph_clips", "frame_clips", SamplingKind::neutral_plus_apex);
    save_run_config(cfg, root / "config.json");
    std::cout << "synth: wrote " << (root / "config.json").string() << "\n";
    return 0;
}

int run_stub_annotate(const std::string& sidecar, const std::string& request,
                      const std::string& response) {
    using namespace ferbench;
    auto truth = std::make_shared<SidecarTruth>(SidecarTruth::load(sidecar));
    const AdapterSet adapters = make_stub_adapters(truth);
    const auto requests = parse_batch_requests(io::read_text(request));
    const auto responses = run_adapters_on_batch(adapters, requests);
    io::atomic_write(response, serialize_batch_responses(responses));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ferbench: cross-dataset facial-expression benchmark pipeline"};
    app.require_subcommand(1);

    CommonFlags flags;

    struct StageCmd {
        const char* name;
        const char* help;
        void (*fn)(const RunConfig&, const StageFilter&, std::ostream&);
    };
    const std::vector<StageCmd> stages = {
        {"ingest", "scan raw dataset layouts into manifests", ferbench::stage_ingest},
        {"sample-frames", "pick frames from video clips", ferbench::stage_sample_frames},
        {"unify-classes", "map raw labels to the canonical classes",
         ferbench::stage_unify_classes},
        {"annotate", "run face/landmark/age adapters", ferbench::stage_annotate},
        {"age-groups", "assign child/adult/elderly groups", ferbench::stage_age_groups},
        {"exclude", "flag unusable samples", ferbench::stage_exclude},
        {"preprocess", "align, crop and grayscale the faces", ferbench::stage_preprocess},
        {"validate", "check manifest invariants", ferbench::stage_validate},
        {"stats", "export dataset statistics CSVs", ferbench::stage_stats},
        {"split", "build cross-validation folds", ferbench::stage_split},
        {"train", "train every (dataset, architecture, fold) cell", ferbench::stage_train},
        {"evaluate", "evaluate every model on every dataset", ferbench::stage_evaluate},
        {"metrics", "compute the similarity metrics", ferbench::stage_metrics},
        {"report", "render figures and their backing CSVs", ferbench::stage_report},
        {"run-all", "run every stage in order", ferbench::run_all_stages},
    };
    for (const auto& stage : stages)
        add_common_flags(app.add_subcommand(stage.name, stage.help), flags);

    std::string synth_out = "synth_data";
    std::uint64_t synth_seed = 42;
    auto* synth = app.add_subcommand("synth", "generate the synthetic demo datasets");
    synth->add_option("--out", synth_out, "destination directory");
    synth->add_option("--seed", synth_seed, "generator seed");

    std::string sa_sidecar, sa_request, sa_response;
    auto* stub_annotate = app.add_subcommand(
        "stub-annotate", "serve the batch annotation protocol from a sidecar file");
    stub_annotate->add_option("--sidecar", sa_sidecar, "sidecar metadata file")->required();
    stub_annotate->add_option("request", sa_request, "request file")->required();
    stub_annotate->add_option("response", sa_response, "response file")->required();

    auto* backend = app.add_subcommand("simd-backend", "print the active kernel backend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;  // usage error
    }

    try {
        if (synth->parsed()) return run_synth(synth_out, synth_seed);
        if (stub_annotate->parsed())
            return run_stub_annotate(sa_sidecar, sa_request, sa_response);
        if (backend->parsed()) {
            std::cout << ferbench::simd::backend_name() << "\n";
            return 0;
        }
        const RunConfig cfg = load_config(flags);
        const StageFilter filter = make_filter(flags);
        for (const auto& stage : stages) {
            if (app.get_subcommand(stage.name)->parsed()) {
                stage.fn(cfg, filter, std::cout);
                return 0;
            }
        }
        std::cerr << "error: no subcommand matched\n";
        return 2;
    } catch (const ferbench::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
