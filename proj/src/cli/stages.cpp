#include "ferbench/cli/stages.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "ferbench/annotate/batch_protocol.hpp"
#include "ferbench/annotate/stub.hpp"
#include "ferbench/common.hpp"
#include "ferbench/core/statistics.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/metrics/similarity.hpp"
#include "ferbench/pipeline/class_map.hpp"
#include "ferbench/pipeline/demographics.hpp"
#include "ferbench/pipeline/exclusion.hpp"
#include "ferbench/pipeline/preprocess.hpp"
#include "ferbench/report/figures.hpp"
#include "ferbench/train/trainer.hpp"

namespace ferbench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<DatasetEntry> selected_datasets(const RunConfig& cfg,
                                            const StageFilter& filter) {
    std::vector<DatasetEntry> out;
    for (const auto& [name, entry] : cfg.datasets) {
        if (filter.dataset && *filter.dataset != name) continue;
        out.push_back(entry);
    }
    if (out.empty())
        throw InputError(filter.dataset
                             ? "dataset '" + *filter.dataset + "' is not in the config"
                             : "config declares no datasets");
    return out;
}

std::vector<std::string> selected_architectures(const RunConfig& cfg,
                                                const StageFilter& filter) {
    std::vector<std::string> out;
    for (const auto& arch : cfg.architectures) {
        if (filter.architecture && *filter.architecture != arch) continue;
        out.push_back(arch);
    }
    if (out.empty())
        throw InputError("architecture filter matches nothing in the config");
    return out;
}

void sort_by_sample_id(DatasetManifest& m) {
    std::sort(m.samples.begin(), m.samples.end(),
              [](const SampleRecord& a, const SampleRecord& b) {
                  return a.sample_id < b.sample_id;
              });
}

// Bounded worker pool over n independent jobs; the first exception wins.
void run_parallel(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct UserDemographics {
    std::optional<double> age_years;
    std::optional<Gender> gender;
    std::optional<AgeGroup> age_group;
};

std::map<std::string, UserDemographics> load_users_csv(const fs::path& path) {
    std::map<std::string, UserDemographics> out;
    if (!fs::exists(path)) return out;
    const auto lines = io::read_lines(path);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const auto f = io::csv_parse_row(lines[i]);
        if (f.size() < 4)
            throw InputError("users.csv line " + std::to_string(i + 1) +
                             ": expected user_id,age_years,gender,age_group");
        UserDemographics d;
        if (!f[1].empty()) d.age_years = std::stod(f[1]);
        if (!f[2].empty()) {
            auto g = gender_from_string(f[2]);
            if (!g) throw InputError("users.csv: bad gender '" + f[2] + "'");
            d.gender = g;
        }
        if (!f[3].empty()) {
            auto g = age_group_from_string(f[3]);
            if (!g) throw InputError("users.csv: bad age_group '" + f[3] + "'");
            d.age_group = g;
        }
        out[f[0]] = d;
    }
    return out;
}

DatasetManifest ingest_class_dirs(const DatasetEntry& entry, bool with_users) {
    DatasetManifest m;
    m.name = entry.name;
    m.provenance = entry.provenance;
    const auto users = with_users ? load_users_csv(entry.root / "users.csv")
                                  : std::map<std::string, UserDemographics>{};

    auto add_image = [&](const fs::path& file, const std::string& label_raw,
                         const std::optional<std::string>& user_id) {
        SampleRecord r;
        r.dataset = entry.name;
        std::string id = label_raw + "__" + file.stem().string();
        if (user_id) id = *user_id + "__" + id;
        r.sample_id = id;
        r.media_path = fs::relative(file, entry.root).generic_string();
        r.media_type = MediaType::image;
        r.label_raw = label_raw;
        r.user_id = user_id;
        if (user_id) {
            auto it = users.find(*user_id);
            if (it != users.end()) {
                r.age_years = it->second.age_years;
                r.gender = it->second.gender;
                if (!r.age_years) r.age_group = it->second.age_group;
            }
        }
        m.samples.push_back(std::move(r));
    };

    if (!with_users) {
        for (const auto& dir : fs::directory_iterator(entry.root)) {
            if (!dir.is_directory()) continue;
            const std::string label = dir.path().filename().string();
            for (const auto& file : fs::directory_iterator(dir.path()))
                if (file.path().extension() == ".png")
                    add_image(file.path(), label, std::nullopt);
        }
    } else {
        for (const auto& user_dir : fs::directory_iterator(entry.root)) {
            if (!user_dir.is_directory()) continue;
            const std::string user = user_dir.path().filename().string();
            for (const auto& dir : fs::directory_iterator(user_dir.path())) {
                if (!dir.is_directory()) continue;
                const std::string label = dir.path().filename().string();
                for (const auto& file : fs::directory_iterator(dir.path()))
                    if (file.path().extension() == ".png")
                        add_image(file.path(), label, user);
            }
        }
    }
    return m;
}

DatasetManifest ingest_frame_clips(const DatasetEntry& entry) {
    DatasetManifest m;
    m.name = entry.name;
    m.provenance = entry.provenance;
    const fs::path clips = entry.root / "clips";
    if (!fs::exists(clips))
        throw InputError("frame_clips layout expects " + clips.string());
    for (const auto& user_dir : fs::directory_iterator(clips)) {
        if (!user_dir.is_directory()) continue;
        const std::string user = user_dir.path().filename().string();
        for (const auto& clip_dir : fs::directory_iterator(user_dir.path())) {
            if (!clip_dir.is_directory()) continue;
            const std::string dir_name = clip_dir.path().filename().string();
            const auto sep = dir_name.rfind("__");
            if (sep == std::string::npos)
                throw InputError("clip directory '" + dir_name +
                                 "' is not named <clip>__<label>");
            const std::string clip_id = dir_name.substr(0, sep);
            const std::string label = dir_name.substr(sep + 2);
            for (const auto& file : fs::directory_iterator(clip_dir.path())) {
                if (file.path().extension() != ".png") continue;
                const std::string stem = file.path().stem().string();
                const auto us = stem.rfind('_');
                if (us == std::string::npos) continue;
                const std::int64_t frame = std::stoll(stem.substr(us + 1));
                SampleRecord r;
                r.dataset = entry.name;
                r.sample_id = clip_id + "#" + std::to_string(frame);
                r.media_path = fs::relative(file.path(), entry.root).generic_string();
                r.media_type = MediaType::video;
                r.frame_index = frame;
                r.label_raw = label;
                r.user_id = user;
                m.samples.push_back(std::move(r));
            }
        }
    }
    return m;
}

DatasetManifest ingest_synthetic(const DatasetEntry& entry) {
    DatasetManifest m;
    m.name = entry.name;
    m.provenance = entry.provenance;
    const fs::path labels = entry.root / "labels.jsonl";
    if (!fs::exists(labels))
        throw InputError("synthetic layout expects " + labels.string());
    std::size_t lineno = 0;
    for (const auto& line : io::read_lines(labels)) {
        ++lineno;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError("labels.jsonl line " + std::to_string(lineno) + ": " + e.what());
        }
        SampleRecord r;
        r.dataset = entry.name;
        r.sample_id = j.at("sample_id").get<std::string>();
        r.media_path = j.at("media_path").get<std::string>();
        r.media_type = MediaType::image;
        r.label_raw = j.at("label_raw").get<std::string>();
        if (j.contains("user_id")) r.user_id = j["user_id"].get<std::string>();
        if (j.contains("age_years")) r.age_years = j["age_years"].get<double>();
        if (j.contains("gender")) {
            auto g = gender_from_string(j["gender"].get<std::string>());
            if (!g) throw InputError("labels.jsonl line " + std::to_string(lineno) + ": bad gender");
            r.gender = g;
        }
        if (j.contains("age_group")) {
            auto g = age_group_from_string(j["age_group"].get<std::string>());
            if (!g) throw InputError("labels.jsonl line " + std::to_string(lineno) + ": bad age_group");
            r.age_group = g;
        }
        m.samples.push_back(std::move(r));
    }
    return m;
}

DatasetManifest load_stage_manifest(const RunConfig& cfg, const DatasetEntry& entry,
                                    const std::string& stage) {
    return load_manifest(cfg.manifest_path(entry.name, stage), entry.provenance);
}

ClassMap effective_class_map(const RunConfig& cfg) {
    return cfg.class_map_path ? ClassMap::load_csv(*cfg.class_map_path)
                              : ClassMap::builtin();
}

}  // namespace

void stage_ingest(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m;
        if (entry.layout == "class_dirs") {
            m = ingest_class_dirs(entry, false);
        } else if (entry.layout == "user_class_dirs") {
            m = ingest_class_dirs(entry, true);
        } else if (entry.layout == "frame_clips") {
            m = ingest_frame_clips(entry);
        } else if (entry.layout == "synthetic") {
            m = ingest_synthetic(entry);
        } else {
            throw InputError("unknown dataset layout '" + entry.layout + "'");
        }
        if (m.samples.empty())
            throw InputError("no samples found in " + entry.root.string());
        sort_by_sample_id(m);
        if (filter.dry_run) {
            log << "[dry-run] ingest " << entry.name << ": " << m.samples.size()
                << " samples\n";
            continue;
        }
        save_manifest(cfg.manifest_path(entry.name, "ingest"), m);
        log << "ingest " << entry.name << ": " << m.samples.size() << " samples\n";
    }
}

void stage_sample_frames(const RunConfig& cfg, const StageFilter& filter,
                         std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest in = load_stage_manifest(cfg, entry, "ingest");
        DatasetManifest out;
        out.name = in.name;
        out.provenance = in.provenance;

        if (entry.sampling == SamplingKind::passthrough) {
            out.samples = in.samples;
        } else {
            // Group frames by clip (parent directory of the frame file).
            std::map<std::string, std::vector<SampleRecord>> clips;
            for (const auto& s : in.samples) {
                if (s.media_type != MediaType::video)
                    throw InputError("dataset '" + entry.name +
                                     "' mixes still images with a frame-sampling strategy");
                clips[fs::path(s.media_path).parent_path().generic_string()].push_back(s);
            }
            for (auto& [clip, frames] : clips) {
                std::sort(frames.begin(), frames.end(),
                          [](const SampleRecord& a, const SampleRecord& b) {
                              return a.frame_index < b.frame_index;
                          });
                const auto picks = sample_frames(
                    static_cast<std::int64_t>(frames.size()), entry.sampling, clip);
                for (const auto& pick : picks) {
                    SampleRecord r = frames[static_cast<std::size_t>(pick.index)];
                    if (pick.is_neutral) r.label_raw = "neutral";
                    out.samples.push_back(std::move(r));
                }
            }
        }
        sort_by_sample_id(out);
        if (filter.dry_run) {
            log << "[dry-run] sample-frames " << entry.name << ": " << out.samples.size()
                << " records\n";
            continue;
        }
        save_manifest(cfg.manifest_path(entry.name, "frames"), out);
        log << "sample-frames " << entry.name << ": " << in.samples.size() << " -> "
            << out.samples.size() << " records\n";
    }
}

void stage_unify_classes(const RunConfig& cfg, const StageFilter& filter,
                         std::ostream& log) {
    const ClassMap map = effective_class_map(cfg);
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "frames");
        std::size_t unmapped = 0;
        for (auto& s : m.samples) {
            const UnifiedClass u = map.unify(s.label_raw, s.dataset);
            if (std::holds_alternative<ExpressionLabel>(u)) {
                s.label = std::get<ExpressionLabel>(u);
            } else {
                s.label.reset();
                ++unmapped;
            }
        }
        if (filter.dry_run) {
            log << "[dry-run] unify-classes " << entry.name << "\n";
            continue;
        }
        save_manifest(cfg.manifest_path(entry.name, "classes"), m);
        log << "unify-classes " << entry.name << ": " << unmapped << " unmapped\n";
    }
}

void stage_annotate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "classes");
        if (filter.dry_run) {
            log << "[dry-run] annotate " << entry.name << ": " << m.samples.size()
                << " records\n";
            continue;
        }

        AdapterSet stubs;
        if (cfg.adapters.mode == "stub") {
            const fs::path sidecar = entry.root / "sidecar.jsonl";
            if (!fs::exists(sidecar))
                throw AnnotationError("stub adapters need " + sidecar.string());
            auto truth = std::make_shared<SidecarTruth>(SidecarTruth::load(sidecar));
            stubs = make_stub_adapters(truth);
        }

        // Face detection fills boxes; command-mode annotators expect them to
        // be present already (the request format carries a box per line).
        if (stubs.detector) {
            for (auto& s : m.samples) {
                if (s.face_bbox) continue;
                if (auto det = stubs.detector->detect_primary_face(
                        s.sample_id, entry.root / s.media_path))
                    s.face_bbox = det->bbox;
            }
        }

        std::vector<BatchRequest> requests;
        for (const auto& s : m.samples)
            if (s.face_bbox)
                requests.push_back({s.sample_id, entry.root / s.media_path, *s.face_bbox});

        std::vector<BatchResponse> responses;
        if (cfg.adapters.mode == "stub") {
            responses = run_adapters_on_batch(stubs, requests);
        } else {
            responses = run_batch_command(cfg.adapters.command, requests,
                                          cfg.output_root / "annotations" / "work");
        }

        std::map<std::string, const BatchResponse*> by_id;
        for (const auto& r : responses) by_id[r.sample_id] = &r;

        // Per-image estimates; fused per user below.
        std::map<std::string, std::vector<DemographicObservation>> per_user;
        std::map<std::string, DemographicObservation> per_sample;
        for (auto& s : m.samples) {
            auto it = by_id.find(s.sample_id);
            if (it == by_id.end()) continue;
            const BatchResponse& resp = *it->second;
            if (resp.landmarks) {
                s.eye_left = resp.landmarks->eye_left;
                s.eye_right = resp.landmarks->eye_right;
                s.head_pose = bin_head_pose(resp.landmarks->pose.yaw);
            }
            DemographicObservation obs;
            obs.sample_id = s.sample_id;
            if (resp.age_gender) {
                obs.age_years = resp.age_gender->age_years;
                obs.gender = resp.age_gender->gender;
            }
            per_sample[s.sample_id] = obs;
            if (s.user_id) per_user["u:" + *s.user_id].push_back(obs);
        }

        std::map<std::string, AggregatedDemographics> fused;
        for (const auto& [user, observations] : per_user)
            fused[user] = aggregate_user_demographics(observations);

        // Estimated ages go to the annotations artifact only; the age-group
        // stage consults it after dataset-provided values, preserving the
        // source priority. Gender has no later stage, so absent genders are
        // filled here from the fused estimate.
        std::string annotations;
        for (auto& s : m.samples) {
            std::optional<double> age;
            std::optional<Gender> gender;
            if (s.user_id) {
                auto it = fused.find("u:" + *s.user_id);
                if (it != fused.end()) {
                    age = it->second.age_years;
                    gender = it->second.gender;
                }
            } else {
                auto it = per_sample.find(s.sample_id);
                if (it != per_sample.end()) {
                    age = it->second.age_years;
                    gender = it->second.gender;
                }
            }
            if (!s.gender && gender) s.gender = gender;
            if (age || gender) {
                json j;
                j["sample_id"] = s.sample_id;
                if (age) j["age_years"] = *age;
                if (gender) j["gender"] = to_string(*gender);
                annotations += j.dump();
                annotations += '\n';
            }
        }

        io::atomic_write(cfg.annotations_path(entry.name), annotations);
        save_manifest(cfg.manifest_path(entry.name, "annotated"), m);
        log << "annotate " << entry.name << ": " << requests.size() << " faces\n";
    }
}

void stage_age_groups(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "annotated");

        std::map<std::string, double> estimated_age;
        const fs::path annotations = cfg.annotations_path(entry.name);
        if (fs::exists(annotations)) {
            for (const auto& line : io::read_lines(annotations)) {
                if (trim(line).empty()) continue;
                const json j = json::parse(line);
                if (j.contains("age_years"))
                    estimated_age[j.at("sample_id").get<std::string>()] =
                        j["age_years"].get<double>();
            }
        }

        std::size_t labeled = 0;
        for (auto& s : m.samples) {
            if (s.age_years) {
                s.age_group = age_group_for_years(*s.age_years);  // dataset age wins
            } else if (s.age_group) {
                // dataset-provided group, second priority: keep as-is
            } else {
                auto it = estimated_age.find(s.sample_id);
                if (it != estimated_age.end()) {
                    s.age_years = it->second;
                    s.age_group = age_group_for_years(it->second);
                }
            }
            if (s.age_group) ++labeled;
        }
        if (filter.dry_run) {
            log << "[dry-run] age-groups " << entry.name << "\n";
            continue;
        }
        save_manifest(cfg.manifest_path(entry.name, "aged"), m);
        log << "age-groups " << entry.name << ": " << labeled << "/" << m.samples.size()
            << " grouped\n";
    }
}

void stage_exclude(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "aged");
        std::size_t excluded = 0;
        for (auto& s : m.samples) {
            s = apply_exclusion(std::move(s));
            if (s.excluded) ++excluded;
        }
        if (filter.dry_run) {
            log << "[dry-run] exclude " << entry.name << "\n";
            continue;
        }
        save_manifest(cfg.manifest_path(entry.name, "final"), m);
        log << "exclude " << entry.name << ": " << excluded << " of " << m.samples.size()
            << " excluded\n";
    }
}

void stage_preprocess(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "final");
        std::vector<const SampleRecord*> todo;
        for (const auto& s : m.samples)
            if (!s.excluded) todo.push_back(&s);
        if (filter.dry_run) {
            log << "[dry-run] preprocess " << entry.name << ": " << todo.size()
                << " images\n";
            continue;
        }
        run_parallel(todo.size(), filter.jobs, [&](std::size_t i) {
            const SampleRecord& s = *todo[i];
            if (!s.eye_left || !s.eye_right || !s.face_bbox)
                throw DataError("preprocess: sample '" + s.sample_id +
                                "' survived exclusion without eyes/bbox");
            const io::Image raw = io::read_png(entry.root / s.media_path);
            const AlignResult aligned =
                align_and_crop(raw, *s.eye_left, *s.eye_right, *s.face_bbox);
            io::write_png(
                io::processed_image_path(cfg.processed_root(), s.dataset, s.sample_id),
                aligned.image);
        });
        log << "preprocess " << entry.name << ": " << todo.size() << " images\n";
    }
}

void stage_validate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    bool any = false;
    for (const auto& entry : selected_datasets(cfg, filter)) {
        // Validate the most advanced manifest available for the dataset.
        DatasetManifest m;
        bool found = false;
        for (const char* stage : {"final", "aged", "annotated", "classes", "frames", "ingest"}) {
            const auto path = cfg.manifest_path(entry.name, stage);
            if (fs::exists(path)) {
                m = load_manifest(path, entry.provenance);
                log << "validate " << entry.name << " (" << stage << " stage)\n";
                found = true;
                break;
            }
        }
        if (!found) throw InputError("no manifest found for dataset '" + entry.name + "'");
        for (const auto& v : validate_manifest(m, entry.root)) {
            log << "  violation [" << v.rule << "] sample=" << v.sample_id << ": "
                << v.detail << "\n";
            any = true;
        }
    }
    if (any) throw InputError("manifest validation reported violations");
    log << "validate: all manifests clean\n";
}

void stage_stats(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    std::vector<DatasetManifest> manifests;
    for (const auto& entry : selected_datasets(cfg, filter))
        manifests.push_back(load_stage_manifest(cfg, entry, "final"));
    if (filter.dry_run) {
        log << "[dry-run] stats over " << manifests.size() << " datasets\n";
        return;
    }
    const StatisticsBundle bundle = compute_statistics(manifests);
    for (const auto& name : export_statistics_csv(bundle, cfg.stats_dir()))
        log << "stats: wrote " << name << "\n";
}

void stage_split(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    for (const auto& entry : selected_datasets(cfg, filter)) {
        DatasetManifest m = load_stage_manifest(cfg, entry, "final");
        const auto folds = make_folds(m, cfg.training.fold_count, cfg.seed);
        if (filter.dry_run) {
            log << "[dry-run] split " << entry.name << " into " << folds.size()
                << " folds\n";
            continue;
        }
        save_folds(cfg.folds_path(entry.name), folds);
        log << "split " << entry.name << ": " << folds.size() << " folds\n";
    }
}

namespace {

struct TrainCell {
    DatasetEntry entry;
    std::string architecture;
    int fold_index;
};

std::vector<TrainCell> training_cells(const RunConfig& cfg, const StageFilter& filter) {
    std::vector<TrainCell> cells;
    for (const auto& entry : selected_datasets(cfg, filter)) {
        for (const auto& arch : selected_architectures(cfg, filter)) {
            for (int f = 0; f < cfg.training.fold_count; ++f) {
                if (filter.fold && *filter.fold != f) continue;
                cells.push_back({entry, arch, f});
            }
        }
    }
    return cells;
}

}  // namespace

void stage_train(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    const auto cells = training_cells(cfg, filter);
    if (filter.dry_run) {
        for (const auto& c : cells)
            log << "[dry-run] train " << c.architecture << "/" << c.entry.name << "/fold"
                << c.fold_index << "\n";
        return;
    }

    std::map<std::string, DatasetManifest> manifests;
    std::map<std::string, std::vector<FoldSplit>> folds;
    for (const auto& entry : selected_datasets(cfg, filter)) {
        manifests[entry.name] = load_stage_manifest(cfg, entry, "final");
        folds[entry.name] = load_folds(cfg.folds_path(entry.name));
    }

    std::mutex log_mutex;
    run_parallel(cells.size(), filter.jobs, [&](std::size_t i) {
        const TrainCell& c = cells[i];
        TrainingConfig tc = cfg.training;
        tc.architecture_id = c.architecture;
        const auto& fold = folds.at(c.entry.name).at(static_cast<std::size_t>(c.fold_index));
        const TrainedModelHandle handle =
            train_model(c.architecture, manifests.at(c.entry.name), fold, tc,
                        cfg.processed_root(), cfg.models_root());
        std::lock_guard<std::mutex> lock(log_mutex);
        log << "train " << handle.model_id << ": epochs=" << handle.epochs_run
            << " val_acc=" << format_fixed(handle.best_val_accuracy, 4) << "\n";
    });
}

void stage_evaluate(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    const auto cells = training_cells(cfg, filter);
    std::vector<DatasetEntry> test_sets = selected_datasets(cfg, {});  // always all datasets

    if (filter.dry_run) {
        for (const auto& c : cells)
            for (const auto& t : test_sets)
                log << "[dry-run] evaluate " << c.architecture << "/" << c.entry.name
                    << "/fold" << c.fold_index << " on " << t.name << "\n";
        return;
    }

    std::map<std::string, DatasetManifest> manifests;
    for (const auto& t : test_sets)
        manifests[t.name] = load_manifest(cfg.manifest_path(t.name, "final"), t.provenance);

    struct Job {
        TrainCell cell;
        std::string test;
    };
    std::vector<Job> jobs;
    for (const auto& c : cells)
        for (const auto& t : test_sets) jobs.push_back({c, t.name});

    std::mutex rows_mutex;
    std::vector<EvalRow> rows;
    run_parallel(jobs.size(), filter.jobs, [&](std::size_t i) {
        const Job& job = jobs[i];
        const fs::path artifact = cfg.models_root() / job.cell.entry.name /
                                  job.cell.architecture /
                                  ("fold" + std::to_string(job.cell.fold_index));
        const TrainedModelHandle handle = load_handle(artifact);
        TrainedClassifier classifier(artifact);
        EvalKey key{handle.model_id, handle.architecture_id, handle.train_dataset,
                    handle.fold_index};
        const auto result = evaluate_model(classifier, key, manifests.at(job.test),
                                           cfg.processed_root());
        EvalRow row = result ? row_from_result(*result) : skip_row(key, job.test);
        std::lock_guard<std::mutex> lock(rows_mutex);
        rows.push_back(std::move(row));
    });

    save_results_csv(cfg.results_path(), rows);
    log << "evaluate: " << jobs.size() << " evaluations -> " << cfg.results_path() << "\n";
}

void stage_metrics(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    if (filter.dry_run) {
        log << "[dry-run] metrics from " << cfg.results_path() << "\n";
        return;
    }
    const auto rows = load_results_csv(cfg.results_path());
    const PerformanceTensor tensor = build_performance_tensor(rows);
    const SimilarityReport report = build_similarity_report(tensor);
    for (const auto& name : write_similarity_csv(report, cfg.metrics_dir()))
        log << "metrics: wrote " << name << "\n";
}

void stage_report(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    if (filter.dry_run) {
        log << "[dry-run] report into " << cfg.figures_dir() << "\n";
        return;
    }
    std::optional<StatisticsBundle> stats;
    {
        std::vector<DatasetManifest> manifests;
        for (const auto& entry : selected_datasets(cfg, filter)) {
            const auto path = cfg.manifest_path(entry.name, "final");
            if (fs::exists(path)) manifests.push_back(load_manifest(path, entry.provenance));
        }
        if (!manifests.empty()) stats = compute_statistics(manifests);
    }
    std::optional<SimilarityReport> report;
    if (fs::exists(cfg.results_path())) {
        report = build_similarity_report(
            build_performance_tensor(load_results_csv(cfg.results_path())));
    }

    const FigureOutput out = render_figures(stats ? &*stats : nullptr,
                                            report ? &*report : nullptr,
                                            cfg.figures_dir());
    for (const auto& name : out.written) log << "report: wrote " << name << "\n";
    for (const auto& notice : out.notices) log << "report: " << notice << "\n";
}

void run_all_stages(const RunConfig& cfg, const StageFilter& filter, std::ostream& log) {
    stage_ingest(cfg, filter, log);
    stage_sample_frames(cfg, filter, log);
    stage_unify_classes(cfg, filter, log);
    stage_annotate(cfg, filter, log);
    stage_age_groups(cfg, filter, log);
    stage_exclude(cfg, filter, log);
    stage_preprocess(cfg, filter, log);
    stage_stats(cfg, filter, log);
    stage_split(cfg, filter, log);
    stage_train(cfg, filter, log);
    stage_evaluate(cfg, filter, log);
    stage_metrics(cfg, filter, log);
    stage_report(cfg, filter, log);
}

}  // namespace ferbench
