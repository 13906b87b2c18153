#include "ferbench/cli/runconfig.hpp"

#include <json.hpp>

#include <cstdlib>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/train/network.hpp"

namespace ferbench {

using nlohmann::json;

std::filesystem::path RunConfig::manifest_path(const std::string& dataset,
                                               const std::string& stage) const {
    return output_root / "manifests" / (dataset + "." + stage + ".jsonl");
}

std::filesystem::path RunConfig::annotations_path(const std::string& dataset) const {
    return output_root / "annotations" / (dataset + ".jsonl");
}

std::filesystem::path RunConfig::folds_path(const std::string& dataset) const {
    return output_root / "folds" / (dataset + ".json");
}

std::filesystem::path RunConfig::processed_root() const { return output_root / "processed"; }
std::filesystem::path RunConfig::models_root() const { return output_root / "models"; }
std::filesystem::path RunConfig::stats_dir() const { return output_root / "stats"; }
std::filesystem::path RunConfig::results_path() const {
    return output_root / "results" / "results.csv";
}
std::filesystem::path RunConfig::metrics_dir() const { return output_root / "metrics"; }
std::filesystem::path RunConfig::figures_dir() const { return output_root / "figures"; }

RunConfig load_run_config(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(io::read_text(path));
    } catch (const json::exception& e) {
        throw InputError("config " + path.string() + ": " + e.what());
    }

    RunConfig cfg;
    const auto base = path.has_parent_path() ? path.parent_path()
                                             : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) -> std::filesystem::path {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    try {
        cfg.output_root = resolve(j.at("output_root").get<std::string>());
        cfg.seed = j.value("seed", 0ull);
        if (j.contains("class_map")) cfg.class_map_path = resolve(j["class_map"].get<std::string>());
        for (const auto& [name, d] : j.at("datasets").items()) {
            DatasetEntry entry;
            entry.name = name;
            entry.root = resolve(d.at("root").get<std::string>());
            entry.layout = d.at("layout").get<std::string>();
            if (d.contains("provenance")) {
                auto p = provenance_from_string(d["provenance"].get<std::string>());
                if (!p) throw InputError("config: bad provenance for dataset '" + name + "'");
                entry.provenance = *p;
            }
            if (d.contains("sampling")) {
                auto s = sampling_kind_from_string(d["sampling"].get<std::string>());
                if (!s) throw InputError("config: bad sampling for dataset '" + name + "'");
                entry.sampling = *s;
            }
            cfg.datasets[name] = std::move(entry);
        }
        if (j.contains("adapters")) {
            cfg.adapters.mode = j["adapters"].value("mode", std::string("stub"));
            cfg.adapters.command = j["adapters"].value("command", std::string());
        }
        if (j.contains("training")) {
            const auto& t = j["training"];
            cfg.training.max_epochs = t.value("max_epochs", cfg.training.max_epochs);
            cfg.training.early_stop_min_delta =
                t.value("early_stop_min_delta", cfg.training.early_stop_min_delta);
            cfg.training.early_stop_patience =
                t.value("early_stop_patience", cfg.training.early_stop_patience);
            cfg.training.fold_count = t.value("fold_count", cfg.training.fold_count);
            cfg.training.optimizer = t.value("optimizer", cfg.training.optimizer);
            cfg.training.batch_size = t.value("batch_size", cfg.training.batch_size);
            cfg.training.learning_rate = t.value("learning_rate", cfg.training.learning_rate);
            cfg.training.momentum = t.value("momentum", cfg.training.momentum);
            cfg.training.pretrained_init =
                t.value("pretrained_init", cfg.training.pretrained_init);
            if (t.contains("initial_weights"))
                cfg.training.initial_weights = resolve(t["initial_weights"].get<std::string>());
            if (t.contains("augmentation")) {
                const auto& a = t["augmentation"];
                auto& aug = cfg.training.augmentation;
                aug.horizontal_flip = a.value("horizontal_flip", aug.horizontal_flip);
                aug.flip_prob = a.value("flip_prob", aug.flip_prob);
                aug.rotation_deg = a.value("rotation_deg", aug.rotation_deg);
                aug.translation_frac = a.value("translation_frac", aug.translation_frac);
                aug.scale_min = a.value("scale_min", aug.scale_min);
                aug.scale_max = a.value("scale_max", aug.scale_max);
                aug.brightness = a.value("brightness", aug.brightness);
                aug.contrast = a.value("contrast", aug.contrast);
            }
        }
        cfg.architectures = j.value("architectures", std::vector<std::string>{"tiny"});
        cfg.jobs = j.value("jobs", 1);
    } catch (const json::exception& e) {
        throw InputError("config " + path.string() + ": " + e.what());
    }

    if (const char* env = std::getenv("FERBENCH_OUT")) cfg.output_root = env;

    if (cfg.datasets.empty()) throw InputError("config: no datasets declared");
    for (const auto& [name, d] : cfg.datasets) {
        if (!std::filesystem::exists(d.root))
            throw InputError("config: dataset root does not exist: " + d.root.string());
    }
    if (cfg.class_map_path && !std::filesystem::exists(*cfg.class_map_path))
        throw InputError("config: class map does not exist: " + cfg.class_map_path->string());
    if (cfg.adapters.mode != "stub" && cfg.adapters.mode != "command")
        throw InputError("config: adapters.mode must be 'stub' or 'command'");
    if (cfg.adapters.mode == "command" && cfg.adapters.command.empty())
        throw InputError("config: adapters.mode=command requires adapters.command");
    for (const auto& arch : cfg.architectures)
        ArchitectureRegistry::instance().get(arch);  // throws for unknown ids
    cfg.training.seed = cfg.seed;
    validate(cfg.training);
    return cfg;
}

void save_run_config(const RunConfig& config, const std::filesystem::path& path) {
    json j;
    j["output_root"] = config.output_root.string();
    j["seed"] = config.seed;
    if (config.class_map_path) j["class_map"] = config.class_map_path->string();
    json datasets = json::object();
    for (const auto& [name, d] : config.datasets) {
        datasets[name] = {{"root", d.root.string()},
                          {"layout", d.layout},
                          {"provenance", to_string(d.provenance)},
                          {"sampling", to_string(d.sampling)}};
    }
    j["datasets"] = datasets;
    j["adapters"] = {{"mode", config.adapters.mode}};
    if (!config.adapters.command.empty()) j["adapters"]["command"] = config.adapters.command;
    j["architectures"] = config.architectures;
    j["training"] = {
        {"max_epochs", config.training.max_epochs},
        {"early_stop_min_delta", config.training.early_stop_min_delta},
        {"early_stop_patience", config.training.early_stop_patience},
        {"fold_count", config.training.fold_count},
        {"optimizer", config.training.optimizer},
        {"batch_size", config.training.batch_size},
        {"learning_rate", config.training.learning_rate},
        {"momentum", config.training.momentum},
        {"pretrained_init", config.training.pretrained_init},
    };
    j["jobs"] = config.jobs;
    io::atomic_write(path, j.dump(2) + "\n");
}

}  // namespace ferbench
