#include "ferbench/train/folds.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/rng.hpp"

namespace ferbench {

using nlohmann::json;

std::vector<FoldSplit> make_folds(const DatasetManifest& manifest, int fold_count,
                                  std::uint64_t seed) {
    if (fold_count < 2) throw ContractError("make_folds: fold_count must be >= 2");

    std::vector<const SampleRecord*> usable;
    for (const auto& s : manifest.samples)
        if (!s.excluded) usable.push_back(&s);
    if (usable.size() < static_cast<std::size_t>(fold_count))
        throw FoldError("dataset '" + manifest.name + "' has " +
                        std::to_string(usable.size()) + " usable samples, fewer than " +
                        std::to_string(fold_count) + " folds");

    std::size_t with_user = 0;
    for (const auto* s : usable)
        if (s->user_id) ++with_user;
    const bool subject_disjoint =
        with_user * 10 >= usable.size() * 9;  // coverage >= 90%

    Rng rng(hash_combine(seed, manifest.name + "/" + std::to_string(fold_count)));
    std::vector<std::set<std::string>> val(static_cast<std::size_t>(fold_count));

    if (subject_disjoint) {
        // Group by user; samples without one become singleton groups.
        std::map<std::string, std::vector<std::string>> groups;
        for (const auto* s : usable) {
            const std::string key =
                s->user_id ? ("u:" + *s->user_id) : ("s:" + s->sample_id);
            groups[key].push_back(s->sample_id);
        }
        for (const auto& [key, ids] : groups) {
            if (ids.size() * fold_count > usable.size() * (fold_count - 1)) {
                throw FoldError("dataset '" + manifest.name + "': user group '" + key +
                                "' holds " + std::to_string(ids.size()) + " of " +
                                std::to_string(usable.size()) +
                                " samples; subject-disjoint folds impossible");
            }
        }
        // Largest group first into the currently smallest fold; ties resolved
        // by seeded shuffle among equal sizes, then fold index.
        std::vector<std::pair<std::string, std::vector<std::string>>> ordered(
            groups.begin(), groups.end());
        rng.shuffle(ordered);
        std::stable_sort(ordered.begin(), ordered.end(),
                         [](const auto& a, const auto& b) {
                             return a.second.size() > b.second.size();
                         });
        std::vector<std::size_t> sizes(val.size(), 0);
        for (const auto& [key, ids] : ordered) {
            std::size_t pick = 0;
            for (std::size_t f = 1; f < sizes.size(); ++f)
                if (sizes[f] < sizes[pick]) pick = f;
            for (const auto& id : ids) val[pick].insert(id);
            sizes[pick] += ids.size();
        }
    } else {
        // Stratified by class, round-robin over a seeded shuffle per stratum.
        std::map<std::string, std::vector<std::string>> strata;
        for (const auto* s : usable) {
            const std::string key = s->label ? to_string(*s->label) : std::string("?");
            strata[key].push_back(s->sample_id);
        }
        std::size_t next_fold = 0;
        for (auto& [key, ids] : strata) {
            std::sort(ids.begin(), ids.end());
            rng.shuffle(ids);
            for (const auto& id : ids) {
                val[next_fold % val.size()].insert(id);
                ++next_fold;
            }
        }
    }

    std::vector<FoldSplit> folds;
    for (int f = 0; f < fold_count; ++f) {
        FoldSplit split;
        split.fold_index = f;
        split.val_ids = val[static_cast<std::size_t>(f)];
        for (const auto* s : usable)
            if (!split.val_ids.count(s->sample_id)) split.train_ids.insert(s->sample_id);
        folds.push_back(std::move(split));
    }
    return folds;
}

std::string serialize_folds(const std::vector<FoldSplit>& folds) {
    json out = json::array();
    for (const auto& f : folds) {
        json j;
        j["fold_index"] = f.fold_index;
        j["train_ids"] = std::vector<std::string>(f.train_ids.begin(), f.train_ids.end());
        j["val_ids"] = std::vector<std::string>(f.val_ids.begin(), f.val_ids.end());
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

std::vector<FoldSplit> parse_folds(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("folds file: ") + e.what());
    }
    std::vector<FoldSplit> out;
    for (const auto& item : j) {
        FoldSplit f;
        f.fold_index = item.at("fold_index").get<int>();
        for (const auto& id : item.at("train_ids")) f.train_ids.insert(id.get<std::string>());
        for (const auto& id : item.at("val_ids")) f.val_ids.insert(id.get<std::string>());
        out.push_back(std::move(f));
    }
    return out;
}

void save_folds(const std::filesystem::path& path, const std::vector<FoldSplit>& folds) {
    io::atomic_write(path, serialize_folds(folds));
}

std::vector<FoldSplit> load_folds(const std::filesystem::path& path) {
    return parse_folds(io::read_text(path));
}

}  // namespace ferbench
