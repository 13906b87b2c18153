#include "ferbench/core/statistics.hpp"

#include <cmath>
#include <set>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

StatisticsBundle compute_statistics(const std::vector<DatasetManifest>& manifests) {
    if (manifests.empty()) throw ContractError("compute_statistics: no manifests given");

    StatisticsBundle b;
    for (const auto& m : manifests) {
        std::size_t count = 0;
        std::set<std::string> users;
        std::size_t user_labeled = 0;
        std::map<Gender, std::size_t> gender_counts;
        std::map<AgeGroup, std::size_t> group_counts;
        std::map<ExpressionLabel, std::size_t> class_counts;

        for (const auto& s : m.samples) {
            if (s.excluded) continue;
            ++count;
            if (s.user_id) {
                users.insert(*s.user_id);
                ++user_labeled;
            }
            if (s.age_years)
                ++b.age_histogram[static_cast<std::int64_t>(std::floor(*s.age_years))];
            if (s.gender) ++gender_counts[*s.gender];
            if (s.age_group) ++group_counts[*s.age_group];
            if (s.label) ++class_counts[*s.label];
        }

        b.image_count_per_dataset[m.name] = count;
        if (!users.empty()) {
            b.user_count_per_dataset[m.name] = users.size();
            b.images_per_user[m.name] =
                static_cast<double>(user_labeled) / static_cast<double>(users.size());
        }
        auto to_fractions = [](const auto& counts) {
            std::map<typename std::decay_t<decltype(counts)>::key_type, double> out;
            double total = 0;
            for (const auto& [k, n] : counts) total += static_cast<double>(n);
            for (const auto& [k, n] : counts) out[k] = static_cast<double>(n) / total;
            return out;
        };
        if (!gender_counts.empty()) b.gender_distribution[m.name] = to_fractions(gender_counts);
        if (!group_counts.empty()) b.age_group_distribution[m.name] = to_fractions(group_counts);
        if (!class_counts.empty()) b.class_distribution[m.name] = to_fractions(class_counts);
    }
    return b;
}

namespace {

template <typename Map, typename Fmt>
void write_simple(const std::filesystem::path& dir, const std::string& name,
                  const std::string& key_header, const std::string& value_header,
                  const Map& map, Fmt fmt_key, std::vector<std::string>& written) {
    std::string out = io::csv_row({key_header, value_header});
    for (const auto& [k, v] : map) {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>) {
            out += io::csv_row({fmt_key(k), ferbench::format_double(v)});
        } else {
            out += io::csv_row({fmt_key(k), std::to_string(v)});
        }
    }
    io::atomic_write(dir / name, out);
    written.push_back(name);
}

template <typename Cat>
void write_distribution(const std::filesystem::path& dir, const std::string& name,
                        const std::vector<Cat>& categories,
                        const std::map<std::string, std::map<Cat, double>>& map,
                        std::vector<std::string>& written) {
    std::vector<std::string> header = {"dataset"};
    for (Cat c : categories) header.push_back(to_string(c));
    std::string out = io::csv_row(header);
    for (const auto& [dataset, dist] : map) {
        std::vector<std::string> row = {dataset};
        for (Cat c : categories) {
            auto it = dist.find(c);
            row.push_back(format_double(it == dist.end() ? 0.0 : it->second));
        }
        out += io::csv_row(row);
    }
    io::atomic_write(dir / name, out);
    written.push_back(name);
}

}  // namespace

std::vector<std::string> export_statistics_csv(const StatisticsBundle& stats,
                                               const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;
    auto id = [](const std::string& s) { return s; };

    write_simple(out_dir, "image_counts.csv", "dataset", "image_count",
                 stats.image_count_per_dataset, id, written);
    write_simple(out_dir, "user_counts.csv", "dataset", "user_count",
                 stats.user_count_per_dataset, id, written);
    write_simple(out_dir, "images_per_user.csv", "dataset", "images_per_user",
                 stats.images_per_user, id, written);
    write_simple(out_dir, "age_histogram.csv", "age_years", "count",
                 stats.age_histogram,
                 [](std::int64_t y) { return std::to_string(y); }, written);

    write_distribution(out_dir, "gender_distribution.csv",
                       std::vector<Gender>{Gender::male, Gender::female},
                       stats.gender_distribution, written);
    write_distribution(out_dir, "age_group_distribution.csv",
                       std::vector<AgeGroup>{AgeGroup::child, AgeGroup::adult,
                                             AgeGroup::elderly},
                       stats.age_group_distribution, written);
    {
        std::vector<ExpressionLabel> cats(all_expression_labels().begin(),
                                          all_expression_labels().end());
        write_distribution(out_dir, "class_distribution.csv", cats,
                           stats.class_distribution, written);
    }
    return written;
}

}  // namespace ferbench
