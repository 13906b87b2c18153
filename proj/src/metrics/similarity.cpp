#include "ferbench/metrics/similarity.hpp"

#include <algorithm>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

std::optional<CrossSimilarity> cross_similarity(const PerformanceTensor& tensor,
                                                const std::string& d_train,
                                                const std::string& d_test) {
    double sum = 0;
    int count = 0;
    for (const auto& arch : tensor.architectures()) {
        if (auto v = tensor.score(arch, d_train, d_test)) {
            sum += *v;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return CrossSimilarity{sum / count, count};
}

std::optional<double> local_similarity(const PerformanceTensor& tensor,
                                       const std::string& dataset) {
    auto cs = cross_similarity(tensor, dataset, dataset);
    if (!cs) return std::nullopt;
    return cs->value;
}

std::optional<double> global_similarity(const PerformanceTensor& tensor,
                                        const std::string& d_train) {
    double sum = 0;
    int count = 0;
    for (const auto& d_test : tensor.datasets()) {
        if (d_test == d_train) continue;
        if (auto cs = cross_similarity(tensor, d_train, d_test)) {
            sum += cs->value;
            ++count;
        }
    }
    if (count == 0) return std::nullopt;
    return sum / count;
}

std::optional<double> paired_similarity(const PerformanceTensor& tensor,
                                        const std::string& d_train,
                                        const std::string& d_test) {
    auto num = cross_similarity(tensor, d_train, d_test);
    auto den = cross_similarity(tensor, d_test, d_test);
    if (!num || !den || den->value == 0.0) return std::nullopt;
    return num->value / den->value;
}

std::size_t SimilarityReport::dataset_index(const std::string& name) const {
    auto it = std::find(datasets.begin(), datasets.end(), name);
    if (it == datasets.end())
        throw ContractError("similarity report: unknown dataset '" + name + "'");
    return static_cast<std::size_t>(it - datasets.begin());
}

namespace {

// A single-model view of the tensor, so the per-model breakdown reuses the
// aggregate formulas verbatim.
PerformanceTensor restrict_to_model(const PerformanceTensor& tensor,
                                    const std::string& arch) {
    PerformanceTensor out;
    for (const auto& [key, v] : tensor.scores) {
        if (key.architecture != arch) continue;
        out.scores[key] = v;
        out.fold_counts[key] = tensor.fold_counts.at(key);
    }
    for (const auto& key : tensor.missing)
        if (key.architecture == arch) out.missing.push_back(key);
    return out;
}

SimilarityTable build_table(const PerformanceTensor& tensor,
                            const std::vector<std::string>& datasets) {
    const std::size_t n = datasets.size();
    SimilarityTable t;
    t.cs.assign(n, std::vector<std::optional<double>>(n));
    t.ps.assign(n, std::vector<std::optional<double>>(n));
    t.ls.assign(n, std::nullopt);
    t.gs.assign(n, std::nullopt);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (auto cs = cross_similarity(tensor, datasets[i], datasets[j]))
                t.cs[i][j] = cs->value;
            t.ps[i][j] = paired_similarity(tensor, datasets[i], datasets[j]);
        }
        t.ls[i] = local_similarity(tensor, datasets[i]);
        t.gs[i] = global_similarity(tensor, datasets[i]);
    }
    return t;
}

std::string fmt_cell(const std::optional<double>& v) {
    return v ? format_fixed(*v, 4) : std::string();
}

}  // namespace

SimilarityReport build_similarity_report(const PerformanceTensor& tensor) {
    SimilarityReport report;
    report.models = tensor.architectures();
    report.datasets = tensor.datasets();
    if (report.models.empty() || report.datasets.empty())
        throw ContractError("build_similarity_report: empty performance tensor");

    report.aggregate = build_table(tensor, report.datasets);
    for (const auto& arch : report.models)
        report.per_model[arch] = build_table(restrict_to_model(tensor, arch),
                                             report.datasets);

    for (const auto& d_train : report.datasets) {
        for (const auto& d_test : report.datasets) {
            if (!cross_similarity(tensor, d_train, d_test))
                report.missing_pairs.emplace_back(d_train, d_test);
        }
    }
    return report;
}

std::string render_local_global_csv(const std::vector<std::string>& datasets,
                                    const std::vector<std::optional<double>>& ls,
                                    const std::vector<std::optional<double>>& gs) {
    std::string out = io::csv_row({"dataset", "local_similarity", "global_similarity"});
    for (std::size_t i = 0; i < datasets.size(); ++i)
        out += io::csv_row({datasets[i], fmt_cell(ls[i]), fmt_cell(gs[i])});
    return out;
}

namespace {

std::string render_paired_csv(const std::vector<std::string>& datasets,
                              const std::vector<std::vector<std::optional<double>>>& ps) {
    std::vector<std::string> header = {"train_dataset"};
    header.insert(header.end(), datasets.begin(), datasets.end());
    std::string out = io::csv_row(header);
    for (std::size_t i = 0; i < datasets.size(); ++i) {
        std::vector<std::string> row = {datasets[i]};
        for (std::size_t j = 0; j < datasets.size(); ++j) row.push_back(fmt_cell(ps[i][j]));
        out += io::csv_row(row);
    }
    return out;
}

}  // namespace

std::vector<std::string> write_similarity_csv(const SimilarityReport& report,
                                              const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::string> written;

    auto emit = [&](const std::string& name, const std::string& content) {
        io::atomic_write(out_dir / name, content);
        written.push_back(name);
    };

    emit("local_global.csv",
         render_local_global_csv(report.datasets, report.aggregate.ls,
                                 report.aggregate.gs));
    emit("paired_similarity.csv",
         render_paired_csv(report.datasets, report.aggregate.ps));
    for (const auto& [arch, table] : report.per_model) {
        emit("local_global__" + arch + ".csv",
             render_local_global_csv(report.datasets, table.ls, table.gs));
        emit("paired_similarity__" + arch + ".csv",
             render_paired_csv(report.datasets, table.ps));
    }

    if (!report.missing_pairs.empty()) {
        std::string out = io::csv_row({"train_dataset", "test_dataset"});
        for (const auto& [train, test] : report.missing_pairs)
            out += io::csv_row({train, test});
        emit("missing_pairs.csv", out);
    }
    return written;
}

}  // namespace ferbench
