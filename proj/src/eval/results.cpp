#include "ferbench/eval/results.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <tuple>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

namespace {

const std::vector<std::string> kHeader = {
    "model_id",     "architecture_id", "train_dataset", "fold_index",
    "test_dataset", "n_test",          "classes_used",  "macro_f1",
    "per_class_f1"};

std::string join_classes(const std::vector<ExpressionLabel>& classes) {
    std::string out;
    for (ExpressionLabel l : classes) {
        if (!out.empty()) out += ';';
        out += to_string(l);
    }
    return out;
}

std::string join_per_class(const std::map<ExpressionLabel, double>& f1) {
    std::string out;
    for (const auto& [label, v] : f1) {
        if (!out.empty()) out += ';';
        out += to_string(label) + "=" + format_double(v);
    }
    return out;
}

auto row_key(const EvalRow& r) {
    return std::tie(r.architecture_id, r.train_dataset, r.fold_index, r.test_dataset);
}

}  // namespace

EvalRow row_from_result(const EvalResult& result) {
    EvalRow row;
    row.model_id = result.model_id;
    row.architecture_id = result.architecture_id;
    row.train_dataset = result.train_dataset;
    row.fold_index = result.fold_index;
    row.test_dataset = result.test_dataset;
    row.n_test = result.n_test;
    row.classes_used = result.classes_used;
    row.macro_f1 = result.macro_f1;
    row.per_class_f1 = result.per_class_f1;
    return row;
}

EvalRow skip_row(const EvalKey& key, const std::string& test_dataset) {
    EvalRow row;
    row.model_id = key.model_id;
    row.architecture_id = key.architecture_id;
    row.train_dataset = key.train_dataset;
    row.fold_index = key.fold_index;
    row.test_dataset = test_dataset;
    return row;
}

std::string serialize_results_csv(std::vector<EvalRow> rows) {
    std::sort(rows.begin(), rows.end(),
              [](const EvalRow& a, const EvalRow& b) { return row_key(a) < row_key(b); });
    std::string out = io::csv_row(kHeader);
    for (const auto& r : rows) {
        out += io::csv_row({r.model_id, r.architecture_id, r.train_dataset,
                            std::to_string(r.fold_index), r.test_dataset,
                            std::to_string(r.n_test), join_classes(r.classes_used),
                            r.macro_f1 ? format_double(*r.macro_f1) : std::string(),
                            join_per_class(r.per_class_f1)});
    }
    return out;
}

std::vector<EvalRow> parse_results_csv(const std::string& text) {
    std::vector<EvalRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1) continue;  // header
        const auto f = io::csv_parse_row(line);
        if (f.size() != kHeader.size())
            throw InputError("results csv line " + std::to_string(lineno) +
                             ": expected " + std::to_string(kHeader.size()) + " fields");
        EvalRow r;
        r.model_id = f[0];
        r.architecture_id = f[1];
        r.train_dataset = f[2];
        r.fold_index = std::stoi(f[3]);
        r.test_dataset = f[4];
        r.n_test = static_cast<std::size_t>(std::stoull(f[5]));
        if (!f[6].empty()) {
            for (const auto& name : split(f[6], ';')) {
                auto l = expression_label_from_string(name);
                if (!l)
                    throw InputError("results csv line " + std::to_string(lineno) +
                                     ": bad class '" + name + "'");
                r.classes_used.push_back(*l);
            }
        }
        if (!f[7].empty()) r.macro_f1 = std::stod(f[7]);
        if (!f[8].empty()) {
            for (const auto& pair : split(f[8], ';')) {
                const auto eq = pair.find('=');
                if (eq == std::string::npos)
                    throw InputError("results csv line " + std::to_string(lineno) +
                                     ": bad per-class f1 entry '" + pair + "'");
                auto l = expression_label_from_string(pair.substr(0, eq));
                if (!l)
                    throw InputError("results csv line " + std::to_string(lineno) +
                                     ": bad class '" + pair.substr(0, eq) + "'");
                r.per_class_f1[*l] = std::stod(pair.substr(eq + 1));
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

void save_results_csv(const std::filesystem::path& path, std::vector<EvalRow> rows) {
    io::atomic_write(path, serialize_results_csv(std::move(rows)));
}

std::vector<EvalRow> load_results_csv(const std::filesystem::path& path) {
    return parse_results_csv(io::read_text(path));
}

std::vector<std::string> PerformanceTensor::architectures() const {
    std::set<std::string> set;
    for (const auto& [k, v] : scores) set.insert(k.architecture);
    for (const auto& k : missing) set.insert(k.architecture);
    return {set.begin(), set.end()};
}

std::vector<std::string> PerformanceTensor::datasets() const {
    std::set<std::string> set;
    for (const auto& [k, v] : scores) {
        set.insert(k.train_dataset);
        set.insert(k.test_dataset);
    }
    for (const auto& k : missing) {
        set.insert(k.train_dataset);
        set.insert(k.test_dataset);
    }
    return {set.begin(), set.end()};
}

std::optional<double> PerformanceTensor::score(const std::string& arch,
                                               const std::string& train,
                                               const std::string& test) const {
    auto it = scores.find({arch, train, test});
    if (it == scores.end()) return std::nullopt;
    return it->second;
}

PerformanceTensor build_performance_tensor(const std::vector<EvalRow>& rows) {
    std::set<std::tuple<std::string, std::string, int, std::string>> seen;
    std::map<TensorKey, double> sums;
    std::map<TensorKey, int> counts;
    std::set<TensorKey> skipped_only;

    for (const auto& r : rows) {
        const auto key4 =
            std::make_tuple(r.architecture_id, r.train_dataset, r.fold_index,
                            r.test_dataset);
        if (!seen.insert(key4).second)
            throw IntegrityError("duplicate evaluation row for (" + r.architecture_id +
                                 ", " + r.train_dataset + ", fold " +
                                 std::to_string(r.fold_index) + ", " + r.test_dataset +
                                 ")");
        const TensorKey key{r.architecture_id, r.train_dataset, r.test_dataset};
        if (r.macro_f1) {
            sums[key] += *r.macro_f1;
            counts[key] += 1;
        } else {
            skipped_only.insert(key);
        }
    }

    PerformanceTensor tensor;
    for (const auto& [key, sum] : sums) {
        tensor.scores[key] = sum / counts[key];
        tensor.fold_counts[key] = counts[key];
    }
    for (const auto& key : skipped_only)
        if (!tensor.scores.count(key)) tensor.missing.push_back(key);
    return tensor;
}

}  // namespace ferbench
