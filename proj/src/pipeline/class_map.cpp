#include "ferbench/pipeline/class_map.hpp"

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

void ClassMap::add(const std::string& raw_label, const std::string& dataset,
                   ExpressionLabel label) {
    entries_[{to_lower(trim(raw_label)), dataset}] = label;
}

UnifiedClass ClassMap::unify(const std::string& label_raw,
                             const std::string& dataset) const {
    const std::string key = to_lower(trim(label_raw));
    auto it = entries_.find({key, dataset});
    if (it == entries_.end()) it = entries_.find({key, "*"});
    if (it == entries_.end()) return Unmapped{key};
    return it->second;
}

ClassMap ClassMap::builtin() {
    ClassMap m;
    for (ExpressionLabel l : all_expression_labels()) m.add(to_string(l), "*", l);

    // Cross-dataset label merges.
    m.add("arrabbiato", "FEGA", ExpressionLabel::anger);
    m.add("annoyed", "Lifespan", ExpressionLabel::anger);
    m.add("grumpy", "Lifespan", ExpressionLabel::anger);
    m.add("disgusto", "FEGA", ExpressionLabel::disgust);
    m.add("afraid", "DDCF", ExpressionLabel::fear);
    m.add("afraid", "NIMH-ChEFS", ExpressionLabel::fear);
    m.add("afraid", "KDEF", ExpressionLabel::fear);
    m.add("fearful", "RaFD", ExpressionLabel::fear);
    m.add("paura", "FEGA", ExpressionLabel::fear);
    m.add("joy", "WSEFEP", ExpressionLabel::happiness);
    m.add("allegria", "FEGA", ExpressionLabel::happiness);
    m.add("amusement", "BioVidEmo", ExpressionLabel::happiness);
    m.add("tristezza", "FEGA", ExpressionLabel::sadness);
    m.add("sorpresa", "FEGA", ExpressionLabel::surprise);
    m.add("neutra", "FEGA", ExpressionLabel::neutral);
    m.add("profile", "Lifespan", ExpressionLabel::neutral);
    return m;
}

ClassMap ClassMap::load_csv(const std::filesystem::path& path) {
    ClassMap m;
    const auto lines = io::read_lines(path);
    if (lines.empty()) throw InputError("class map is empty: " + path.string());
    for (std::size_t i = 1; i < lines.size(); ++i) {  // skip header
        if (trim(lines[i]).empty()) continue;
        const auto fields = io::csv_parse_row(lines[i]);
        if (fields.size() != 3)
            throw InputError("class map line " + std::to_string(i + 1) +
                             ": expected raw_label,dataset,canonical_label");
        const auto label = expression_label_from_string(trim(fields[2]));
        if (!label)
            throw InputError("class map line " + std::to_string(i + 1) +
                             ": unknown canonical label '" + fields[2] + "'");
        m.add(fields[0], trim(fields[1]), *label);
    }
    return m;
}

void ClassMap::save_csv(const std::filesystem::path& path) const {
    std::string out = io::csv_row({"raw_label", "dataset", "canonical_label"});
    for (const auto& [key, label] : entries_) {
        out += io::csv_row({key.first, key.second, to_string(label)});
    }
    io::atomic_write(path, out);
}

}  // namespace ferbench
