#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "ferbench/core/label.hpp"

namespace ferbench {

// Result of class unification: a canonical label, or the (trimmed,
// case-folded) original string when no mapping exists.
struct Unmapped {
    std::string original;
    bool operator==(const Unmapped&) const = default;
};
using UnifiedClass = std::variant<ExpressionLabel, Unmapped>;

// Maps (raw label, dataset) to canonical labels. Dataset "*" is a wildcard;
// exact dataset entries win over wildcards. Lookups case-fold and trim the
// raw label first.
class ClassMap {
public:
    void add(const std::string& raw_label, const std::string& dataset,
             ExpressionLabel label);

    UnifiedClass unify(const std::string& label_raw, const std::string& dataset) const;

    std::size_t size() const { return entries_.size(); }

    // The built-in table: identity mappings for the seven canonical names
    // plus every cross-dataset merge the pipeline ships with.
    static ClassMap builtin();

    // Editable table with columns raw_label, dataset, canonical_label.
    static ClassMap load_csv(const std::filesystem::path& path);
    void save_csv(const std::filesystem::path& path) const;

private:
    // key: (folded raw label, dataset or "*")
    std::map<std::pair<std::string, std::string>, ExpressionLabel> entries_;
};

}  // namespace ferbench
