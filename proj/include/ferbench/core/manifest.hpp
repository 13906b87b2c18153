#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "ferbench/core/sample.hpp"

namespace ferbench {

// A named, ordered collection of sample records. The class set is always
// recomputed from the non-excluded samples, never cached.
struct DatasetManifest {
    std::string name;
    Provenance provenance = Provenance::lab_controlled;
    std::vector<SampleRecord> samples;

    std::set<ExpressionLabel> class_set() const;
    std::size_t non_excluded_count() const;

    bool operator==(const DatasetManifest&) const = default;
};

// Manifest file format: one record per line, UTF-8. Provenance is carried by
// the run configuration, not the file, so the caller supplies it on load.
std::string serialize_manifest(const DatasetManifest& manifest);
DatasetManifest parse_manifest(const std::string& text, Provenance provenance);
DatasetManifest load_manifest(const std::filesystem::path& path, Provenance provenance);
void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

struct Violation {
    std::string sample_id;  // empty for manifest-level violations
    std::string rule;
    std::string detail;
};

// Checks every record and manifest invariant. `media_root`, when given,
// enables the bbox-inside-image check for records whose media file exists.
std::vector<Violation> validate_manifest(
    const DatasetManifest& manifest,
    const std::filesystem::path& media_root = {});

}  // namespace ferbench
