#include "ferbench/core/manifest.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"
#include "ferbench/io/image.hpp"

namespace ferbench {

std::set<ExpressionLabel> DatasetManifest::class_set() const {
    std::set<ExpressionLabel> out;
    for (const auto& s : samples)
        if (!s.excluded && s.label) out.insert(*s.label);
    return out;
}

std::size_t DatasetManifest::non_excluded_count() const {
    std::size_t n = 0;
    for (const auto& s : samples)
        if (!s.excluded) ++n;
    return n;
}

std::string serialize_manifest(const DatasetManifest& manifest) {
    std::string out;
    for (const auto& s : manifest.samples) {
        out += serialize_record(s);
        out += '\n';
    }
    return out;
}

DatasetManifest parse_manifest(const std::string& text, Provenance provenance) {
    DatasetManifest m;
    m.provenance = provenance;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        SampleRecord rec;
        try {
            rec = parse_record(line);
        } catch (const InputError& e) {
            throw InputError("manifest line " + std::to_string(lineno) + ": " + e.what());
        }
        if (m.name.empty()) {
            m.name = rec.dataset;
        } else if (rec.dataset != m.name) {
            throw InputError("manifest line " + std::to_string(lineno) +
                             ": mixed dataset names '" + m.name + "' and '" +
                             rec.dataset + "'");
        }
        m.samples.push_back(std::move(rec));
    }
    return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path, Provenance provenance) {
    return parse_manifest(io::read_text(path), provenance);
}

void save_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
    io::atomic_write(path, serialize_manifest(manifest));
}

std::vector<Violation> validate_manifest(const DatasetManifest& manifest,
                                         const std::filesystem::path& media_root) {
    std::vector<Violation> out;
    std::map<std::string, std::size_t> id_count;

    for (const auto& s : manifest.samples) {
        ++id_count[s.sample_id];

        if (s.excluded != s.exclusion_reason.has_value()) {
            out.push_back({s.sample_id, "exclusion_reason",
                           s.excluded ? "excluded record lacks exclusion_reason"
                                      : "non-excluded record carries exclusion_reason"});
        }
        if (s.media_type == MediaType::image && s.frame_index) {
            out.push_back({s.sample_id, "frame_index",
                           "still image carries a frame_index"});
        }
        if (s.media_type == MediaType::video && !s.frame_index) {
            out.push_back({s.sample_id, "frame_index",
                           "video frame record lacks frame_index"});
        }
        if (s.frame_index && *s.frame_index < 0) {
            out.push_back({s.sample_id, "frame_index", "frame_index is negative"});
        }
        if (s.age_years && s.age_group &&
            age_group_for_years(*s.age_years) != *s.age_group) {
            out.push_back({s.sample_id, "age_group",
                           "age_group '" + to_string(*s.age_group) +
                               "' inconsistent with age_years " +
                               format_double(*s.age_years)});
        }
        if (s.face_bbox) {
            const auto& b = *s.face_bbox;
            if (b.width <= 0 || b.height <= 0) {
                out.push_back({s.sample_id, "face_bbox", "non-positive bbox size"});
            } else if (b.x < 0 || b.y < 0) {
                out.push_back({s.sample_id, "face_bbox", "bbox origin outside image"});
            } else if (!media_root.empty()) {
                const auto media = media_root / s.media_path;
                std::error_code ec;
                if (std::filesystem::exists(media, ec)) {
                    try {
                        const auto hdr = io::read_png_header(media);
                        if (b.x + b.width > hdr.width || b.y + b.height > hdr.height) {
                            out.push_back({s.sample_id, "face_bbox",
                                           "bbox exceeds image bounds"});
                        }
                    } catch (const InputError&) {
                        // Non-PNG media: bounds check not applicable here.
                    }
                }
            }
        }
    }

    for (const auto& [id, n] : id_count) {
        if (n > 1) {
            out.push_back({id, "sample_id",
                           "duplicated " + std::to_string(n) + " times"});
        }
    }
    return out;
}

}  // namespace ferbench
