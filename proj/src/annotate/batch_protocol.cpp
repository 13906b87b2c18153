#include "ferbench/annotate/batch_protocol.hpp"

#include <cstdlib>
#include <sstream>

#include "ferbench/common.hpp"
#include "ferbench/io/files.hpp"

namespace ferbench {

namespace {

std::string opt_num(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

std::optional<double> parse_opt_num(const std::string& s, const char* what) {
    if (s.empty()) return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string("batch protocol: bad ") + what + " value '" + s + "'");
    }
}

std::vector<std::string> split_fields(const std::string& line, std::size_t expected,
                                      const char* what) {
    auto fields = split(line, '\t');
    if (fields.size() != expected)
        throw InputError(std::string("batch protocol: ") + what + " line has " +
                         std::to_string(fields.size()) + " fields, expected " +
                         std::to_string(expected));
    return fields;
}

}  // namespace

std::string serialize_batch_requests(const std::vector<BatchRequest>& requests) {
    std::string out;
    for (const auto& r : requests) {
        out += r.sample_id;
        out += '\t';
        out += r.image_path.string();
        out += '\t' + format_double(r.bbox.x) + '\t' + format_double(r.bbox.y) +
               '\t' + format_double(r.bbox.width) + '\t' + format_double(r.bbox.height);
        out += '\n';
    }
    return out;
}

std::vector<BatchRequest> parse_batch_requests(const std::string& text) {
    std::vector<BatchRequest> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto f = split_fields(line, 6, "request");
        BatchRequest r;
        r.sample_id = f[0];
        r.image_path = f[1];
        r.bbox = {*parse_opt_num(f[2], "bbox.x"), *parse_opt_num(f[3], "bbox.y"),
                  *parse_opt_num(f[4], "bbox.width"), *parse_opt_num(f[5], "bbox.height")};
        out.push_back(std::move(r));
    }
    return out;
}

std::string serialize_batch_responses(const std::vector<BatchResponse>& responses) {
    std::string out;
    for (const auto& r : responses) {
        std::vector<std::string> f(12);
        f[0] = r.sample_id;
        if (r.landmarks) {
            f[1] = format_double(r.landmarks->eye_left.x);
            f[2] = format_double(r.landmarks->eye_left.y);
            f[3] = format_double(r.landmarks->eye_right.x);
            f[4] = format_double(r.landmarks->eye_right.y);
            f[5] = format_double(r.landmarks->pose.yaw);
            f[6] = format_double(r.landmarks->pose.pitch);
            f[7] = format_double(r.landmarks->pose.roll);
            f[10] = opt_num(r.landmarks->confidence);
        }
        if (r.age_gender) {
            f[8] = format_double(r.age_gender->age_years);
            f[9] = to_string(r.age_gender->gender);
            f[11] = opt_num(r.age_gender->confidence);
        }
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (i) out += '\t';
            out += f[i];
        }
        out += '\n';
    }
    return out;
}

std::vector<BatchResponse> parse_batch_responses(const std::string& text) {
    std::vector<BatchResponse> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = split_fields(line, 12, "response");
        BatchResponse r;
        r.sample_id = f[0];
        if (!f[1].empty()) {
            LandmarkEstimate lm;
            lm.eye_left = {*parse_opt_num(f[1], "eye_left.x"), *parse_opt_num(f[2], "eye_left.y")};
            lm.eye_right = {*parse_opt_num(f[3], "eye_right.x"), *parse_opt_num(f[4], "eye_right.y")};
            lm.pose.yaw = *parse_opt_num(f[5], "yaw");
            lm.pose.pitch = *parse_opt_num(f[6], "pitch");
            lm.pose.roll = *parse_opt_num(f[7], "roll");
            lm.confidence = parse_opt_num(f[10], "pose confidence");
            r.landmarks = lm;
        }
        if (!f[8].empty()) {
            AgeGenderEstimate ag;
            ag.age_years = *parse_opt_num(f[8], "age");
            auto g = gender_from_string(f[9]);
            if (!g) throw InputError("batch protocol: bad gender '" + f[9] + "'");
            ag.gender = *g;
            ag.confidence = parse_opt_num(f[11], "age/gender confidence");
            r.age_gender = ag;
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<BatchResponse> run_adapters_on_batch(
    const AdapterSet& adapters, const std::vector<BatchRequest>& requests) {
    std::vector<BatchResponse> out;
    out.reserve(requests.size());
    for (const auto& req : requests) {
        BatchResponse resp;
        resp.sample_id = req.sample_id;
        if (adapters.landmarks)
            resp.landmarks = adapters.landmarks->estimate_landmarks_and_pose(
                req.sample_id, req.image_path, req.bbox);
        if (adapters.age_gender)
            resp.age_gender = adapters.age_gender->estimate_age_gender(
                req.sample_id, req.image_path, req.bbox);
        out.push_back(std::move(resp));
    }
    return out;
}

std::vector<BatchResponse> run_batch_command(
    const std::string& command, const std::vector<BatchRequest>& requests,
    const std::filesystem::path& work_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(work_dir);
    const fs::path req_path = work_dir / "annotate_request.tsv";
    const fs::path resp_path = work_dir / "annotate_response.tsv";
    io::atomic_write(req_path, serialize_batch_requests(requests));
    std::error_code ec;
    fs::remove(resp_path, ec);

    const std::string cmdline =
        command + " \"" + req_path.string() + "\" \"" + resp_path.string() + "\"";
    const int rc = std::system(cmdline.c_str());
    if (rc != 0)
        throw AnnotationError("annotator command failed (exit " +
                              std::to_string(rc) + "): " + command);
    if (!fs::exists(resp_path))
        throw AnnotationError("annotator command wrote no response file: " + command);

    auto responses = parse_batch_responses(io::read_text(resp_path));
    if (responses.size() != requests.size())
        throw AnnotationError("annotator returned " + std::to_string(responses.size()) +
                              " records for " + std::to_string(requests.size()) +
                              " requests");
    return responses;
}

}  // namespace ferbench
