#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ferbench/annotate/contracts.hpp"

namespace ferbench {

// File protocol for out-of-process estimators. Requests carry one image path
// plus face box per line; responses carry eyes, yaw/pitch/roll, age, gender
// and confidences, tab-separated, absent values as empty fields.

struct BatchRequest {
    std::string sample_id;
    std::filesystem::path image_path;
    PixelBox bbox;
};

struct BatchResponse {
    std::string sample_id;
    std::optional<LandmarkEstimate> landmarks;
    std::optional<AgeGenderEstimate> age_gender;
};

std::string serialize_batch_requests(const std::vector<BatchRequest>& requests);
std::vector<BatchRequest> parse_batch_requests(const std::string& text);

std::string serialize_batch_responses(const std::vector<BatchResponse>& responses);
std::vector<BatchResponse> parse_batch_responses(const std::string& text);

// Answers a request batch with the landmark and age/gender adapters; the
// stub-annotate CLI serves the protocol through this.
std::vector<BatchResponse> run_adapters_on_batch(
    const AdapterSet& adapters, const std::vector<BatchRequest>& requests);

// Runs `command <request_file> <response_file>` and parses the result.
// Nonzero exit or an unreadable response is an AnnotationError.
std::vector<BatchResponse> run_batch_command(
    const std::string& command, const std::vector<BatchRequest>& requests,
    const std::filesystem::path& work_dir);

}  // namespace ferbench
