#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ferbench/core/label.hpp"

namespace ferbench {

// One per-image estimate feeding the per-user fusion; fields may be absent
// when the estimator produced nothing for that image.
struct DemographicObservation {
    std::string sample_id;
    std::optional<double> age_years;
    std::optional<Gender> gender;
};

struct AggregatedDemographics {
    std::optional<double> age_years;  // median; mean of the middle pair for even counts
    std::optional<Gender> gender;     // mode; ties go to the lowest sample_id
};

// Fuses per-image estimates into one per-user value. Absent fields are
// dropped per-field before aggregation; a field absent everywhere stays
// absent in the output.
AggregatedDemographics aggregate_user_demographics(
    const std::vector<DemographicObservation>& observations);

}  // namespace ferbench
