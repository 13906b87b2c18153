#include "ferbench/pipeline/demographics.hpp"

#include <algorithm>
#include <map>

#include "ferbench/common.hpp"

namespace ferbench {

AggregatedDemographics aggregate_user_demographics(
    const std::vector<DemographicObservation>& observations) {
    if (observations.empty())
        throw ContractError("aggregate_user_demographics: empty observation list");

    AggregatedDemographics out;

    std::vector<double> ages;
    for (const auto& o : observations)
        if (o.age_years) ages.push_back(*o.age_years);
    if (!ages.empty()) {
        std::sort(ages.begin(), ages.end());
        const std::size_t n = ages.size();
        out.age_years = (n % 2 == 1)
                            ? ages[n / 2]
                            : 0.5 * (ages[n / 2 - 1] + ages[n / 2]);
    }

    std::map<Gender, std::size_t> counts;
    std::map<Gender, std::string> lowest_id;
    for (const auto& o : observations) {
        if (!o.gender) continue;
        ++counts[*o.gender];
        auto it = lowest_id.find(*o.gender);
        if (it == lowest_id.end() || o.sample_id < it->second)
            lowest_id[*o.gender] = o.sample_id;
    }
    if (!counts.empty()) {
        std::size_t best = 0;
        for (const auto& [g, n] : counts) best = std::max(best, n);
        // Mode; among tied genders the one seen on the lowest sample_id wins.
        std::optional<Gender> pick;
        std::string pick_id;
        for (const auto& [g, n] : counts) {
            if (n != best) continue;
            if (!pick || lowest_id[g] < pick_id) {
                pick = g;
                pick_id = lowest_id[g];
            }
        }
        out.gender = pick;
    }
    return out;
}

}  // namespace ferbench
