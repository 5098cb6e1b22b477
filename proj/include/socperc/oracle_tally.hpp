#pragma once

#include <cstdint>
#include <vector>

#include "socperc/oracle.hpp"

namespace socperc {

// Joint counts of (functional value, open edges) over all 2^r configurations.
// Everything exact about the measure derives from this table.
struct FunctionalTally {
    std::int64_t vertex_count = 0;
    EdgeId edge_count = 0;
    std::vector<std::vector<std::int64_t>> count;  // [F][o]
    std::vector<std::int32_t> f_per_config;        // dense mode only
};

FunctionalTally build_tally(const BoxGeometry& box, const FunctionalKind& kind,
                            const EnumerationOptions& opts = {});

std::vector<double> pushforward_from_tally(const FunctionalTally& tally, double p);
double mean_from_tally(const FunctionalTally& tally, double p);

}  // namespace socperc
