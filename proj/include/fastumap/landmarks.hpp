#pragma once

#include <cstdint>
#include <vector>

namespace fastumap {

/// Index subset acting as graph anchors. `indices[p]` maps landmark slot p
/// back to its sample index; entries are distinct and sorted ascending.
struct LandmarkSet {
    std::vector<int> indices;
    int m = 0;
    double ratio = 0.0;  // m / n
};

/// Capped-adaptive landmark budget: floor(0.5 n) below 500 samples,
/// floor(0.7 n) up to 5000, then capped at `cap`. Always at least 1.
int default_landmark_budget(std::int64_t n, int cap = 5000);

/// Draw m distinct sample indices uniformly without replacement; returned
/// sorted ascending. Identical (n, m, seed) give identical sets.
LandmarkSet sample_landmarks(std::int64_t n, int m, std::uint64_t seed);

}  // namespace fastumap
