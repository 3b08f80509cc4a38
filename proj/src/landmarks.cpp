#include "fastumap/landmarks.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "fastumap/random.hpp"

namespace fastumap {

int default_landmark_budget(std::int64_t n, int cap) {
    if (n < 2) throw std::invalid_argument("default_landmark_budget: need n >= 2");
    if (cap < 1) throw std::invalid_argument("default_landmark_budget: cap must be positive");
    // Integer floor keeps this exact: 0.7 * 4601 must give 3220, not 3221.
    std::int64_t m;
    if (n < 500)
        m = n / 2;
    else if (n < 5000)
        m = (7 * n) / 10;
    else
        m = std::min<std::int64_t>((7 * n) / 10, cap);
    m = std::clamp<std::int64_t>(m, 1, n);
    return static_cast<int>(m);
}

LandmarkSet sample_landmarks(std::int64_t n, int m, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_landmarks: need n >= 1");
    if (m < 1 || m > n)
        throw std::invalid_argument("sample_landmarks: m must satisfy 1 <= m <= n (got m=" +
                                    std::to_string(m) + ", n=" + std::to_string(n) + ")");
    std::vector<int> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    LandmarkSet out;
    out.indices.assign(pool.begin(), pool.begin() + m);
    std::sort(out.indices.begin(), out.indices.end());
    out.m = m;
    out.ratio = static_cast<double>(m) / static_cast<double>(n);
    return out;
}

}  // namespace fastumap
