#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fastumap/bipartite.hpp"
#include "fastumap/kernels.hpp"

namespace fastumap {

struct OptimizerConfig {
    int epochs = 500;
    double initial_lr = 1.0;
    int negative_rate = 5;  // gamma
    double clip = 4.0;
    double eps = 1e-3;
    std::uint64_t seed = 42;
    bool deterministic = true;
    bool symmetric_updates = true;  // tail of a positive edge moves by -g
    int threads = 1;                // parallel mode only
};

struct Embedding {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z;
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z_init;
    std::string meta;  // config + seed fingerprint
};

/// Kernel dispatch counters, exposed for role-selection checks.
struct OptimizerStats {
    std::int64_t data_role_updates = 0;
    std::int64_t landmark_role_updates = 0;
};

/// Per-edge positive event counts: edge e fires ceil(E w_e / w_max) times,
/// spread evenly across the epochs. Zero-weight edges never fire.
std::vector<std::int64_t> build_sampling_schedule(const DirectedEdgeList& edges, int epochs);

/// Called after every epoch with (epochs_done, current coordinates).
using EpochObserver =
    std::function<void(int, const Eigen::Matrix<double, Eigen::Dynamic, 2>&)>;

/// Edge-sampled SGD with negative sampling and role-differentiated kernels.
/// Each scheduled positive event attracts head and tail (kernel chosen by the
/// head's role), then applies `negative_rate` repulsive updates to the head
/// against uniformly drawn vertices. The learning rate decays linearly to 0.
/// Deterministic mode processes events in a fixed seeded order and is
/// bit-reproducible; parallel mode allows unsynchronized coordinate updates.
Embedding optimize(const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z_init,
                   const DirectedEdgeList& edges, const KernelParams& kp,
                   const OptimizerConfig& cfg, const EpochObserver& observer = nullptr,
                   OptimizerStats* stats = nullptr);

}  // namespace fastumap
