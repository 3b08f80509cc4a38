#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "fastumap/bipartite.hpp"
#include "fastumap/dataset.hpp"
#include "fastumap/optimizer.hpp"
#include "fastumap/spectral.hpp"

namespace fastumap {

enum class InitMode { Spectral, Random };
enum class ForceMode { Hetero, Homo };

/// Every knob of the four-stage pipeline. All randomness derives from `seed`
/// through labeled sub-seeds, so stages are individually reproducible.
struct PipelineConfig {
    // landmark budget: explicit count wins over ratio; neither means the
    // capped-adaptive default rule
    std::optional<int> landmarks;
    std::optional<double> landmark_ratio;
    int landmark_cap = 5000;

    int n_neighbors = 15;
    SmoothKnnParams smooth_knn;

    InitMode init = InitMode::Spectral;
    EigensolverConfig eig;
    double init_radius = 10.0;
    double init_jitter = 1e-4;

    ForceMode force_mode = ForceMode::Hetero;
    double min_dist_data = 0.1;
    double spread_data = 1.0;
    double min_dist_landmark = 0.2;
    double spread_landmark = 1.0;

    std::optional<int> epochs;  // default: 200 when n >= 10000, else 500
    double initial_lr = 1.0;
    int negative_rate = 5;
    double clip = 4.0;
    double eps = 1e-3;
    bool deterministic = true;
    bool symmetric_updates = true;
    int threads = 1;

    std::uint64_t seed = 42;

    int resolve_epochs(Eigen::Index n) const {
        if (epochs) return *epochs;
        return n >= 10000 ? 200 : 500;
    }
    int resolve_landmarks(Eigen::Index n) const;
    KernelParams resolve_kernels() const;
    std::string fingerprint(Eigen::Index n) const;  // resolved config as compact JSON
};

/// Wall-clock stage durations in seconds.
struct StageTimings {
    double graph_s = 0.0;
    double spectral_s = 0.0;
    double sgd_s = 0.0;
    double total_s = 0.0;
    std::int64_t n = 0;
    int m = 0;
    int k = 0;
    int epochs = 0;
};

struct PipelineResult {
    Embedding embedding;
    StageTimings timings;
    LandmarkSet landmarks;
    int spectral_components = 1;
};

/// The four-stage pipeline: landmark sampling, bipartite fuzzy graph,
/// spectral (or random) warm start, role-differentiated SGD refinement.
/// An optional observer receives coordinates after every SGD epoch.
PipelineResult run_fastumap(const DataMatrix& X, const PipelineConfig& cfg,
                            const EpochObserver& observer = nullptr,
                            OptimizerStats* stats = nullptr);

}  // namespace fastumap
