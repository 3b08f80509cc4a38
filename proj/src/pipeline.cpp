#include "fastumap/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "fastumap/random.hpp"

namespace fastumap {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int PipelineConfig::resolve_landmarks(Eigen::Index n) const {
    if (landmarks && landmark_ratio)
        throw std::invalid_argument("landmark count and landmark ratio are mutually exclusive");
    if (landmarks) {
        if (*landmarks < 1 || *landmarks > n)
            throw std::invalid_argument("landmarks must be in [1, n]");
        return *landmarks;
    }
    if (landmark_ratio) {
        if (!(*landmark_ratio > 0.0) || *landmark_ratio > 1.0)
            throw std::invalid_argument("landmark ratio must be in (0, 1]");
        const auto m = static_cast<int>(std::floor(*landmark_ratio * static_cast<double>(n)));
        return std::clamp(m, 1, static_cast<int>(n));
    }
    return default_landmark_budget(n, landmark_cap);
}

KernelParams PipelineConfig::resolve_kernels() const {
    const auto [ax, bx] = fit_kernel_params(min_dist_data, spread_data);
    if (force_mode == ForceMode::Homo) return KernelParams{ax, bx, ax, bx};
    const auto [ay, by] = fit_kernel_params(min_dist_landmark, spread_landmark);
    return KernelParams{ax, bx, ay, by};
}

std::string PipelineConfig::fingerprint(Eigen::Index n) const {
    nlohmann::json j;
    j["n"] = static_cast<std::int64_t>(n);
    j["landmarks"] = resolve_landmarks(n);
    j["landmark_cap"] = landmark_cap;
    j["n_neighbors"] = n_neighbors;
    j["init"] = init == InitMode::Spectral ? "spectral" : "random";
    j["eig_tol"] = eig.residual_tol;
    j["eig_max_iter"] = eig.max_iter;
    j["init_radius"] = init_radius;
    j["init_jitter"] = init_jitter;
    j["force_mode"] = force_mode == ForceMode::Hetero ? "hetero" : "homo";
    j["min_dist_data"] = min_dist_data;
    j["spread_data"] = spread_data;
    j["min_dist_landmark"] = min_dist_landmark;
    j["spread_landmark"] = spread_landmark;
    j["epochs"] = resolve_epochs(n);
    j["initial_lr"] = initial_lr;
    j["negative_rate"] = negative_rate;
    j["clip"] = clip;
    j["eps"] = eps;
    j["deterministic"] = deterministic;
    j["symmetric_updates"] = symmetric_updates;
    j["threads"] = threads;
    j["seed"] = seed;
    return j.dump();
}

PipelineResult run_fastumap(const DataMatrix& X, const PipelineConfig& cfg,
                            const EpochObserver& observer, OptimizerStats* stats) {
    const auto n = X.n();
    if (n < 2) throw std::invalid_argument("run_fastumap: need at least 2 samples");
    if (!X.values.allFinite()) throw std::invalid_argument("run_fastumap: non-finite input");

    const auto t_total = Clock::now();
    PipelineResult res;

#ifdef _OPENMP
    if (cfg.threads >= 1) omp_set_num_threads(cfg.threads);
#endif

    // stage 1 + 2: landmarks and the bipartite fuzzy graph
    const auto t_graph = Clock::now();
    const int m = cfg.resolve_landmarks(n);
    res.landmarks = sample_landmarks(n, m, derive_seed(cfg.seed, "landmarks"));
    const BipartiteGraph B =
        build_membership_graph(X.values, res.landmarks, cfg.n_neighbors, cfg.smooth_knn);
    const DirectedEdgeList edges = build_edge_list(B, res.landmarks);
    res.timings.graph_s = seconds_since(t_graph);

    // stage 3: warm start
    const auto t_spectral = Clock::now();
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z_init(n, 2);
    if (cfg.init == InitMode::Spectral) {
        EigensolverConfig eig = cfg.eig;
        eig.seed = derive_seed(cfg.seed, "eigensolver");
        const SpectralInitResult init =
            spectral_init(B, eig, cfg.init_radius, cfg.init_jitter, cfg.seed);
        Z_init = init.Z_init;
        res.spectral_components = init.n_components;
    } else {
        Rng rng(derive_seed(cfg.seed, "random-init"));
        for (Eigen::Index i = 0; i < n; ++i) {
            Z_init(i, 0) = (rng.next_double() * 2.0 - 1.0) * cfg.init_radius;
            Z_init(i, 1) = (rng.next_double() * 2.0 - 1.0) * cfg.init_radius;
        }
    }
    res.timings.spectral_s = seconds_since(t_spectral);

    // stage 4: SGD refinement
    const auto t_sgd = Clock::now();
    OptimizerConfig opt;
    opt.epochs = cfg.resolve_epochs(n);
    opt.initial_lr = cfg.initial_lr;
    opt.negative_rate = cfg.negative_rate;
    opt.clip = cfg.clip;
    opt.eps = cfg.eps;
    opt.seed = cfg.seed;
    opt.deterministic = cfg.deterministic;
    opt.symmetric_updates = cfg.symmetric_updates;
    opt.threads = cfg.threads;
    const KernelParams kp = cfg.resolve_kernels();
    res.embedding = optimize(Z_init, edges, kp, opt, observer, stats);
    res.timings.sgd_s = seconds_since(t_sgd);

    res.timings.total_s = seconds_since(t_total);
    res.timings.n = n;
    res.timings.m = m;
    res.timings.k = cfg.n_neighbors;
    res.timings.epochs = opt.epochs;
    res.embedding.meta = cfg.fingerprint(n);
    return res;
}

}  // namespace fastumap
