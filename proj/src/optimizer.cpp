#include "fastumap/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "fastumap/random.hpp"

namespace fastumap {

std::vector<std::int64_t> build_sampling_schedule(const DirectedEdgeList& edges, int epochs) {
    if (epochs < 1) throw std::invalid_argument("build_sampling_schedule: epochs must be >= 1");
    double wmax = 0.0;
    for (double w : edges.weights) wmax = std::max(wmax, w);
    std::vector<std::int64_t> counts(edges.size(), 0);
    if (wmax <= 0.0) return counts;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const double w = edges.weights[e];
        if (w <= 0.0) continue;
        counts[e] = static_cast<std::int64_t>(std::ceil(epochs * w / wmax));
    }
    return counts;
}

namespace {

struct UpdateContext {
    double* z;  // n x 2 row-major coordinates
    const DirectedEdgeList& edges;
    const KernelParams& kp;
    const OptimizerConfig& cfg;
    std::int64_t n;
};

// One positive event: attract head and tail with the head-role kernel, then
// gamma repulsive updates to the head against uniform negatives.
inline void process_event(const UpdateContext& ctx, std::size_t e, double lr, Rng& rng,
                          OptimizerStats* stats) {
    const int u = ctx.edges.heads[e];
    const int v = ctx.edges.tails[e];
    const bool data_role = ctx.edges.roles[e] == HeadRole::Data;
    const double a = data_role ? ctx.kp.a_x : ctx.kp.a_y;
    const double b = data_role ? ctx.kp.b_x : ctx.kp.b_y;
    if (stats) {
        if (data_role)
            ++stats->data_role_updates;
        else
            ++stats->landmark_role_updates;
    }

    double* zu = ctx.z + 2 * static_cast<std::size_t>(u);
    double* zv = ctx.z + 2 * static_cast<std::size_t>(v);
    const Eigen::Vector2d g = clip_coords(
        attractive_gradient(Eigen::Vector2d(zu[0], zu[1]), Eigen::Vector2d(zv[0], zv[1]), a, b),
        ctx.cfg.clip);
    zu[0] += lr * g(0);
    zu[1] += lr * g(1);
    if (ctx.cfg.symmetric_updates) {
        zv[0] -= lr * g(0);
        zv[1] -= lr * g(1);
    }

    for (int s = 0; s < ctx.cfg.negative_rate; ++s) {
        const auto neg = static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(ctx.n)));
        const double* zn = ctx.z + 2 * neg;
        const Eigen::Vector2d gr = clip_coords(
            repulsive_gradient(Eigen::Vector2d(zu[0], zu[1]), Eigen::Vector2d(zn[0], zn[1]), a,
                               b, ctx.cfg.eps),
            ctx.cfg.clip);
        zu[0] += lr * gr(0);
        zu[1] += lr * gr(1);
    }
}

}  // namespace

Embedding optimize(const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z_init,
                   const DirectedEdgeList& edges, const KernelParams& kp,
                   const OptimizerConfig& cfg, const EpochObserver& observer,
                   OptimizerStats* stats) {
    const auto n = Z_init.rows();
    if (n < 1) throw std::invalid_argument("optimize: empty initial layout");
    if (edges.size() == 0) throw std::invalid_argument("optimize: empty edge list");
    if (!Z_init.allFinite()) throw std::invalid_argument("optimize: non-finite initial layout");
    if (cfg.epochs < 1) throw std::invalid_argument("optimize: epochs must be >= 1");
    if (cfg.negative_rate < 0) throw std::invalid_argument("optimize: negative_rate must be >= 0");

    const std::vector<std::int64_t> counts = build_sampling_schedule(edges, cfg.epochs);
    std::vector<std::int64_t> fired(edges.size(), 0);

    // row-major coordinate buffer for the hot loop
    std::vector<double> z(static_cast<std::size_t>(n) * 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        z[2 * static_cast<std::size_t>(i)] = Z_init(i, 0);
        z[2 * static_cast<std::size_t>(i) + 1] = Z_init(i, 1);
    }

    UpdateContext ctx{z.data(), edges, kp, cfg, n};
    const std::uint64_t sgd_seed = derive_seed(cfg.seed, "sgd-negatives");
    Rng rng(sgd_seed);
    const int E = cfg.epochs;

    Eigen::Matrix<double, Eigen::Dynamic, 2> snapshot(n, 2);
    for (int epoch = 0; epoch < E; ++epoch) {
        const double lr = cfg.initial_lr * (1.0 - static_cast<double>(epoch) / E);
        // Edge e fires at epoch floor(j E / c_e) for its j-th event; each edge
        // fires at most once per epoch, so a single check suffices.
        if (cfg.deterministic || cfg.threads <= 1) {
            for (std::size_t e = 0; e < edges.size(); ++e) {
                if (counts[e] == 0 || fired[e] >= counts[e]) continue;
                if ((fired[e] * E) / counts[e] != epoch) continue;
                ++fired[e];
                process_event(ctx, e, lr, rng, stats);
            }
        } else {
#ifdef _OPENMP
            omp_set_num_threads(cfg.threads);
#endif
#pragma omp parallel
            {
#ifdef _OPENMP
                const int tid = omp_get_thread_num();
#else
                const int tid = 0;
#endif
                Rng local(sgd_seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(
                                                                  epoch * 1024 + tid + 1)));
#pragma omp for schedule(static)
                for (std::int64_t ei = 0; ei < static_cast<std::int64_t>(edges.size()); ++ei) {
                    const auto e = static_cast<std::size_t>(ei);
                    if (counts[e] == 0 || fired[e] >= counts[e]) continue;
                    if ((fired[e] * E) / counts[e] != epoch) continue;
                    ++fired[e];
                    // stats are only meaningful in deterministic mode
                    process_event(ctx, e, lr, local, nullptr);
                }
            }
        }

        for (std::size_t i = 0; i < z.size(); ++i)
            if (!std::isfinite(z[i]))
                throw std::runtime_error("optimize: non-finite coordinate after epoch " +
                                         std::to_string(epoch) + " (point " +
                                         std::to_string(i / 2) + ")");
        if (observer) {
            for (Eigen::Index i = 0; i < n; ++i) {
                snapshot(i, 0) = z[2 * static_cast<std::size_t>(i)];
                snapshot(i, 1) = z[2 * static_cast<std::size_t>(i) + 1];
            }
            observer(epoch + 1, snapshot);
        }
    }

    Embedding out;
    out.Z.resize(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        out.Z(i, 0) = z[2 * static_cast<std::size_t>(i)];
        out.Z(i, 1) = z[2 * static_cast<std::size_t>(i) + 1];
    }
    out.Z_init = Z_init;
    return out;
}

}  // namespace fastumap
