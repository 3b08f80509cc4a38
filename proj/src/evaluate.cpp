#include "fastumap/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fastumap/random.hpp"

namespace fastumap {

std::vector<int> make_stratified_folds(const std::vector<int>& labels, int folds,
                                       std::uint64_t seed) {
    if (folds < 2) throw std::invalid_argument("make_stratified_folds: folds must be >= 2");
    const auto n = labels.size();
    std::map<int, std::vector<int>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[labels[i]].push_back(static_cast<int>(i));

    bool relaxed = false;
    Rng rng(derive_seed(seed, "cv-folds"));
    std::vector<int> fold(n, -1);
    for (auto& [cls, members] : by_class) {
        if (static_cast<int>(members.size()) < folds) relaxed = true;
        for (std::size_t i = members.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.next_below(i));
            std::swap(members[i - 1], members[j]);
        }
        for (std::size_t i = 0; i < members.size(); ++i)
            fold[static_cast<std::size_t>(members[i])] = static_cast<int>(i % folds);
    }
    if (relaxed)
        std::cerr << "[fastumap] warning: some classes have fewer members than folds; "
                     "stratification relaxed\n";
    return fold;
}

QualityReport knn_accuracy(const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z,
                           const std::vector<int>& labels, int k, int folds,
                           std::uint64_t seed) {
    const auto n = Z.rows();
    if (static_cast<Eigen::Index>(labels.size()) != n)
        throw std::invalid_argument("knn_accuracy: one label per embedded point required");
    if (n < k + 1) throw std::invalid_argument("knn_accuracy: need n >= k + 1");

    const std::vector<int> fold = make_stratified_folds(labels, folds, seed);
    const int n_classes = *std::max_element(labels.begin(), labels.end()) + 1;

    QualityReport report;
    report.k = k;
    report.folds = folds;
    report.seed = seed;

    std::vector<int> train_idx;
    std::vector<std::pair<double, int>> nearest;
    for (int f = 0; f < folds; ++f) {
        train_idx.clear();
        std::int64_t fold_size = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fold[static_cast<std::size_t>(i)] == f)
                ++fold_size;
            else
                train_idx.push_back(static_cast<int>(i));
        }
        if (fold_size == 0 || static_cast<int>(train_idx.size()) < k) {
            report.per_fold.push_back(0.0);
            continue;
        }

        std::int64_t correct = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fold[static_cast<std::size_t>(i)] != f) continue;
            nearest.clear();
            nearest.reserve(train_idx.size());
            for (int t : train_idx) {
                const double dx = Z(i, 0) - Z(t, 0);
                const double dy = Z(i, 1) - Z(t, 1);
                nearest.emplace_back(dx * dx + dy * dy, t);
            }
            std::partial_sort(nearest.begin(), nearest.begin() + k, nearest.end(),
                              [](const auto& a, const auto& b) {
                                  return a.first < b.first ||
                                         (a.first == b.first && a.second < b.second);
                              });
            std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
            std::vector<double> dist_sum(static_cast<std::size_t>(n_classes), 0.0);
            for (int j = 0; j < k; ++j) {
                const int cls = labels[static_cast<std::size_t>(nearest[static_cast<std::size_t>(j)].second)];
                votes[static_cast<std::size_t>(cls)]++;
                dist_sum[static_cast<std::size_t>(cls)] +=
                    std::sqrt(nearest[static_cast<std::size_t>(j)].first);
            }
            int best = -1;
            for (int c = 0; c < n_classes; ++c) {
                if (votes[static_cast<std::size_t>(c)] == 0) continue;
                if (best < 0) {
                    best = c;
                    continue;
                }
                const auto vc = votes[static_cast<std::size_t>(c)];
                const auto vb = votes[static_cast<std::size_t>(best)];
                if (vc > vb ||
                    (vc == vb && dist_sum[static_cast<std::size_t>(c)] <
                                     dist_sum[static_cast<std::size_t>(best)]))
                    best = c;  // remaining tie keeps the smaller label
            }
            if (best == labels[static_cast<std::size_t>(i)]) ++correct;
        }
        report.per_fold.push_back(100.0 * static_cast<double>(correct) /
                                  static_cast<double>(fold_size));
    }
    report.knn_accuracy =
        std::accumulate(report.per_fold.begin(), report.per_fold.end(), 0.0) /
        static_cast<double>(report.per_fold.size());
    return report;
}

std::pair<Embedding, StageTimings> timed_run(const DataMatrix& X, const PipelineConfig& cfg,
                                             int repeats) {
    if (repeats < 1) throw std::invalid_argument("timed_run: repeats must be >= 1");
    std::vector<StageTimings> runs;
    Embedding embedding;
    for (int r = 0; r < repeats; ++r) {
        PipelineResult res = run_fastumap(X, cfg);
        runs.push_back(res.timings);
        if (r + 1 == repeats) embedding = std::move(res.embedding);
    }
    auto median_of = [&](auto getter) {
        std::vector<double> v;
        for (const auto& t : runs) v.push_back(getter(t));
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
    };
    StageTimings med = runs.back();
    med.graph_s = median_of([](const StageTimings& t) { return t.graph_s; });
    med.spectral_s = median_of([](const StageTimings& t) { return t.spectral_s; });
    med.sgd_s = median_of([](const StageTimings& t) { return t.sgd_s; });
    med.total_s = median_of([](const StageTimings& t) { return t.total_s; });
    return {std::move(embedding), med};
}

SweepResult r_sweep(const DataMatrix& X, const std::vector<int>& labels,
                    const std::vector<double>& ratios, const PipelineConfig& cfg) {
    if (ratios.empty()) throw std::invalid_argument("r_sweep: need at least one ratio");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        if (!(ratios[i] > 0.0) || ratios[i] > 1.0)
            throw std::invalid_argument("r_sweep: ratios must lie in (0, 1]");
        if (i > 0 && ratios[i] <= ratios[i - 1])
            throw std::invalid_argument("r_sweep: ratios must be strictly increasing");
    }
    SweepResult sweep;
    for (double r : ratios) {
        PipelineConfig run_cfg = cfg;
        run_cfg.landmarks.reset();
        run_cfg.landmark_ratio = r;
        // small ratios can drop m below the neighbor count; clamp so the
        // sweep covers the whole range
        const int m = run_cfg.resolve_landmarks(X.n());
        run_cfg.n_neighbors = std::min(cfg.n_neighbors, m - 1);
        auto [embedding, timings] = timed_run(X, run_cfg, 1);
        SweepPoint pt;
        pt.r = r;
        pt.m = timings.m;
        pt.total_s = timings.total_s;
        pt.knn_accuracy = knn_accuracy(embedding.Z, labels, 5, 5, cfg.seed).knn_accuracy;
        sweep.points.push_back(pt);
    }
    return sweep;
}

AblationResult ablation_grid(const DataMatrix& X, const std::vector<int>& labels,
                             const PipelineConfig& cfg,
                             const std::vector<double>& trace_fractions) {
    AblationResult result;
    for (InitMode init : {InitMode::Spectral, InitMode::Random}) {
        for (ForceMode force : {ForceMode::Hetero, ForceMode::Homo}) {
            PipelineConfig run_cfg = cfg;
            run_cfg.init = init;
            run_cfg.force_mode = force;

            const bool traced = force == ForceMode::Hetero;
            const int epochs = run_cfg.resolve_epochs(X.n());
            std::vector<int> snap_epochs;
            for (double f : trace_fractions)
                snap_epochs.push_back(std::clamp(
                    static_cast<int>(std::llround(f * epochs)), 1, epochs));

            std::vector<std::pair<int, Eigen::Matrix<double, Eigen::Dynamic, 2>>> snaps;
            EpochObserver observer;
            if (traced) {
                observer = [&](int done, const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z) {
                    if (std::find(snap_epochs.begin(), snap_epochs.end(), done) !=
                        snap_epochs.end())
                        snaps.emplace_back(done, Z);
                };
            }

            PipelineResult res = run_fastumap(X, run_cfg, observer);

            AblationCell cell;
            cell.init = init;
            cell.force = force;
            cell.total_s = res.timings.total_s;
            cell.knn_accuracy =
                knn_accuracy(res.embedding.Z, labels, 5, 5, cfg.seed).knn_accuracy;
            result.cells.push_back(cell);

            if (traced) {
                for (std::size_t s = 0; s < snaps.size(); ++s) {
                    TracePoint tp;
                    tp.init = init;
                    tp.epochs_done = snaps[s].first;
                    tp.epoch_fraction = static_cast<double>(snaps[s].first) / epochs;
                    tp.knn_accuracy =
                        knn_accuracy(snaps[s].second, labels, 5, 5, cfg.seed).knn_accuracy;
                    result.trace.push_back(tp);
                }
            }
        }
    }
    return result;
}

namespace {

// Straightforward all-points kNN fuzzy graph, kept independent of the
// bipartite machinery: full distance sort per point, same calibration rule,
// fuzzy-union symmetrization.
struct ReferenceGraph {
    std::map<std::pair<int, int>, double> undirected;  // (min, max) -> weight
    std::vector<double> rho;
};

ReferenceGraph build_reference_graph(const Eigen::MatrixXd& X, int k,
                                     const SmoothKnnParams& params) {
    const auto n = X.rows();
    ReferenceGraph ref;
    ref.rho.resize(static_cast<std::size_t>(n));
    std::map<std::pair<int, int>, std::pair<double, double>> directed;
    std::vector<std::pair<double, int>> dists;
    for (Eigen::Index i = 0; i < n; ++i) {
        dists.clear();
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            dists.emplace_back((X.row(i) - X.row(j)).norm(), static_cast<int>(j));
        }
        std::sort(dists.begin(), dists.end(), [](const auto& a, const auto& b) {
            return a.first < b.first || (a.first == b.first && a.second < b.second);
        });
        std::vector<double> row(static_cast<std::size_t>(k));
        for (int j = 0; j < k; ++j) row[static_cast<std::size_t>(j)] = dists[static_cast<std::size_t>(j)].first;
        const Calibration cal = calibrate_smooth_knn(row, k, params);
        ref.rho[static_cast<std::size_t>(i)] = cal.rho;
        for (int j = 0; j < k; ++j) {
            const int other = dists[static_cast<std::size_t>(j)].second;
            const double w =
                std::exp(-std::max(row[static_cast<std::size_t>(j)] - cal.rho, 0.0) / cal.sigma);
            const bool forward = static_cast<int>(i) < other;
            const auto key = forward ? std::make_pair(static_cast<int>(i), other)
                                     : std::make_pair(other, static_cast<int>(i));
            auto& slot = directed[key];
            (forward ? slot.first : slot.second) = w;
        }
    }
    for (const auto& [key, w] : directed)
        ref.undirected[key] = w.first + w.second - w.first * w.second;
    return ref;
}

}  // namespace

EquivalenceReport equivalence_check(const DataMatrix& X, int k, std::uint64_t seed) {
    const auto n = X.n();
    if (k < 2) throw std::invalid_argument("equivalence_check: k must be >= 2");
    if (n > 2000) throw std::invalid_argument("equivalence_check: n is capped at 2000");
    if (n < k + 1) throw std::invalid_argument("equivalence_check: need n >= k + 1");

    EquivalenceReport report;
    report.n = n;
    report.k = k;
    report.seed = seed;

    // bipartite path with every sample a landmark, fuzzy-union edge mode
    const LandmarkSet L = sample_landmarks(n, static_cast<int>(n), seed);
    const SmoothKnnParams params;
    const BipartiteGraph B = build_membership_graph(X.values, L, k, params);
    const DirectedEdgeList edges = build_edge_list(B, L, EdgeMode::FuzzyUnion);

    std::map<std::pair<int, int>, double> ours;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const int u = edges.heads[e], v = edges.tails[e];
        if (u < v) ours[{u, v}] = edges.weights[e];
    }

    const ReferenceGraph ref = build_reference_graph(X.values, k, params);
    report.reference_edges = static_cast<std::int64_t>(ref.undirected.size());

    for (const auto& [key, w] : ours) {
        auto it = ref.undirected.find(key);
        if (it == ref.undirected.end())
            ++report.symmetric_difference_edges;
        else
            report.max_weight_delta = std::max(report.max_weight_delta, std::abs(w - it->second));
    }
    for (const auto& [key, w] : ref.undirected)
        if (ours.find(key) == ours.end()) ++report.symmetric_difference_edges;

    for (Eigen::Index i = 0; i < n; ++i)
        report.max_rho_delta =
            std::max(report.max_rho_delta, std::abs(B.rho[static_cast<std::size_t>(i)] -
                                                    ref.rho[static_cast<std::size_t>(i)]));
    return report;
}

std::vector<BenchmarkRow> benchmark_suite(const std::vector<BenchmarkEntry>& datasets,
                                          const PipelineConfig& cfg,
                                          const PreprocessConfig& pre, int repeats) {
    std::vector<BenchmarkRow> rows;
    for (const auto& entry : datasets) {
        if (!std::filesystem::exists(entry.path)) {
            std::cerr << "[fastumap] warning: dataset '" << entry.name << "' missing at "
                      << entry.path << "; skipped\n";
            continue;
        }
        const RawDataset raw = load_dataset(entry.path, entry.format, entry.label_col, entry.name);
        const DataMatrix X = preprocess(raw, pre);

        auto [embedding, timings] = timed_run(X, cfg, repeats);

        BenchmarkRow row;
        row.dataset = entry.name;
        row.n = X.n();
        row.d = static_cast<int>(X.dim());
        row.m = timings.m;
        row.r = static_cast<double>(timings.m) / static_cast<double>(X.n());
        row.k = cfg.n_neighbors;
        row.epochs = timings.epochs;
        row.seed = cfg.seed;
        row.timings = timings;
        row.knn_acc = raw.labels
                          ? knn_accuracy(embedding.Z, *raw.labels, 5, 5, cfg.seed).knn_accuracy
                          : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
    }
    return rows;
}

}  // namespace fastumap
