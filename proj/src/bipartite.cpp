#include "fastumap/bipartite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace fastumap {

double BipartiteGraph::row_sum(int i) const {
    double s = 0.0;
    for (int j = 0; j < k; ++j) s += weight(i, j);
    return s;
}

NeighborTable knn_to_landmarks(const Eigen::MatrixXd& X, const LandmarkSet& L, int k) {
    const auto n = X.rows();
    const int m = L.m;
    if (k < 1) throw std::invalid_argument("knn_to_landmarks: k must be >= 1");
    // Landmarks are samples, so at least one query loses its self pair.
    if (k > m - 1)
        throw std::invalid_argument("knn_to_landmarks: k=" + std::to_string(k) +
                                    " too large for m=" + std::to_string(m) +
                                    " landmarks (need k <= m - 1)");

    Eigen::MatrixXd Lmat(m, X.cols());
    for (int p = 0; p < m; ++p) Lmat.row(p) = X.row(L.indices[p]);

    std::vector<int> slot_of_sample(static_cast<std::size_t>(n), -1);
    for (int p = 0; p < m; ++p) slot_of_sample[static_cast<std::size_t>(L.indices[p])] = p;

    const Eigen::VectorXd lnorm = Lmat.rowwise().squaredNorm();

    NeighborTable nt;
    nt.n = static_cast<int>(n);
    nt.m = m;
    nt.k = k;
    nt.indices.resize(static_cast<std::size_t>(n) * k);
    nt.distances.resize(static_cast<std::size_t>(n) * k);

    constexpr Eigen::Index kBlock = 256;
    const Eigen::Index nblocks = (n + kBlock - 1) / kBlock;

#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index blk = 0; blk < nblocks; ++blk) {
        const Eigen::Index begin = blk * kBlock;
        const Eigen::Index rows = std::min(kBlock, n - begin);
        // d^2(i, p) = |x_i|^2 + |l_p|^2 - 2 x_i . l_p, via one GEMM per block
        Eigen::MatrixXd inner = X.middleRows(begin, rows) * Lmat.transpose();
        Eigen::VectorXd xnorm = X.middleRows(begin, rows).rowwise().squaredNorm();

        std::vector<int> order(static_cast<std::size_t>(m));
        std::vector<double> d2(static_cast<std::size_t>(m));
        for (Eigen::Index r = 0; r < rows; ++r) {
            const Eigen::Index i = begin + r;
            for (int p = 0; p < m; ++p)
                d2[static_cast<std::size_t>(p)] =
                    std::max(0.0, xnorm(r) + lnorm(p) - 2.0 * inner(r, p));
            const int self = slot_of_sample[static_cast<std::size_t>(i)];
            if (self >= 0) d2[static_cast<std::size_t>(self)] = std::numeric_limits<double>::infinity();

            for (int p = 0; p < m; ++p) order[static_cast<std::size_t>(p)] = p;
            std::partial_sort(order.begin(), order.begin() + k, order.end(),
                              [&](int a, int b) {
                                  const double da = d2[static_cast<std::size_t>(a)];
                                  const double db = d2[static_cast<std::size_t>(b)];
                                  return da < db || (da == db && a < b);
                              });
            for (int j = 0; j < k; ++j) {
                const int p = order[static_cast<std::size_t>(j)];
                nt.indices[static_cast<std::size_t>(i) * k + j] = p;
                nt.distances[static_cast<std::size_t>(i) * k + j] =
                    std::sqrt(d2[static_cast<std::size_t>(p)]);
            }
        }
    }
    return nt;
}

Calibration calibrate_smooth_knn(std::span<const double> row_distances, int k,
                                 const SmoothKnnParams& params) {
    if (k < 2)
        throw std::invalid_argument("calibrate_smooth_knn: k must be >= 2 (log2(1) target is degenerate)");
    if (static_cast<int>(row_distances.size()) != k)
        throw std::invalid_argument("calibrate_smooth_knn: expected k distances");

    Calibration cal;
    cal.rho = row_distances[0];

    const double target = std::log2(static_cast<double>(k));
    double mean_d = 0.0;
    double mean_adj = 0.0;
    for (double d : row_distances) {
        mean_d += d;
        mean_adj += std::max(d - cal.rho, 0.0);
    }
    mean_d /= k;
    mean_adj /= k;

    const double sigma_min = (mean_d > 0.0) ? 1e-3 * mean_d : 1e-3;
    auto row_sum = [&](double sigma) {
        double s = 0.0;
        for (double d : row_distances) s += std::exp(-std::max(d - cal.rho, 0.0) / sigma);
        return s;
    };

    if (mean_adj <= 0.0) {
        // every distance equals rho: sum is k for all sigma, target unreachable
        cal.sigma = sigma_min;
        cal.degenerate = true;
        return cal;
    }

    double lo = sigma_min;
    double hi = std::max(1e3 * mean_adj, sigma_min * 2.0);
    if (row_sum(lo) > target + params.tol) {
        // too many coincident nearest landmarks; clamp at the small end
        cal.sigma = sigma_min;
        cal.degenerate = true;
        return cal;
    }
    if (row_sum(hi) < target - params.tol) {
        cal.sigma = hi;
        cal.degenerate = true;
        return cal;
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < params.max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        const double s = row_sum(mid);
        if (std::abs(s - target) <= params.tol) break;
        if (s > target)
            hi = mid;
        else
            lo = mid;
    }
    cal.sigma = mid;
    cal.degenerate = false;
    return cal;
}

BipartiteGraph compute_memberships(const NeighborTable& nt,
                                   const std::vector<Calibration>& calib) {
    if (static_cast<int>(calib.size()) != nt.n)
        throw std::invalid_argument("compute_memberships: one calibration per row required");
    BipartiteGraph B;
    B.n = nt.n;
    B.m = nt.m;
    B.k = nt.k;
    B.indices = nt.indices;
    B.weights.resize(nt.indices.size());
    B.rho.resize(static_cast<std::size_t>(nt.n));
    B.sigma.resize(static_cast<std::size_t>(nt.n));
    B.degenerate.resize(static_cast<std::size_t>(nt.n));

#pragma omp parallel for schedule(static)
    for (int i = 0; i < nt.n; ++i) {
        const auto& cal = calib[static_cast<std::size_t>(i)];
        B.rho[static_cast<std::size_t>(i)] = cal.rho;
        B.sigma[static_cast<std::size_t>(i)] = cal.sigma;
        B.degenerate[static_cast<std::size_t>(i)] = cal.degenerate ? 1 : 0;
        for (int j = 0; j < nt.k; ++j) {
            const double d = nt.dist(i, j);
            B.weights[static_cast<std::size_t>(i) * nt.k + j] =
                std::exp(-std::max(d - cal.rho, 0.0) / cal.sigma);
        }
    }
    return B;
}

BipartiteGraph build_membership_graph(const Eigen::MatrixXd& X, const LandmarkSet& L, int k,
                                      const SmoothKnnParams& params) {
    if (k < 2) throw std::invalid_argument("build_membership_graph: k must be >= 2");
    const NeighborTable nt = knn_to_landmarks(X, L, k);
    std::vector<Calibration> calib(static_cast<std::size_t>(nt.n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < nt.n; ++i) {
        std::span<const double> row(nt.distances.data() + static_cast<std::size_t>(i) * k,
                                    static_cast<std::size_t>(k));
        calib[static_cast<std::size_t>(i)] = calibrate_smooth_knn(row, k, params);
    }
    return compute_memberships(nt, calib);
}

DirectedEdgeList build_edge_list(const BipartiteGraph& B, const LandmarkSet& L,
                                 EdgeMode mode) {
    DirectedEdgeList edges;
    if (mode == EdgeMode::DuplicateDirected) {
        edges.heads.reserve(2 * B.nnz());
        edges.tails.reserve(2 * B.nnz());
        edges.weights.reserve(2 * B.nnz());
        edges.roles.reserve(2 * B.nnz());
        for (int i = 0; i < B.n; ++i) {
            for (int j = 0; j < B.k; ++j) {
                const int s = L.indices[static_cast<std::size_t>(B.slot(i, j))];
                if (s == i) continue;  // self-loops are suppressed
                const double w = B.weight(i, j);
                if (w <= 0.0) continue;
                edges.heads.push_back(i);
                edges.tails.push_back(s);
                edges.weights.push_back(w);
                edges.roles.push_back(HeadRole::Data);
                edges.heads.push_back(s);
                edges.tails.push_back(i);
                edges.weights.push_back(w);
                edges.roles.push_back(HeadRole::Landmark);
            }
        }
        return edges;
    }

    // FuzzyUnion: merge the two directions of each sample pair with the
    // probabilistic t-conorm w1 + w2 - w1*w2, then emit both directions.
    // std::map keeps the output order deterministic.
    std::map<std::pair<int, int>, std::pair<double, double>> pairs;
    for (int i = 0; i < B.n; ++i) {
        for (int j = 0; j < B.k; ++j) {
            const int s = L.indices[static_cast<std::size_t>(B.slot(i, j))];
            if (s == i) continue;
            const double w = B.weight(i, j);
            if (w <= 0.0) continue;
            const bool forward = i < s;
            const auto key = forward ? std::make_pair(i, s) : std::make_pair(s, i);
            auto& slot = pairs[key];
            if (forward)
                slot.first = std::max(slot.first, w);
            else
                slot.second = std::max(slot.second, w);
        }
    }
    edges.heads.reserve(2 * pairs.size());
    edges.tails.reserve(2 * pairs.size());
    edges.weights.reserve(2 * pairs.size());
    edges.roles.reserve(2 * pairs.size());
    for (const auto& [key, w] : pairs) {
        const double merged = w.first + w.second - w.first * w.second;
        edges.heads.push_back(key.first);
        edges.tails.push_back(key.second);
        edges.weights.push_back(merged);
        edges.roles.push_back(w.first > 0.0 ? HeadRole::Data : HeadRole::Landmark);
        edges.heads.push_back(key.second);
        edges.tails.push_back(key.first);
        edges.weights.push_back(merged);
        edges.roles.push_back(w.second > 0.0 ? HeadRole::Data : HeadRole::Landmark);
    }
    return edges;
}

}  // namespace fastumap
