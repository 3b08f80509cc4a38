#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "fastumap/landmarks.hpp"

namespace fastumap {

/// k nearest landmarks per sample, rows sorted by ascending distance.
/// `indices` holds landmark slots (not sample indices); both arrays are
/// n x k row-major.
struct NeighborTable {
    int n = 0;
    int m = 0;
    int k = 0;
    std::vector<int> indices;
    std::vector<double> distances;

    int slot(int i, int j) const { return indices[static_cast<std::size_t>(i) * k + j]; }
    double dist(int i, int j) const { return distances[static_cast<std::size_t>(i) * k + j]; }
};

struct SmoothKnnParams {
    double tol = 1e-5;
    int max_iter = 64;
};

struct Calibration {
    double rho = 0.0;
    double sigma = 0.0;
    bool degenerate = false;
};

/// Sparse point-to-landmark membership matrix; each row has exactly k
/// weights over the slots in `indices`, the nearest carrying weight 1 and the
/// row summing to log2(k) unless flagged degenerate.
struct BipartiteGraph {
    int n = 0;
    int m = 0;
    int k = 0;
    std::vector<int> indices;     // n x k landmark slots, row-major
    std::vector<double> weights;  // n x k memberships
    std::vector<double> rho;
    std::vector<double> sigma;
    std::vector<std::uint8_t> degenerate;

    int slot(int i, int j) const { return indices[static_cast<std::size_t>(i) * k + j]; }
    double weight(int i, int j) const { return weights[static_cast<std::size_t>(i) * k + j]; }
    double row_sum(int i) const;
    std::int64_t nnz() const { return static_cast<std::int64_t>(n) * k; }
};

enum class HeadRole : std::uint8_t { Data = 0, Landmark = 1 };

enum class EdgeMode {
    DuplicateDirected,  // every nonzero B_ip yields (i, pi(p)) and (pi(p), i)
    FuzzyUnion,         // probabilistic t-conorm merge of opposing directions
};

/// Directed optimization edges on the sample index set.
struct DirectedEdgeList {
    std::vector<int> heads;
    std::vector<int> tails;
    std::vector<double> weights;
    std::vector<HeadRole> roles;

    std::size_t size() const { return heads.size(); }
};

/// Exact brute-force k nearest landmarks under the Euclidean metric.
/// A sample that is itself a landmark never reports the self pair; ties break
/// toward the lower landmark slot. Requires 1 <= k <= m - 1.
NeighborTable knn_to_landmarks(const Eigen::MatrixXd& X, const LandmarkSet& L, int k);

/// Smooth-kNN calibration for one row of sorted distances: rho is the
/// distance to the nearest landmark and sigma solves
/// sum_p exp(-max(d_p - rho, 0) / sigma) = log2(k) by bisection. When the
/// target is unreachable sigma clamps and the row is flagged degenerate.
Calibration calibrate_smooth_knn(std::span<const double> row_distances, int k,
                                 const SmoothKnnParams& params = {});

/// Membership weights exp(-max(d - rho, 0) / sigma) for every neighbor slot.
BipartiteGraph compute_memberships(const NeighborTable& nt,
                                   const std::vector<Calibration>& calib);

/// knn_to_landmarks + per-row calibration + memberships in one call.
BipartiteGraph build_membership_graph(const Eigen::MatrixXd& X, const LandmarkSet& L, int k,
                                      const SmoothKnnParams& params = {});

/// Expand B into the directed optimization edge multiset. In
/// DuplicateDirected mode every nonzero produces a data-role edge and its
/// landmark-role reverse with the same weight; FuzzyUnion merges opposing
/// weights with w1 + w2 - w1*w2 and is used by the m = n equivalence check.
DirectedEdgeList build_edge_list(const BipartiteGraph& B, const LandmarkSet& L,
                                 EdgeMode mode = EdgeMode::DuplicateDirected);

}  // namespace fastumap
