#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstdint>
#include <vector>

#include "fastumap/bipartite.hpp"

namespace fastumap {

/// Landmark affinity W = B^T diag(B1)^{-1} B with its two degree vectors.
/// W factors as A^T A with A = Dx^{-1/2} B, so it is symmetric PSD.
struct LandmarkAffinity {
    Eigen::SparseMatrix<double> W;  // m x m
    Eigen::VectorXd Dx;             // length n, row sums of B
    Eigen::VectorXd Dl;             // length m, row sums of W
};

struct EigensolverConfig {
    int max_iter = 300;
    double residual_tol = 1e-8;
    std::uint64_t seed = 42;
    // Problems at or below this order use a dense eigendecomposition; larger
    // ones run deflated Lanczos on the implicit normalized operator.
    int dense_threshold = 512;
};

/// Two leading non-trivial eigenvectors of M = Dl^{-1/2} W Dl^{-1/2},
/// orthonormal and orthogonal to the trivial eigenvector Dl^{1/2} 1.
struct SpectralBasis {
    Eigen::Matrix<double, Eigen::Dynamic, 2> U;
    Eigen::Vector2d eigenvalues;
};

LandmarkAffinity landmark_affinity(const BipartiteGraph& B);

/// Eigenpairs of the normalized operator with the analytically known trivial
/// pair (eigenvalue 1, eigenvector ~ Dl^{1/2} 1) deflated; returns the next
/// two by decreasing eigenvalue with signs fixed so each column's
/// largest-magnitude entry is positive. Throws on non-convergence.
SpectralBasis top_nontrivial_eigenvectors(const LandmarkAffinity& aff,
                                          const EigensolverConfig& cfg);

/// Nystrom projection Z_init = diag(B1)^{-1} B U: every sample lands on a
/// convex combination of its landmarks' spectral coordinates.
Eigen::Matrix<double, Eigen::Dynamic, 2> nystrom_project(
    const BipartiteGraph& B, const Eigen::Matrix<double, Eigen::Dynamic, 2>& U);

/// Rescale so the maximum absolute coordinate equals `radius`, then add
/// seeded Gaussian jitter of the given scale to break exact ties.
Eigen::Matrix<double, Eigen::Dynamic, 2> scale_init(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z_init, double radius, double jitter,
    std::uint64_t seed);

/// Connected components of the landmark graph induced by B's sparsity
/// pattern (two slots connect when some sample lists both). Returns one
/// component id per slot.
std::vector<int> landmark_components(const BipartiteGraph& B, int* n_components);

struct SpectralInitResult {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z_init;  // n x 2, scaled + jittered
    SpectralBasis basis;                              // basis of the embedded component
    int n_components = 1;
};

/// Full warm-start path: affinity, eigenvectors, Nystrom projection, scaling.
/// A disconnected landmark graph embeds its largest component spectrally and
/// scatters the remaining components at seeded random offsets (with a
/// warning); optimization separates them further.
SpectralInitResult spectral_init(const BipartiteGraph& B, const EigensolverConfig& eig_cfg,
                                 double radius, double jitter, std::uint64_t seed);

}  // namespace fastumap
