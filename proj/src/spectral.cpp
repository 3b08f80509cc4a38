#include "fastumap/spectral.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fastumap/random.hpp"

namespace fastumap {

namespace {

void fix_column_sign(Eigen::Ref<Eigen::VectorXd> v) {
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0.0) v = -v;
}

// Applies x -> M x - (v0 . x) v0 where M = Dl^{-1/2} W Dl^{-1/2} and v0 is
// the unit trivial eigenvector. Slots with zero degree stay zero.
struct DeflatedOperator {
    const Eigen::SparseMatrix<double>& W;
    Eigen::VectorXd dinv_sqrt;
    Eigen::VectorXd v0;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
        Eigen::VectorXd y = dinv_sqrt.asDiagonal() * x;
        y = W * y;
        y = dinv_sqrt.asDiagonal() * y;
        y -= v0 * v0.dot(x);
        return y;
    }
};

struct RitzPair {
    double value;
    Eigen::VectorXd vector;
    double residual;
};

// Lanczos with full reorthogonalization on the deflated operator; returns the
// `nev` largest eigenpairs. The Krylov basis is kept orthogonal to v0 as well,
// which makes the deflation exact in floating point.
std::vector<RitzPair> lanczos_topk(const DeflatedOperator& op, int nev,
                                   const EigensolverConfig& cfg, double* best_residual) {
    const Eigen::Index m = op.v0.size();
    const int max_iter = std::min<int>(cfg.max_iter, static_cast<int>(m));
    Rng rng(cfg.seed);

    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    basis.reserve(static_cast<std::size_t>(max_iter) + 1);

    auto random_start = [&]() {
        Eigen::VectorXd q(m);
        for (Eigen::Index i = 0; i < m; ++i) q(i) = rng.next_double() - 0.5;
        q -= op.v0 * op.v0.dot(q);
        for (const auto& b : basis) q -= b * b.dot(q);
        const double norm = q.norm();
        if (norm < 1e-12) throw std::runtime_error("lanczos: cannot find independent start vector");
        return Eigen::VectorXd(q / norm);
    };

    basis.push_back(random_start());
    *best_residual = std::numeric_limits<double>::infinity();

    std::vector<RitzPair> result;
    for (int j = 0; j < max_iter; ++j) {
        Eigen::VectorXd w = op.apply(basis.back());
        const double a = basis.back().dot(w);
        alpha.push_back(a);
        w -= a * basis.back();
        if (j > 0) w -= beta.back() * basis[basis.size() - 2];
        // full reorthogonalization, twice for safety
        for (int pass = 0; pass < 2; ++pass) {
            w -= op.v0 * op.v0.dot(w);
            for (const auto& b : basis) w -= b * b.dot(w);
        }
        const double bnorm = w.norm();

        // Ritz extraction from the tridiagonal projection
        const int dim = static_cast<int>(alpha.size());
        if (dim >= nev) {
            Eigen::MatrixXd T = Eigen::MatrixXd::Zero(dim, dim);
            for (int i = 0; i < dim; ++i) T(i, i) = alpha[static_cast<std::size_t>(i)];
            for (int i = 0; i + 1 < dim; ++i) {
                T(i, i + 1) = beta[static_cast<std::size_t>(i)];
                T(i + 1, i) = beta[static_cast<std::size_t>(i)];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
            double worst = 0.0;
            for (int t = 0; t < nev; ++t) {
                const int col = dim - 1 - t;
                worst = std::max(worst, bnorm * std::abs(es.eigenvectors()(dim - 1, col)));
            }
            *best_residual = std::min(*best_residual, worst);
            if (worst <= cfg.residual_tol || bnorm < 1e-14 || dim == static_cast<int>(m)) {
                result.clear();
                for (int t = 0; t < nev; ++t) {
                    const int col = dim - 1 - t;
                    RitzPair rp;
                    rp.value = es.eigenvalues()(col);
                    rp.vector = Eigen::VectorXd::Zero(m);
                    for (int i = 0; i < dim; ++i)
                        rp.vector += es.eigenvectors()(i, col) * basis[static_cast<std::size_t>(i)];
                    rp.vector.normalize();
                    rp.residual = (op.apply(rp.vector) - rp.value * rp.vector).norm();
                    result.push_back(std::move(rp));
                }
                const double explicit_worst =
                    std::max_element(result.begin(), result.end(), [](const auto& p, const auto& q) {
                        return p.residual < q.residual;
                    })->residual;
                *best_residual = explicit_worst;
                if (explicit_worst <= cfg.residual_tol || dim == static_cast<int>(m)) return result;
            }
        }

        if (bnorm < 1e-14) {
            // invariant subspace exhausted; restart in the orthogonal complement
            if (static_cast<int>(basis.size()) >= m) break;
            beta.push_back(0.0);
            basis.push_back(random_start());
            continue;
        }
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }
    if (!result.empty()) return result;
    throw std::runtime_error("lanczos: no convergence within max_iter (best residual " +
                             std::to_string(*best_residual) + ")");
}

}  // namespace

LandmarkAffinity landmark_affinity(const BipartiteGraph& B) {
    LandmarkAffinity aff;
    aff.Dx.resize(B.n);
    for (int i = 0; i < B.n; ++i) {
        const double deg = B.row_sum(i);
        if (!(deg > 0.0))
            throw std::runtime_error("landmark_affinity: sample " + std::to_string(i) +
                                     " has an empty membership row");
        aff.Dx(i) = deg;
    }
    // W = A^T A with A = Dx^{-1/2} B
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(B.nnz()));
    for (int i = 0; i < B.n; ++i) {
        const double scale = 1.0 / std::sqrt(aff.Dx(i));
        for (int j = 0; j < B.k; ++j)
            triplets.emplace_back(i, B.slot(i, j), B.weight(i, j) * scale);
    }
    Eigen::SparseMatrix<double> A(B.n, B.m);
    A.setFromTriplets(triplets.begin(), triplets.end());
    aff.W = (Eigen::SparseMatrix<double>(A.transpose()) * A).pruned();
    aff.Dl = aff.W * Eigen::VectorXd::Ones(B.m);
    return aff;
}

SpectralBasis top_nontrivial_eigenvectors(const LandmarkAffinity& aff,
                                          const EigensolverConfig& cfg) {
    const Eigen::Index m = aff.W.rows();
    if (m < 3)
        throw std::invalid_argument("top_nontrivial_eigenvectors: need at least 3 landmarks");
    if (cfg.residual_tol <= 0.0)
        throw std::invalid_argument("top_nontrivial_eigenvectors: residual_tol must be > 0");

    Eigen::VectorXd dinv_sqrt(m);
    Eigen::VectorXd v0(m);
    for (Eigen::Index p = 0; p < m; ++p) {
        const double d = aff.Dl(p);
        dinv_sqrt(p) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        v0(p) = d > 0.0 ? std::sqrt(d) : 0.0;
    }
    v0.normalize();

    SpectralBasis basis;
    if (m <= cfg.dense_threshold) {
        Eigen::MatrixXd M = dinv_sqrt.asDiagonal() * Eigen::MatrixXd(aff.W) *
                            dinv_sqrt.asDiagonal();
        M -= v0 * v0.transpose();  // trivial eigenvalue 1 moves to 0; M stays PSD
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("top_nontrivial_eigenvectors: dense solve failed");
        basis.U.resize(m, 2);
        for (int t = 0; t < 2; ++t) {
            Eigen::VectorXd v = es.eigenvectors().col(m - 1 - t);
            fix_column_sign(v);
            basis.U.col(t) = v;
            basis.eigenvalues(t) = es.eigenvalues()(m - 1 - t);
        }
        return basis;
    }

    DeflatedOperator op{aff.W, std::move(dinv_sqrt), std::move(v0)};
    double best_residual = 0.0;
    auto pairs = lanczos_topk(op, 2, cfg, &best_residual);
    basis.U.resize(m, 2);
    for (int t = 0; t < 2; ++t) {
        Eigen::VectorXd v = pairs[static_cast<std::size_t>(t)].vector;
        fix_column_sign(v);
        basis.U.col(t) = v;
        basis.eigenvalues(t) = pairs[static_cast<std::size_t>(t)].value;
    }
    return basis;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> nystrom_project(
    const BipartiteGraph& B, const Eigen::Matrix<double, Eigen::Dynamic, 2>& U) {
    if (U.rows() != B.m)
        throw std::invalid_argument("nystrom_project: U must have one row per landmark");
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(B.n, 2);
    for (int i = 0; i < B.n; ++i) {
        double deg = 0.0;
        Eigen::RowVector2d acc = Eigen::RowVector2d::Zero();
        for (int j = 0; j < B.k; ++j) {
            const double w = B.weight(i, j);
            deg += w;
            acc += w * U.row(B.slot(i, j));
        }
        Z.row(i) = acc / deg;
    }
    return Z;
}

Eigen::Matrix<double, Eigen::Dynamic, 2> scale_init(
    const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z_init, double radius, double jitter,
    std::uint64_t seed) {
    if (!Z_init.allFinite()) throw std::invalid_argument("scale_init: non-finite coordinates");
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z = Z_init;
    bool identical = true;
    for (Eigen::Index i = 1; i < Z.rows() && identical; ++i)
        identical = Z.row(i) == Z.row(0);
    if (identical)
        std::cerr << "[fastumap] warning: degenerate warm start (all rows identical); "
                     "layout is pure jitter\n";
    const double maxabs = Z.cwiseAbs().maxCoeff();
    if (!identical && maxabs > 0.0) Z *= radius / maxabs;
    if (jitter > 0.0) {
        Rng rng(seed);
        for (Eigen::Index i = 0; i < Z.rows(); ++i) {
            Z(i, 0) += jitter * rng.next_gaussian();
            Z(i, 1) += jitter * rng.next_gaussian();
        }
    }
    return Z;
}

std::vector<int> landmark_components(const BipartiteGraph& B, int* n_components) {
    std::vector<int> parent(static_cast<std::size_t>(B.m));
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    };
    for (int i = 0; i < B.n; ++i)
        for (int j = 1; j < B.k; ++j) unite(B.slot(i, 0), B.slot(i, j));

    std::vector<int> comp(static_cast<std::size_t>(B.m));
    std::vector<int> remap(static_cast<std::size_t>(B.m), -1);
    int count = 0;
    for (int p = 0; p < B.m; ++p) {
        const int root = find(p);
        if (remap[static_cast<std::size_t>(root)] < 0) remap[static_cast<std::size_t>(root)] = count++;
        comp[static_cast<std::size_t>(p)] = remap[static_cast<std::size_t>(root)];
    }
    if (n_components) *n_components = count;
    return comp;
}

SpectralInitResult spectral_init(const BipartiteGraph& B, const EigensolverConfig& eig_cfg,
                                 double radius, double jitter, std::uint64_t seed) {
    SpectralInitResult out;
    int n_comp = 0;
    const std::vector<int> comp = landmark_components(B, &n_comp);
    out.n_components = n_comp;

    if (n_comp == 1) {
        const LandmarkAffinity aff = landmark_affinity(B);
        out.basis = top_nontrivial_eigenvectors(aff, eig_cfg);
        out.Z_init = scale_init(nystrom_project(B, out.basis.U), radius, jitter,
                                derive_seed(seed, "init-jitter"));
        return out;
    }

    std::cerr << "[fastumap] warning: landmark graph has " << n_comp
              << " components; embedding the largest spectrally and scattering the rest\n";

    // Every sample's neighbor slots live in one component, so rows partition
    // cleanly along the landmark components.
    std::vector<int> comp_size(static_cast<std::size_t>(n_comp), 0);
    for (int p = 0; p < B.m; ++p) comp_size[static_cast<std::size_t>(comp[static_cast<std::size_t>(p)])]++;
    const int largest = static_cast<int>(std::distance(
        comp_size.begin(), std::max_element(comp_size.begin(), comp_size.end())));

    std::vector<int> slot_map(static_cast<std::size_t>(B.m), -1);
    int m_sub = 0;
    for (int p = 0; p < B.m; ++p)
        if (comp[static_cast<std::size_t>(p)] == largest) slot_map[static_cast<std::size_t>(p)] = m_sub++;

    BipartiteGraph sub;
    sub.m = m_sub;
    sub.k = B.k;
    for (int i = 0; i < B.n; ++i) {
        if (comp[static_cast<std::size_t>(B.slot(i, 0))] != largest) continue;
        for (int j = 0; j < B.k; ++j) {
            sub.indices.push_back(slot_map[static_cast<std::size_t>(B.slot(i, j))]);
            sub.weights.push_back(B.weight(i, j));
        }
        sub.rho.push_back(B.rho[static_cast<std::size_t>(i)]);
        sub.sigma.push_back(B.sigma[static_cast<std::size_t>(i)]);
        sub.degenerate.push_back(B.degenerate[static_cast<std::size_t>(i)]);
        ++sub.n;
    }

    const LandmarkAffinity aff = landmark_affinity(sub);
    out.basis = top_nontrivial_eigenvectors(aff, eig_cfg);

    const double span = std::max(out.basis.U.cwiseAbs().maxCoeff(), 1e-3);
    Rng rng(derive_seed(seed, "component-offsets"));
    std::vector<Eigen::RowVector2d> offsets(static_cast<std::size_t>(n_comp));
    for (int c = 0; c < n_comp; ++c)
        offsets[static_cast<std::size_t>(c)] = Eigen::RowVector2d(
            (rng.next_double() * 2.0 - 1.0) * 4.0 * span,
            (rng.next_double() * 2.0 - 1.0) * 4.0 * span);

    Eigen::Matrix<double, Eigen::Dynamic, 2> U(B.m, 2);
    for (int p = 0; p < B.m; ++p) {
        const int c = comp[static_cast<std::size_t>(p)];
        if (c == largest) {
            U.row(p) = out.basis.U.row(slot_map[static_cast<std::size_t>(p)]);
        } else {
            U.row(p) = offsets[static_cast<std::size_t>(c)] +
                       Eigen::RowVector2d(rng.next_double() - 0.5, rng.next_double() - 0.5) *
                           0.02 * span;
        }
    }
    out.Z_init = scale_init(nystrom_project(B, U), radius, jitter,
                            derive_seed(seed, "init-jitter"));
    return out;
}

}  // namespace fastumap
