#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fastumap/evaluate.hpp"
#include "fastumap/optimizer.hpp"
#include "fastumap/pipeline.hpp"
#include "fastumap/random.hpp"

using namespace fastumap;

namespace {

DirectedEdgeList mutual_edge(double w) {
    DirectedEdgeList edges;
    edges.heads = {0, 1};
    edges.tails = {1, 0};
    edges.weights = {w, w};
    edges.roles = {HeadRole::Data, HeadRole::Landmark};
    return edges;
}

Eigen::MatrixXd gaussian_blobs(int n, int d, int blobs, double separation,
                               std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        const int c = i % blobs;
        for (int j = 0; j < d; ++j)
            X(i, j) = (j == c ? separation : 0.0) + rng.next_gaussian();
    }
    return X;
}

std::vector<int> blob_labels(int n, int blobs) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % blobs;
    return labels;
}

}  // namespace

TEST_CASE("schedule: equal weights fire every epoch") {
    DirectedEdgeList edges;
    edges.heads = {0, 1, 2};
    edges.tails = {1, 2, 0};
    edges.weights = {0.7, 0.7, 0.7};
    edges.roles = {HeadRole::Data, HeadRole::Data, HeadRole::Data};
    const auto counts = build_sampling_schedule(edges, 150);
    for (auto c : counts) CHECK(c == 150);
}

TEST_CASE("schedule: half-weight edges fire about half the epochs") {
    DirectedEdgeList edges;
    edges.heads = {0, 1};
    edges.tails = {1, 0};
    edges.weights = {1.0, 0.5};
    edges.roles = {HeadRole::Data, HeadRole::Data};
    const auto counts = build_sampling_schedule(edges, 200);
    CHECK(counts[0] == 200);
    CHECK(counts[1] == 100);
}

TEST_CASE("schedule: zero-weight edges never fire") {
    DirectedEdgeList edges;
    edges.heads = {0, 1};
    edges.tails = {1, 0};
    edges.weights = {1.0, 0.0};
    edges.roles = {HeadRole::Data, HeadRole::Data};
    const auto counts = build_sampling_schedule(edges, 100);
    CHECK(counts[0] == 100);
    CHECK(counts[1] == 0);
}

TEST_CASE("schedule: events are spread evenly") {
    // firing epochs for a count-50 edge over 200 epochs sit 4 apart
    const int E = 200;
    const std::int64_t c = 50;
    std::vector<int> fire_epochs;
    for (std::int64_t j = 0; j < c; ++j)
        fire_epochs.push_back(static_cast<int>((j * E) / c));
    for (std::size_t j = 1; j < fire_epochs.size(); ++j)
        CHECK(fire_epochs[j] - fire_epochs[j - 1] == 4);
    CHECK(fire_epochs.front() == 0);
    CHECK(fire_epochs.back() == 196);
}

TEST_CASE("two points with one mutual edge collapse toward each other") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(2, 2);
    Z0 << 0.0, 0.0, 4.0, 0.0;
    OptimizerConfig cfg;
    cfg.epochs = 400;
    cfg.negative_rate = 0;
    cfg.seed = 9;
    // contraction regime: with a = b = 1 the symmetric two-point map shrinks
    // the gap whenever 4 lr / (1 + d^2) < 1
    cfg.initial_lr = 0.2;
    KernelParams kp;

    std::vector<double> dists;
    const auto observer = [&](int, const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z) {
        dists.push_back((Z.row(0) - Z.row(1)).norm());
    };
    const Embedding emb = optimize(Z0, mutual_edge(1.0), kp, cfg, observer);
    REQUIRE(dists.size() == 400);
    for (std::size_t i = 1; i < dists.size(); ++i) CHECK(dists[i] <= dists[i - 1] + 1e-12);
    CHECK((emb.Z.row(0) - emb.Z.row(1)).norm() < 0.3);
    CHECK(emb.Z_init == Z0);
}

TEST_CASE("pure repulsion strictly increases the distance") {
    // a point seeing only negative interactions against a fixed partner
    Eigen::Vector2d zu(0.3, 0.1);
    const Eigen::Vector2d fixed(0.0, 0.0);
    double prev = (zu - fixed).norm();
    for (int step = 0; step < 100; ++step) {
        zu += 0.1 * repulsive_gradient(zu, fixed, 1.0, 1.0, 1e-3);
        const double d = (zu - fixed).norm();
        CHECK(d > prev);
        prev = d;
    }
}

TEST_CASE("repulsion-dominated dynamics push a close pair apart") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(2, 2);
    Z0 << 0.0, 0.0, 0.3, 0.0;
    OptimizerConfig cfg;
    cfg.epochs = 60;
    cfg.negative_rate = 5;
    cfg.initial_lr = 0.05;
    cfg.seed = 3;
    cfg.symmetric_updates = false;
    KernelParams kp;
    std::vector<double> dists;
    const auto observer = [&](int, const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z) {
        dists.push_back((Z.row(0) - Z.row(1)).norm());
    };
    optimize(Z0, mutual_edge(1.0), kp, cfg, observer);
    CHECK(dists.back() > (Z0.row(0) - Z0.row(1)).norm());
}

TEST_CASE("deterministic mode is bit-identical") {
    const Eigen::MatrixXd X = gaussian_blobs(90, 5, 3, 8.0, 21);
    PipelineConfig cfg;
    cfg.epochs = 60;
    cfg.seed = 1234;
    const DataMatrix dm{X};
    const PipelineResult a = run_fastumap(dm, cfg);
    const PipelineResult b = run_fastumap(dm, cfg);
    CHECK(a.embedding.Z == b.embedding.Z);
    PipelineConfig other = cfg;
    other.seed = 4321;
    const PipelineResult c = run_fastumap(dm, other);
    CHECK(a.embedding.Z != c.embedding.Z);
}

TEST_CASE("role dispatch counts follow head roles") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(3, 2);
    Z0 << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
    DirectedEdgeList edges;
    edges.heads = {0, 1, 2};
    edges.tails = {1, 0, 0};
    edges.weights = {1.0, 1.0, 1.0};
    edges.roles = {HeadRole::Data, HeadRole::Landmark, HeadRole::Landmark};
    OptimizerConfig cfg;
    cfg.epochs = 10;
    cfg.negative_rate = 2;
    KernelParams kp{1.0, 1.0, 1.5, 0.9};
    OptimizerStats stats;
    optimize(Z0, edges, kp, cfg, nullptr, &stats);
    CHECK(stats.data_role_updates == 10);      // one data-role edge, every epoch
    CHECK(stats.landmark_role_updates == 20);  // two landmark-role edges
}

TEST_CASE("homogeneous mode is invariant to role flags") {
    const Eigen::MatrixXd X = gaussian_blobs(60, 4, 3, 6.0, 33);
    const LandmarkSet L = sample_landmarks(60, 30, 8);
    const BipartiteGraph B = build_membership_graph(X, L, 5);
    const DirectedEdgeList edges = build_edge_list(B, L);

    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(60, 2);
    Rng rng(77);
    for (int i = 0; i < 60; ++i) {
        Z0(i, 0) = rng.next_gaussian();
        Z0(i, 1) = rng.next_gaussian();
    }
    OptimizerConfig cfg;
    cfg.epochs = 40;
    cfg.seed = 2;
    const auto [a, b] = fit_kernel_params(0.1, 1.0);
    const KernelParams kp{a, b, a, b};

    const Embedding base = optimize(Z0, edges, kp, cfg);
    DirectedEdgeList swapped = edges;
    for (auto& role : swapped.roles)
        role = role == HeadRole::Data ? HeadRole::Landmark : HeadRole::Data;
    const Embedding flipped = optimize(Z0, swapped, kp, cfg);
    CHECK(base.Z == flipped.Z);
}

TEST_CASE("hetero mode reacts to role flags") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(2, 2);
    Z0 << 0.0, 0.0, 2.0, 0.0;
    OptimizerConfig cfg;
    cfg.epochs = 5;
    cfg.negative_rate = 0;
    const KernelParams kp{1.0, 1.0, 3.0, 0.7};
    const Embedding base = optimize(Z0, mutual_edge(1.0), kp, cfg);
    DirectedEdgeList swapped = mutual_edge(1.0);
    swapped.roles = {HeadRole::Landmark, HeadRole::Data};
    const Embedding flipped = optimize(Z0, swapped, kp, cfg);
    CHECK(base.Z != flipped.Z);
}

TEST_CASE("translation equivariance") {
    const Eigen::MatrixXd X = gaussian_blobs(50, 4, 2, 6.0, 41);
    const LandmarkSet L = sample_landmarks(50, 25, 4);
    const BipartiteGraph B = build_membership_graph(X, L, 4);
    const DirectedEdgeList edges = build_edge_list(B, L);

    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(50, 2);
    Rng rng(55);
    for (int i = 0; i < 50; ++i) {
        Z0(i, 0) = rng.next_gaussian();
        Z0(i, 1) = rng.next_gaussian();
    }
    OptimizerConfig cfg;
    // forces depend on coordinate differences only, so the trajectory
    // translates; rounding of the shifted sums drifts exponentially under the
    // SGD map, so keep the horizon short and the steps damped
    cfg.epochs = 5;
    cfg.initial_lr = 0.1;
    cfg.seed = 6;
    const KernelParams kp;
    const Embedding base = optimize(Z0, edges, kp, cfg);

    const Eigen::RowVector2d shift(13.5, -4.25);
    Eigen::Matrix<double, Eigen::Dynamic, 2> Zs = Z0;
    Zs.rowwise() += shift;
    const Embedding moved = optimize(Zs, edges, kp, cfg);
    CHECK((moved.Z - (base.Z.rowwise() + shift)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("optimizer rejects bad inputs") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z0(2, 2);
    Z0.setZero();
    const OptimizerConfig cfg;
    const KernelParams kp;
    const DirectedEdgeList empty;
    CHECK_THROWS_AS(optimize(Z0, empty, kp, cfg), std::invalid_argument);
    Z0(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(optimize(Z0, mutual_edge(1.0), kp, cfg), std::invalid_argument);
}

TEST_CASE("well-separated blobs embed with high knn accuracy") {
    const int n = 60;
    const Eigen::MatrixXd X = gaussian_blobs(n, 6, 3, 12.0, 71);
    const std::vector<int> labels = blob_labels(n, 3);
    PipelineConfig cfg;
    cfg.epochs = 500;
    cfg.seed = 42;
    const PipelineResult res = run_fastumap(DataMatrix{X}, cfg);
    CHECK(res.embedding.Z.allFinite());
    const QualityReport rep = knn_accuracy(res.embedding.Z, labels, 5, 5, 42);
    CHECK(rep.knn_accuracy >= 90.0);
}

TEST_CASE("parallel mode stays finite and separates blobs") {
    const int n = 120;
    const Eigen::MatrixXd X = gaussian_blobs(n, 6, 3, 12.0, 91);
    const std::vector<int> labels = blob_labels(n, 3);
    PipelineConfig cfg;
    cfg.epochs = 300;
    cfg.deterministic = false;
    cfg.threads = 2;
    cfg.seed = 7;
    const PipelineResult res = run_fastumap(DataMatrix{X}, cfg);
    CHECK(res.embedding.Z.allFinite());
    const QualityReport rep = knn_accuracy(res.embedding.Z, labels, 5, 5, 42);
    CHECK(rep.knn_accuracy >= 85.0);
}

TEST_CASE("pipeline config validation") {
    PipelineConfig cfg;
    cfg.landmarks = 10;
    cfg.landmark_ratio = 0.5;
    CHECK_THROWS_AS(cfg.resolve_landmarks(100), std::invalid_argument);
    cfg.landmark_ratio.reset();
    CHECK(cfg.resolve_landmarks(100) == 10);
    cfg.landmarks.reset();
    cfg.landmark_ratio = 0.5;
    CHECK(cfg.resolve_landmarks(101) == 50);
    cfg.landmark_ratio.reset();
    CHECK(cfg.resolve_landmarks(100) == 50);   // default budget 0.5 n
    CHECK(cfg.resolve_epochs(9999) == 500);
    CHECK(cfg.resolve_epochs(10000) == 200);
}
