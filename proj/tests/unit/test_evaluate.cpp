#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "fastumap/evaluate.hpp"
#include "fastumap/random.hpp"

using namespace fastumap;

namespace {

Eigen::MatrixXd gaussian_blobs(int n, int d, int blobs, double separation,
                               std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd X(n, d);
    for (int i = 0; i < n; ++i) {
        const int c = i % blobs;
        for (int j = 0; j < d; ++j)
            X(i, j) = (j == c % d ? separation : 0.0) + rng.next_gaussian();
    }
    return X;
}

std::vector<int> blob_labels(int n, int blobs) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i % blobs;
    return labels;
}

// exhaustive oracle: same fold assignment, independent vote computation
double oracle_accuracy(const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z,
                       const std::vector<int>& labels, const std::vector<int>& fold, int k,
                       int folds) {
    const auto n = Z.rows();
    const int n_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    std::vector<double> per_fold;
    for (int f = 0; f < folds; ++f) {
        int correct = 0, total = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (fold[static_cast<std::size_t>(i)] != f) continue;
            ++total;
            std::vector<std::pair<double, int>> all;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (fold[static_cast<std::size_t>(j)] == f) continue;
                all.emplace_back((Z.row(i) - Z.row(j)).norm(), static_cast<int>(j));
            }
            std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
                return a.first < b.first || (a.first == b.first && a.second < b.second);
            });
            std::vector<int> votes(static_cast<std::size_t>(n_classes), 0);
            std::vector<double> dsum(static_cast<std::size_t>(n_classes), 0.0);
            for (int t = 0; t < k; ++t) {
                votes[static_cast<std::size_t>(labels[static_cast<std::size_t>(all[static_cast<std::size_t>(t)].second)])]++;
                dsum[static_cast<std::size_t>(labels[static_cast<std::size_t>(all[static_cast<std::size_t>(t)].second)])] +=
                    all[static_cast<std::size_t>(t)].first;
            }
            int best = -1;
            for (int c = 0; c < n_classes; ++c) {
                if (votes[static_cast<std::size_t>(c)] == 0) continue;
                if (best < 0 || votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best)] ||
                    (votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best)] &&
                     dsum[static_cast<std::size_t>(c)] < dsum[static_cast<std::size_t>(best)]))
                    best = c;
            }
            if (best == labels[static_cast<std::size_t>(i)]) ++correct;
        }
        per_fold.push_back(100.0 * correct / std::max(1, total));
    }
    return std::accumulate(per_fold.begin(), per_fold.end(), 0.0) / per_fold.size();
}

}  // namespace

TEST_CASE("knn_accuracy is 100 on perfectly separated clusters") {
    const int n = 60;
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng rng(1);
    for (int i = 0; i < n; ++i) {
        const int c = i % 2;
        labels[static_cast<std::size_t>(i)] = c;
        Z(i, 0) = 100.0 * c + rng.next_gaussian() * 0.01;
        Z(i, 1) = rng.next_gaussian() * 0.01;
    }
    const QualityReport rep = knn_accuracy(Z, labels, 5, 5, 3);
    CHECK(rep.knn_accuracy == doctest::Approx(100.0));
    REQUIRE(rep.per_fold.size() == 5);
    const double mean =
        std::accumulate(rep.per_fold.begin(), rep.per_fold.end(), 0.0) / 5.0;
    CHECK(rep.knn_accuracy == doctest::Approx(mean).epsilon(1e-9));
}

TEST_CASE("knn_accuracy near 50 under a permutation null") {
    // labels carry no geometric information; accuracy sits near chance level
    const int n = 2000;
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng rng(99);
    for (int i = 0; i < n; ++i) {
        Z(i, 0) = rng.next_gaussian();
        Z(i, 1) = rng.next_gaussian();
        labels[static_cast<std::size_t>(i)] = i % 2;
    }
    // shuffle labels independently of coordinates
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(i + 1)));
        std::swap(labels[static_cast<std::size_t>(i)], labels[static_cast<std::size_t>(j)]);
    }
    const QualityReport rep = knn_accuracy(Z, labels, 5, 5, 7);
    CHECK(rep.knn_accuracy >= 47.0);
    CHECK(rep.knn_accuracy <= 53.0);
}

TEST_CASE("knn_accuracy matches the exhaustive oracle on a fixed fixture") {
    const int n = 20;
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(n, 2);
    Rng rng(13);
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = i % 2;
        Z(i, 0) = (i % 2) * 1.5 + rng.next_gaussian();
        Z(i, 1) = rng.next_gaussian();
    }
    const std::uint64_t seed = 5;
    const std::vector<int> fold = make_stratified_folds(labels, 5, seed);
    const double expect = oracle_accuracy(Z, labels, fold, 5, 5);
    const QualityReport rep = knn_accuracy(Z, labels, 5, 5, seed);
    CHECK(rep.knn_accuracy == doctest::Approx(expect).epsilon(1e-12));
    // frozen golden for this fixture (computed by the oracle above)
    CHECK(rep.knn_accuracy == doctest::Approx(85.0).epsilon(1e-9));
}

TEST_CASE("knn_accuracy is invariant under rigid motion and uniform scale") {
    const int n = 150;
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(n, 2);
    std::vector<int> labels(static_cast<std::size_t>(n));
    Rng rng(31);
    for (int i = 0; i < n; ++i) {
        labels[static_cast<std::size_t>(i)] = i % 3;
        Z(i, 0) = (i % 3) * 2.0 + rng.next_gaussian() * 0.6;
        Z(i, 1) = rng.next_gaussian() * 0.6;
    }
    const QualityReport base = knn_accuracy(Z, labels, 5, 5, 11);

    const double theta = 0.83;
    Eigen::Matrix2d R;
    R << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix<double, Eigen::Dynamic, 2> Zt = (3.7 * Z * R.transpose());
    Zt.rowwise() += Eigen::RowVector2d(42.0, -17.0);
    const QualityReport moved = knn_accuracy(Zt, labels, 5, 5, 11);

    REQUIRE(base.per_fold.size() == moved.per_fold.size());
    for (std::size_t f = 0; f < base.per_fold.size(); ++f)
        CHECK(base.per_fold[f] == doctest::Approx(moved.per_fold[f]).epsilon(1e-12));
}

TEST_CASE("knn_accuracy input validation") {
    Eigen::Matrix<double, Eigen::Dynamic, 2> Z(4, 2);
    Z.setRandom();
    const std::vector<int> labels = {0, 1, 0, 1};
    CHECK_THROWS_AS(knn_accuracy(Z, labels, 5, 5, 1), std::invalid_argument);
    const std::vector<int> short_labels = {0, 1};
    CHECK_THROWS_AS(knn_accuracy(Z, short_labels, 2, 2, 1), std::invalid_argument);
}

TEST_CASE("timed_run stage times are consistent") {
    const Eigen::MatrixXd X = gaussian_blobs(400, 6, 4, 8.0, 17);
    PipelineConfig cfg;
    cfg.epochs = 100;
    cfg.seed = 42;
    const auto [embedding, t] = timed_run(DataMatrix{X}, cfg, 1);
    CHECK(t.graph_s >= 0.0);
    CHECK(t.spectral_s >= 0.0);
    CHECK(t.sgd_s >= 0.0);
    const double stage_sum = t.graph_s + t.spectral_s + t.sgd_s;
    CHECK(t.total_s >= stage_sum - 1e-9);
    CHECK(t.total_s <= stage_sum * 1.10 + 0.05);
    CHECK(t.n == 400);
    CHECK(t.epochs == 100);
}

TEST_CASE("timed_run: doubling epochs roughly doubles the sgd stage") {
    // sized so the sgd stage dominates measurement noise
    const Eigen::MatrixXd X = gaussian_blobs(1500, 8, 5, 8.0, 23);
    PipelineConfig a;
    a.epochs = 300;
    a.seed = 42;
    PipelineConfig b = a;
    b.epochs = 600;
    const auto [ea, ta] = timed_run(DataMatrix{X}, a, 3);
    const auto [eb, tb] = timed_run(DataMatrix{X}, b, 3);
    const double ratio = tb.sgd_s / ta.sgd_s;
    CHECK(ratio >= 1.6);
    CHECK(ratio <= 2.4);
}

TEST_CASE("timed_run median is order-invariant by construction") {
    std::vector<double> times = {0.3, 0.1, 0.2};
    std::sort(times.begin(), times.end());
    CHECK(times[1] == 0.2);
    std::vector<double> permuted = {0.2, 0.3, 0.1};
    std::sort(permuted.begin(), permuted.end());
    CHECK(permuted[1] == 0.2);
}

TEST_CASE("r_sweep runs one pipeline per ratio and stays reproducible") {
    const int n = 300;
    const Eigen::MatrixXd X = gaussian_blobs(n, 6, 10, 10.0, 29);
    const std::vector<int> labels = blob_labels(n, 10);
    PipelineConfig cfg;
    cfg.epochs = 150;
    cfg.seed = 42;
    const std::vector<double> ratios = {0.05, 0.7};
    const SweepResult a = r_sweep(DataMatrix{X}, labels, ratios, cfg);
    REQUIRE(a.points.size() == 2);
    CHECK(a.points[0].m == 15);
    CHECK(a.points[1].m == 210);
    // accuracy trend with slack for SGD noise
    CHECK(a.points[1].knn_accuracy >= a.points[0].knn_accuracy - 1.0);

    const SweepResult b = r_sweep(DataMatrix{X}, labels, ratios, cfg);
    for (std::size_t i = 0; i < a.points.size(); ++i)
        CHECK(a.points[i].knn_accuracy == b.points[i].knn_accuracy);
}

TEST_CASE("r_sweep validates ratios") {
    const Eigen::MatrixXd X = gaussian_blobs(50, 4, 2, 8.0, 3);
    const std::vector<int> labels = blob_labels(50, 2);
    PipelineConfig cfg;
    cfg.epochs = 10;
    CHECK_THROWS_AS(r_sweep(DataMatrix{X}, labels, {0.5, 0.5}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(r_sweep(DataMatrix{X}, labels, {0.0, 0.5}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(r_sweep(DataMatrix{X}, labels, {1.5}, cfg), std::invalid_argument);
}

TEST_CASE("ablation_grid covers the four cells and traces both inits") {
    const int n = 240;
    const Eigen::MatrixXd X = gaussian_blobs(n, 6, 4, 9.0, 37);
    const std::vector<int> labels = blob_labels(n, 4);
    PipelineConfig cfg;
    cfg.epochs = 120;
    cfg.seed = 42;
    const AblationResult grid = ablation_grid(DataMatrix{X}, labels, cfg);
    REQUIRE(grid.cells.size() == 4);
    int spectral_cells = 0, hetero_cells = 0;
    for (const auto& cell : grid.cells) {
        if (cell.init == InitMode::Spectral) ++spectral_cells;
        if (cell.force == ForceMode::Hetero) ++hetero_cells;
        CHECK(cell.knn_accuracy >= 0.0);
        CHECK(cell.total_s > 0.0);
    }
    CHECK(spectral_cells == 2);
    CHECK(hetero_cells == 2);
    // trace: 4 fractions x {spectral, random}
    REQUIRE(grid.trace.size() == 8);
    CHECK(grid.trace.front().epochs_done == 30);
    CHECK(grid.trace[3].epochs_done == 120);
}

TEST_CASE("homo and hetero collapse when parameters are tied") {
    const int n = 80;
    const Eigen::MatrixXd X = gaussian_blobs(n, 4, 2, 8.0, 43);
    PipelineConfig homo;
    homo.epochs = 50;
    homo.force_mode = ForceMode::Homo;
    homo.seed = 42;
    PipelineConfig tied = homo;
    tied.force_mode = ForceMode::Hetero;
    tied.min_dist_landmark = homo.min_dist_data;
    tied.spread_landmark = homo.spread_data;
    const PipelineResult a = run_fastumap(DataMatrix{X}, homo);
    const PipelineResult b = run_fastumap(DataMatrix{X}, tied);
    CHECK(a.embedding.Z == b.embedding.Z);
}

TEST_CASE("equivalence_check: m = n graph matches the direct reference") {
    const Eigen::MatrixXd X = gaussian_blobs(300, 5, 3, 6.0, 51);
    const EquivalenceReport rep = equivalence_check(DataMatrix{X}, 10, 42);
    CHECK(rep.symmetric_difference_edges == 0);
    CHECK(rep.max_weight_delta <= 1e-6);
    CHECK(rep.max_rho_delta <= 1e-12);
    CHECK(rep.reference_edges > 0);
}

TEST_CASE("equivalence_check rejects degenerate configurations") {
    const Eigen::MatrixXd X = gaussian_blobs(50, 4, 2, 6.0, 61);
    CHECK_THROWS_AS(equivalence_check(DataMatrix{X}, 1, 42), std::invalid_argument);
    const Eigen::MatrixXd big = gaussian_blobs(2100, 2, 2, 6.0, 62);
    CHECK_THROWS_AS(equivalence_check(DataMatrix{big}, 10, 42), std::invalid_argument);
}

TEST_CASE("benchmark_suite: empty list gives an empty report") {
    PipelineConfig cfg;
    const auto rows = benchmark_suite({}, cfg, PreprocessConfig{}, 1);
    CHECK(rows.empty());
}

TEST_CASE("benchmark_suite skips missing files") {
    PipelineConfig cfg;
    std::vector<BenchmarkEntry> entries;
    entries.push_back({"ghost", "/nonexistent/ghost.csv", DataFormat::Csv, "label"});
    const auto rows = benchmark_suite(entries, cfg, PreprocessConfig{}, 1);
    CHECK(rows.empty());
}
