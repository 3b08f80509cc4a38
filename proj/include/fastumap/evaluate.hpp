#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fastumap/dataset.hpp"
#include "fastumap/pipeline.hpp"

namespace fastumap {

/// kNN-accuracy cross-validation summary (percentages).
struct QualityReport {
    double knn_accuracy = 0.0;
    int k = 5;
    int folds = 5;
    std::vector<double> per_fold;
    std::uint64_t seed = 0;
};

struct SweepPoint {
    double r = 0.0;
    int m = 0;
    double knn_accuracy = 0.0;
    double total_s = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
};

struct AblationCell {
    InitMode init;
    ForceMode force;
    double knn_accuracy = 0.0;
    double total_s = 0.0;
};

struct TracePoint {
    InitMode init;
    double epoch_fraction = 0.0;
    int epochs_done = 0;
    double knn_accuracy = 0.0;
};

struct AblationResult {
    std::vector<AblationCell> cells;  // {spectral, random} x {hetero, homo}
    std::vector<TracePoint> trace;    // accuracy vs epoch, spectral vs random
};

struct EquivalenceReport {
    std::int64_t n = 0;
    int k = 0;
    std::uint64_t seed = 0;
    std::int64_t reference_edges = 0;
    std::int64_t symmetric_difference_edges = 0;
    double max_weight_delta = 0.0;
    double max_rho_delta = 0.0;
};

struct BenchmarkEntry {
    std::string name;
    std::string path;
    DataFormat format = DataFormat::Csv;
    std::string label_col;
};

struct BenchmarkRow {
    std::string dataset;
    std::int64_t n = 0;
    int d = 0;
    int m = 0;
    double r = 0.0;
    int k = 0;
    int epochs = 0;
    std::uint64_t seed = 0;
    double knn_acc = 0.0;
    StageTimings timings;
};

/// Stratified fold assignment (one id in [0, folds) per sample). Classes with
/// fewer members than folds relax stratification with a warning.
std::vector<int> make_stratified_folds(const std::vector<int>& labels, int folds,
                                       std::uint64_t seed);

/// Stratified 5-fold CV: held-out points are classified by unweighted
/// majority vote of their k nearest in-fold neighbors in the embedding;
/// vote ties break by smaller summed distance, then smaller label.
QualityReport knn_accuracy(const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z,
                           const std::vector<int>& labels, int k = 5, int folds = 5,
                           std::uint64_t seed = 42);

/// Pipeline run with monotonic-clock stage timing. With repeats = 3 the
/// warm-cache protocol reports per-stage medians over three identical runs.
std::pair<Embedding, StageTimings> timed_run(const DataMatrix& X, const PipelineConfig& cfg,
                                             int repeats = 1);

/// One full pipeline run per landmark ratio, shared seed.
SweepResult r_sweep(const DataMatrix& X, const std::vector<int>& labels,
                    const std::vector<double>& ratios, const PipelineConfig& cfg);

/// {spectral, random} x {hetero, homo} grid with shared seeds, plus an
/// accuracy-vs-epoch trace for spectral vs random initialization.
AblationResult ablation_grid(const DataMatrix& X, const std::vector<int>& labels,
                             const PipelineConfig& cfg,
                             const std::vector<double>& trace_fractions = {0.25, 0.5, 0.75,
                                                                           1.0});

/// m = n with tied kernel parameters and fuzzy-union mode must reproduce the
/// full kNN fuzzy graph built directly over all points: reports the edge
/// symmetric difference and the largest membership deviation.
EquivalenceReport equivalence_check(const DataMatrix& X, int k, std::uint64_t seed);

/// Apply the capped-adaptive budgets to every available dataset, run
/// timed_run + knn_accuracy, and collect one row per dataset. Missing files
/// are skipped with a warning.
std::vector<BenchmarkRow> benchmark_suite(const std::vector<BenchmarkEntry>& datasets,
                                          const PipelineConfig& cfg,
                                          const PreprocessConfig& pre, int repeats = 1);

}  // namespace fastumap
