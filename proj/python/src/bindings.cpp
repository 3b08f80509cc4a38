#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fastumap/evaluate.hpp"
#include "fastumap/pipeline.hpp"

namespace py = pybind11;
using namespace fastumap;

namespace {

PipelineConfig make_config(std::optional<int> landmarks, std::optional<double> landmark_ratio,
                           int landmark_cap, int n_neighbors, const std::string& init,
                           const std::string& force_mode, std::optional<int> epochs,
                           double learning_rate, int negative_rate, double min_dist_data,
                           double min_dist_landmark, double spread_data,
                           double spread_landmark, bool deterministic, int threads,
                           std::uint64_t seed) {
    PipelineConfig cfg;
    cfg.landmarks = landmarks;
    cfg.landmark_ratio = landmark_ratio;
    cfg.landmark_cap = landmark_cap;
    cfg.n_neighbors = n_neighbors;
    if (init == "spectral")
        cfg.init = InitMode::Spectral;
    else if (init == "random")
        cfg.init = InitMode::Random;
    else
        throw std::invalid_argument("init must be 'spectral' or 'random'");
    if (force_mode == "hetero")
        cfg.force_mode = ForceMode::Hetero;
    else if (force_mode == "homo")
        cfg.force_mode = ForceMode::Homo;
    else
        throw std::invalid_argument("force_mode must be 'hetero' or 'homo'");
    cfg.epochs = epochs;
    cfg.initial_lr = learning_rate;
    cfg.negative_rate = negative_rate;
    cfg.min_dist_data = min_dist_data;
    cfg.min_dist_landmark = min_dist_landmark;
    cfg.spread_data = spread_data;
    cfg.spread_landmark = spread_landmark;
    cfg.deterministic = deterministic;
    cfg.threads = threads;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "FastUMAP core: bipartite landmark graph, spectral warm start, SGD refinement";

    m.def(
        "run_pipeline",
        [](const Eigen::MatrixXd& X, std::optional<int> landmarks,
           std::optional<double> landmark_ratio, int landmark_cap, int n_neighbors,
           const std::string& init, const std::string& force_mode, std::optional<int> epochs,
           double learning_rate, int negative_rate, double min_dist_data,
           double min_dist_landmark, double spread_data, double spread_landmark,
           bool deterministic, int threads, std::uint64_t seed) {
            const auto cfg = make_config(landmarks, landmark_ratio, landmark_cap, n_neighbors,
                                         init, force_mode, epochs, learning_rate, negative_rate,
                                         min_dist_data, min_dist_landmark, spread_data,
                                         spread_landmark, deterministic, threads, seed);
            PipelineResult res;
            {
                py::gil_scoped_release release;
                res = run_fastumap(DataMatrix{X}, cfg);
            }
            py::dict timings;
            timings["graph_s"] = res.timings.graph_s;
            timings["spectral_s"] = res.timings.spectral_s;
            timings["sgd_s"] = res.timings.sgd_s;
            timings["total_s"] = res.timings.total_s;
            py::dict out;
            out["embedding"] = res.embedding.Z;
            out["init"] = res.embedding.Z_init;
            out["m"] = res.timings.m;
            out["epochs"] = res.timings.epochs;
            out["timings"] = timings;
            return out;
        },
        py::arg("X"), py::kw_only(), py::arg("landmarks") = std::nullopt,
        py::arg("landmark_ratio") = std::nullopt, py::arg("landmark_cap") = 5000,
        py::arg("n_neighbors") = 15, py::arg("init") = "spectral",
        py::arg("force_mode") = "hetero", py::arg("epochs") = std::nullopt,
        py::arg("learning_rate") = 1.0, py::arg("negative_rate") = 5,
        py::arg("min_dist_data") = 0.1, py::arg("min_dist_landmark") = 0.2,
        py::arg("spread_data") = 1.0, py::arg("spread_landmark") = 1.0,
        py::arg("deterministic") = true, py::arg("threads") = 1, py::arg("seed") = 42,
        "Run the full pipeline on a preprocessed (n, d) matrix; returns embedding, "
        "warm start, landmark count, and stage timings.");

    m.def(
        "preprocess",
        [](const Eigen::MatrixXd& X, int pca_target, int trigger_dim, std::int64_t trigger_n) {
            PreprocessConfig cfg;
            cfg.pca_target = pca_target;
            cfg.trigger_dim = trigger_dim;
            cfg.trigger_n = trigger_n;
            RawDataset ds;
            ds.features = X;
            return preprocess(ds, cfg).values;
        },
        py::arg("X"), py::arg("pca_target") = 50, py::arg("trigger_dim") = 50,
        py::arg("trigger_n") = 5000,
        "Min-max normalization followed by conditional PCA.");

    m.def("default_landmark_budget", &default_landmark_budget, py::arg("n"),
          py::arg("cap") = 5000);

    m.def(
        "sample_landmarks",
        [](std::int64_t n, int m, std::uint64_t seed) {
            return sample_landmarks(n, m, seed).indices;
        },
        py::arg("n"), py::arg("m"), py::arg("seed") = 42);

    m.def("fit_kernel_params", &fit_kernel_params, py::arg("min_dist"), py::arg("spread"));

    m.def(
        "knn_accuracy",
        [](const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z, const std::vector<int>& labels,
           int k, int folds, std::uint64_t seed) {
            const QualityReport rep = knn_accuracy(Z, labels, k, folds, seed);
            py::dict out;
            out["accuracy"] = rep.knn_accuracy;
            out["per_fold"] = rep.per_fold;
            out["k"] = rep.k;
            out["folds"] = rep.folds;
            return out;
        },
        py::arg("Z"), py::arg("labels"), py::arg("k") = 5, py::arg("folds") = 5,
        py::arg("seed") = 42,
        "Stratified k-fold kNN classification accuracy in the embedding (percent).");

    m.def(
        "equivalence_check",
        [](const Eigen::MatrixXd& X, int k, std::uint64_t seed) {
            const EquivalenceReport rep = equivalence_check(DataMatrix{X}, k, seed);
            py::dict out;
            out["n"] = rep.n;
            out["k"] = rep.k;
            out["reference_edges"] = rep.reference_edges;
            out["symmetric_difference_edges"] = rep.symmetric_difference_edges;
            out["max_weight_delta"] = rep.max_weight_delta;
            out["max_rho_delta"] = rep.max_rho_delta;
            return out;
        },
        py::arg("X"), py::arg("k") = 10, py::arg("seed") = 42,
        "Check that m = n with fuzzy-union mode reproduces the full kNN fuzzy graph.");

    m.attr("__version__") = "0.1.0";
}
