#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fastumap/evaluate.hpp"
#include "fastumap/pipeline.hpp"
#include "fastumap/random.hpp"
#include "fastumap/report_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string data_path;
    std::string format = "csv";
    std::string label_col;
    bool no_labels = false;

    int pca_target = 50;
    int pca_trigger_dim = 50;
    std::int64_t pca_trigger_n = 5000;

    std::optional<int> landmarks;
    std::optional<double> landmark_ratio;
    int landmark_cap = 5000;
    int n_neighbors = 15;

    std::string init = "spectral";
    double eig_tol = 1e-8;
    int eig_max_iter = 300;
    double init_radius = 10.0;
    double init_jitter = 1e-4;

    std::optional<int> epochs;
    double lr = 1.0;
    int neg_rate = 5;
    double min_dist_data = 0.1;
    double spread_data = 1.0;
    double min_dist_landmark = 0.2;
    double spread_landmark = 1.0;
    std::string force_mode = "hetero";
    double clip = 4.0;
    double eps = 1e-3;
    bool deterministic = true;

    std::uint64_t seed = 42;
    int threads = 0;  // 0 = env/default
    std::string out_dir = ".";
};

void add_common_options(CLI::App* cmd, CommonOpts& o, bool needs_data) {
    auto* data = cmd->add_option("--data", o.data_path, "Input dataset file");
    if (needs_data) data->required();
    cmd->add_option("--format", o.format, "Input format")
        ->check(CLI::IsMember({"csv", "f32"}))
        ->capture_default_str();
    cmd->add_option("--label-col", o.label_col, "CSV label column name");
    cmd->add_flag("--no-labels", o.no_labels, "Treat every CSV column as a feature");

    cmd->add_option("--pca-target", o.pca_target)->capture_default_str();
    cmd->add_option("--pca-trigger-dim", o.pca_trigger_dim)->capture_default_str();
    cmd->add_option("--pca-trigger-n", o.pca_trigger_n)->capture_default_str();

    auto* m_opt = cmd->add_option("--landmarks", [&o](const CLI::results_t& r) {
        o.landmarks = std::stoi(r[0]);
        return true;
    }, "Explicit landmark count m");
    auto* r_opt = cmd->add_option("--landmark-ratio", [&o](const CLI::results_t& r) {
        o.landmark_ratio = std::stod(r[0]);
        return true;
    }, "Landmark ratio r = m/n in (0, 1]");
    m_opt->excludes(r_opt);
    r_opt->excludes(m_opt);
    cmd->add_option("--landmark-cap", o.landmark_cap,
                    "Cap applied by the default budget rule")
        ->capture_default_str();
    cmd->add_option("--n-neighbors", o.n_neighbors, "Landmark neighbors per sample")
        ->capture_default_str();

    cmd->add_option("--init", o.init, "Warm-start mode")
        ->check(CLI::IsMember({"spectral", "random"}))
        ->capture_default_str();
    cmd->add_option("--eig-tol", o.eig_tol)->capture_default_str();
    cmd->add_option("--eig-max-iter", o.eig_max_iter)->capture_default_str();
    cmd->add_option("--init-radius", o.init_radius)->capture_default_str();
    cmd->add_option("--init-jitter", o.init_jitter)->capture_default_str();

    cmd->add_option("--epochs", [&o](const CLI::results_t& r) {
        o.epochs = std::stoi(r[0]);
        return true;
    }, "SGD epochs (default 200 for n >= 10000, else 500)");
    cmd->add_option("--lr", o.lr, "Initial learning rate")->capture_default_str();
    cmd->add_option("--neg-rate", o.neg_rate, "Negative samples per positive event")
        ->capture_default_str();
    cmd->add_option("--min-dist-data", o.min_dist_data)->capture_default_str();
    cmd->add_option("--spread-data", o.spread_data)->capture_default_str();
    cmd->add_option("--min-dist-landmark", o.min_dist_landmark)->capture_default_str();
    cmd->add_option("--spread-landmark", o.spread_landmark)->capture_default_str();
    cmd->add_option("--force-mode", o.force_mode)
        ->check(CLI::IsMember({"hetero", "homo"}))
        ->capture_default_str();
    cmd->add_option("--clip", o.clip)->capture_default_str();
    cmd->add_option("--eps", o.eps)->capture_default_str();
    cmd->add_flag("--deterministic,!--parallel", o.deterministic,
                  "Sequential seeded event order (default) vs lock-free parallel SGD");

    cmd->add_option("--seed", o.seed, "Master seed; all stages derive from it")
        ->capture_default_str();
    cmd->add_option("--threads", o.threads, "Worker threads (0 = FASTUMAP_THREADS or 1)")
        ->capture_default_str();
    cmd->add_option("--output-dir,-o", o.out_dir, "Output directory")->capture_default_str();
}

int resolve_threads(const CommonOpts& o) {
    if (o.threads > 0) return o.threads;
    if (const char* env = std::getenv("FASTUMAP_THREADS")) {
        const int t = std::atoi(env);
        if (t > 0) return t;
    }
    return 1;
}

fastumap::PipelineConfig pipeline_config(const CommonOpts& o) {
    fastumap::PipelineConfig cfg;
    cfg.landmarks = o.landmarks;
    cfg.landmark_ratio = o.landmark_ratio;
    cfg.landmark_cap = o.landmark_cap;
    cfg.n_neighbors = o.n_neighbors;
    cfg.init = o.init == "random" ? fastumap::InitMode::Random : fastumap::InitMode::Spectral;
    cfg.eig.residual_tol = o.eig_tol;
    cfg.eig.max_iter = o.eig_max_iter;
    cfg.init_radius = o.init_radius;
    cfg.init_jitter = o.init_jitter;
    cfg.force_mode =
        o.force_mode == "homo" ? fastumap::ForceMode::Homo : fastumap::ForceMode::Hetero;
    cfg.min_dist_data = o.min_dist_data;
    cfg.spread_data = o.spread_data;
    cfg.min_dist_landmark = o.min_dist_landmark;
    cfg.spread_landmark = o.spread_landmark;
    cfg.epochs = o.epochs;
    cfg.initial_lr = o.lr;
    cfg.negative_rate = o.neg_rate;
    cfg.clip = o.clip;
    cfg.eps = o.eps;
    cfg.deterministic = o.deterministic;
    cfg.threads = resolve_threads(o);
    cfg.seed = o.seed;
    return cfg;
}

fastumap::PreprocessConfig preprocess_config(const CommonOpts& o) {
    fastumap::PreprocessConfig pre;
    pre.pca_target = o.pca_target;
    pre.trigger_dim = o.pca_trigger_dim;
    pre.trigger_n = o.pca_trigger_n;
    pre.seed = o.seed;
    return pre;
}

std::pair<fastumap::RawDataset, fastumap::DataMatrix> load_and_preprocess(const CommonOpts& o) {
    const auto format =
        o.format == "f32" ? fastumap::DataFormat::BinaryMatrix : fastumap::DataFormat::Csv;
    fastumap::RawDataset raw = fastumap::load_dataset(
        o.data_path, format, o.no_labels ? std::string{} : o.label_col);
    fastumap::DataMatrix X = fastumap::preprocess(raw, preprocess_config(o));
    return {std::move(raw), std::move(X)};
}

std::string resolved_meta(const CommonOpts& o, const fastumap::DataMatrix& X,
                          const fastumap::PipelineConfig& cfg) {
    json j = json::parse(cfg.fingerprint(X.n()));
    j["data"] = o.data_path;
    j["format"] = o.format;
    j["label_col"] = o.label_col;
    j["d"] = static_cast<int>(X.dim());
    j["pca_target"] = o.pca_target;
    j["pca_trigger_dim"] = o.pca_trigger_dim;
    j["pca_trigger_n"] = o.pca_trigger_n;
    return j.dump();
}

int cmd_embed(const CommonOpts& o) {
    auto [raw, X] = load_and_preprocess(o);
    const auto cfg = pipeline_config(o);
    fastumap::PipelineResult res = fastumap::run_fastumap(X, cfg);

    fs::create_directories(o.out_dir);
    // coordinates carry only the re-derivable config: identical runs must
    // produce byte-identical files, so timings go to meta.json alone
    const std::string config_meta = resolved_meta(o, X, cfg);
    fastumap::write_coordinates_csv((fs::path(o.out_dir) / "coordinates.csv").string(),
                                    res.embedding.Z, config_meta);
    json meta = json::parse(config_meta);
    meta["timings"] = {{"graph_s", res.timings.graph_s},
                       {"spectral_s", res.timings.spectral_s},
                       {"sgd_s", res.timings.sgd_s},
                       {"total_s", res.timings.total_s}};
    fastumap::write_meta_json((fs::path(o.out_dir) / "meta.json").string(), meta.dump());
    std::cout << "embedded " << X.n() << " points with m=" << res.timings.m << " landmarks in "
              << res.timings.total_s << " s\n";
    return 0;
}

int cmd_bench(const CommonOpts& o, const std::string& manifest_path, int repeats) {
    std::ifstream in(manifest_path);
    if (!in) throw std::invalid_argument("cannot open manifest: " + manifest_path);
    const json manifest = json::parse(in);

    std::vector<fastumap::BenchmarkEntry> entries;
    const fs::path base = fs::path(manifest_path).parent_path();
    for (const auto& item : manifest) {
        fastumap::BenchmarkEntry e;
        e.name = item.at("name").get<std::string>();
        fs::path p = item.at("path").get<std::string>();
        e.path = (p.is_relative() ? base / p : p).string();
        e.format = item.value("format", "csv") == "f32" ? fastumap::DataFormat::BinaryMatrix
                                                        : fastumap::DataFormat::Csv;
        e.label_col = item.value("label_col", "");
        entries.push_back(e);
    }

    const auto cfg = pipeline_config(o);
    const auto rows = fastumap::benchmark_suite(entries, cfg, preprocess_config(o), repeats);

    fs::create_directories(o.out_dir);
    json meta;
    meta["manifest"] = manifest_path;
    meta["repeats"] = repeats;
    meta["seed"] = o.seed;
    meta["n_neighbors"] = o.n_neighbors;
    meta["landmark_cap"] = o.landmark_cap;
    fastumap::write_results_csv((fs::path(o.out_dir) / "results.csv").string(), rows,
                                meta.dump());
    fastumap::write_results_json((fs::path(o.out_dir) / "results.json").string(), rows,
                                 meta.dump());
    std::cout << "benchmarked " << rows.size() << " of " << entries.size() << " datasets\n";
    return 0;
}

int cmd_sweep(const CommonOpts& o, std::vector<double> ratios) {
    auto [raw, X] = load_and_preprocess(o);
    if (!raw.labels) throw std::invalid_argument("sweep requires labels for kNN accuracy");
    const auto cfg = pipeline_config(o);
    const auto sweep = fastumap::r_sweep(X, *raw.labels, ratios, cfg);

    fs::create_directories(o.out_dir);
    fastumap::write_sweep_csv((fs::path(o.out_dir) / "sweep.csv").string(), sweep,
                              resolved_meta(o, X, cfg));
    for (const auto& pt : sweep.points)
        std::cout << "r=" << pt.r << " m=" << pt.m << " knn_acc=" << pt.knn_accuracy
                  << " total_s=" << pt.total_s << "\n";
    return 0;
}

int cmd_ablate(const CommonOpts& o) {
    auto [raw, X] = load_and_preprocess(o);
    if (!raw.labels) throw std::invalid_argument("ablate requires labels for kNN accuracy");
    const auto cfg = pipeline_config(o);
    const auto ablation = fastumap::ablation_grid(X, *raw.labels, cfg);

    fs::create_directories(o.out_dir);
    const std::string meta = resolved_meta(o, X, cfg);
    fastumap::write_ablation_csv((fs::path(o.out_dir) / "ablation.csv").string(), ablation,
                                 meta);
    fastumap::write_trace_csv((fs::path(o.out_dir) / "ablation_trace.csv").string(), ablation,
                              meta);
    for (const auto& cell : ablation.cells)
        std::cout << (cell.init == fastumap::InitMode::Spectral ? "spectral" : "random") << '/'
                  << (cell.force == fastumap::ForceMode::Hetero ? "hetero" : "homo")
                  << ": knn_acc=" << cell.knn_accuracy << " total_s=" << cell.total_s << "\n";
    return 0;
}

int cmd_check_equivalence(const CommonOpts& o, std::int64_t synthetic_n) {
    fastumap::DataMatrix X;
    if (!o.data_path.empty()) {
        auto [raw, loaded] = load_and_preprocess(o);
        X = std::move(loaded);
    } else {
        // seeded Gaussian blobs, built in-process for a self-contained check
        fastumap::Rng rng(fastumap::derive_seed(o.seed, "equivalence-data"));
        const int dims = 8, blobs = 4;
        X.values.resize(synthetic_n, dims);
        for (Eigen::Index i = 0; i < synthetic_n; ++i) {
            const auto c = static_cast<double>(i % blobs);
            for (int j = 0; j < dims; ++j)
                X.values(i, j) = 5.0 * c * (j == 0 ? 1.0 : 0.1) + rng.next_gaussian();
        }
    }
    const auto report = fastumap::equivalence_check(X, o.n_neighbors, o.seed);

    fs::create_directories(o.out_dir);
    json meta;
    meta["n"] = report.n;
    meta["k"] = report.k;
    meta["seed"] = report.seed;
    fastumap::write_equivalence_json((fs::path(o.out_dir) / "equivalence.json").string(),
                                     report, meta.dump());
    std::cout << "m=n equivalence: " << report.symmetric_difference_edges
              << " mismatched edges, max weight delta " << report.max_weight_delta
              << ", max rho delta " << report.max_rho_delta << " over "
              << report.reference_edges << " reference edges\n";
    return report.symmetric_difference_edges == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"FastUMAP: landmark-based dimensionality reduction"};
    app.require_subcommand(1);
    // given before the subcommand; keys live in an [embed]/[bench]/... section
    app.set_config("--config", "", "Read options from an INI config file; flags override");

    CommonOpts o;
    std::string manifest;
    int repeats = 1;
    std::vector<double> ratios{0.05, 0.1, 0.3, 0.5, 0.7};
    std::int64_t synthetic_n = 300;

    auto* embed = app.add_subcommand("embed", "Embed a dataset to 2-D coordinates");
    add_common_options(embed, o, true);

    auto* bench = app.add_subcommand("bench", "Run the benchmark suite from a manifest");
    add_common_options(bench, o, false);
    bench->add_option("--manifest", manifest, "JSON list of datasets")->required();
    bench->add_option("--repeats", repeats, "Timing repeats (3 = warm-cache median mode)")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "Landmark-ratio sweep");
    add_common_options(sweep, o, true);
    sweep->add_option("--ratios", ratios, "Strictly increasing ratios in (0, 1]")
        ->delimiter(',')
        ->capture_default_str();

    auto* ablate = app.add_subcommand("ablate", "Init-mode x force-mode ablation grid");
    add_common_options(ablate, o, true);

    auto* check = app.add_subcommand("check-equivalence",
                                     "Verify the m = n graph matches the full kNN fuzzy graph");
    add_common_options(check, o, false);
    check->add_option("--synthetic-n", synthetic_n,
                      "Synthetic dataset size when no --data is given")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // configuration errors use a stable exit code
    }

    try {
        if (embed->parsed()) return cmd_embed(o);
        if (bench->parsed()) return cmd_bench(o, manifest, repeats);
        if (sweep->parsed()) return cmd_sweep(o, ratios);
        if (ablate->parsed()) return cmd_ablate(o);
        if (check->parsed()) return cmd_check_equivalence(o, synthetic_n);
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
