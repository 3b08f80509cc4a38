#include "fastumap/report_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fastumap {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
    if (!out) throw std::runtime_error("cannot write file: " + path);
    return out;
}

void write_meta_header(std::ofstream& out, const std::string& meta_json) {
    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(meta_json.empty() ? "{}" : meta_json);
    meta["version"] = kVersion;
    out << "# meta = " << meta.dump() << "\n";
}

std::string fmt(double v, const char* spec = "%.17g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

nlohmann::json row_to_json(const BenchmarkRow& row) {
    nlohmann::json j;
    j["dataset"] = row.dataset;
    j["n"] = row.n;
    j["d"] = row.d;
    j["m"] = row.m;
    j["r"] = row.r;
    j["k"] = row.k;
    j["epochs"] = row.epochs;
    j["seed"] = row.seed;
    j["knn_acc"] = row.knn_acc;
    j["graph_s"] = row.timings.graph_s;
    j["spectral_s"] = row.timings.spectral_s;
    j["sgd_s"] = row.timings.sgd_s;
    j["total_s"] = row.timings.total_s;
    return j;
}

}  // namespace

void write_coordinates_csv(const std::string& path,
                           const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z,
                           const std::string& meta_json) {
    auto out = open_out(path);
    write_meta_header(out, meta_json);
    out << "index,x,y\n";
    for (Eigen::Index i = 0; i < Z.rows(); ++i)
        out << i << ',' << fmt(Z(i, 0)) << ',' << fmt(Z(i, 1)) << '\n';
}

void write_meta_json(const std::string& path, const std::string& meta_json) {
    auto out = open_out(path);
    nlohmann::json meta;
    meta["config"] = nlohmann::json::parse(meta_json.empty() ? "{}" : meta_json);
    meta["version"] = kVersion;
    out << meta.dump(2) << "\n";
}

void write_results_csv(const std::string& path, const std::vector<BenchmarkRow>& rows,
                       const std::string& meta_json) {
    auto out = open_out(path);
    write_meta_header(out, meta_json);
    out << "dataset,n,d,m,r,k,epochs,seed,knn_acc,graph_s,spectral_s,sgd_s,total_s\n";
    for (const auto& row : rows) {
        out << row.dataset << ',' << row.n << ',' << row.d << ',' << row.m << ','
            << fmt(row.r, "%.4f") << ',' << row.k << ',' << row.epochs << ',' << row.seed << ','
            << fmt(row.knn_acc, "%.4f") << ',' << fmt(row.timings.graph_s, "%.6f") << ','
            << fmt(row.timings.spectral_s, "%.6f") << ',' << fmt(row.timings.sgd_s, "%.6f")
            << ',' << fmt(row.timings.total_s, "%.6f") << '\n';
    }
}

void write_results_json(const std::string& path, const std::vector<BenchmarkRow>& rows,
                        const std::string& meta_json) {
    auto out = open_out(path);
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(meta_json.empty() ? "{}" : meta_json);
    j["version"] = kVersion;
    j["results"] = nlohmann::json::array();
    for (const auto& row : rows) j["results"].push_back(row_to_json(row));
    out << j.dump(2) << "\n";
}

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::string& meta_json) {
    auto out = open_out(path);
    write_meta_header(out, meta_json);
    out << "r,m,knn_acc,total_s\n";
    for (const auto& pt : sweep.points)
        out << fmt(pt.r, "%.4f") << ',' << pt.m << ',' << fmt(pt.knn_accuracy, "%.4f") << ','
            << fmt(pt.total_s, "%.6f") << '\n';
}

void write_ablation_csv(const std::string& path, const AblationResult& ablation,
                        const std::string& meta_json) {
    auto out = open_out(path);
    write_meta_header(out, meta_json);
    out << "init,force,knn_acc,total_s\n";
    for (const auto& cell : ablation.cells)
        out << (cell.init == InitMode::Spectral ? "spectral" : "random") << ','
            << (cell.force == ForceMode::Hetero ? "hetero" : "homo") << ','
            << fmt(cell.knn_accuracy, "%.4f") << ',' << fmt(cell.total_s, "%.6f") << '\n';
}

void write_trace_csv(const std::string& path, const AblationResult& ablation,
                     const std::string& meta_json) {
    auto out = open_out(path);
    write_meta_header(out, meta_json);
    out << "init,epoch_fraction,epochs_done,knn_acc\n";
    for (const auto& tp : ablation.trace)
        out << (tp.init == InitMode::Spectral ? "spectral" : "random") << ','
            << fmt(tp.epoch_fraction, "%.4f") << ',' << tp.epochs_done << ','
            << fmt(tp.knn_accuracy, "%.4f") << '\n';
}

void write_equivalence_json(const std::string& path, const EquivalenceReport& report,
                            const std::string& meta_json) {
    auto out = open_out(path);
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(meta_json.empty() ? "{}" : meta_json);
    j["version"] = kVersion;
    j["n"] = report.n;
    j["k"] = report.k;
    j["seed"] = report.seed;
    j["reference_edges"] = report.reference_edges;
    j["symmetric_difference_edges"] = report.symmetric_difference_edges;
    j["max_weight_delta"] = report.max_weight_delta;
    j["max_rho_delta"] = report.max_rho_delta;
    out << j.dump(2) << "\n";
}

}  // namespace fastumap
