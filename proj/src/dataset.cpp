#include "fastumap/dataset.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fastumap {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc{} && res.ptr == last;
}

// Factor-encode label strings to 0..C-1, ordering classes numerically when
// every label parses as a number and lexicographically otherwise.
std::vector<int> encode_labels(const std::vector<std::string>& raw) {
    bool all_numeric = true;
    for (const auto& s : raw) {
        double v;
        if (!parse_double(s, v)) {
            all_numeric = false;
            break;
        }
    }
    std::vector<std::string> uniq(raw);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (all_numeric) {
        std::sort(uniq.begin(), uniq.end(), [](const std::string& a, const std::string& b) {
            double x, y;
            parse_double(a, x);
            parse_double(b, y);
            return x < y;
        });
    }
    std::map<std::string, int> code;
    for (std::size_t c = 0; c < uniq.size(); ++c) code[uniq[c]] = static_cast<int>(c);
    std::vector<int> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = code[raw[i]];
    return out;
}

void check_finite(const Eigen::MatrixXd& X, const std::string& context) {
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            if (!std::isfinite(X(i, j)))
                throw std::runtime_error(context + ": non-finite value at row " +
                                         std::to_string(i) + ", column " + std::to_string(j));
}

}  // namespace

RawDataset load_csv(const std::string& path, const std::string& label_col,
                    const std::string& name) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    const auto header = split_csv_line(line);
    const std::size_t ncols = header.size();

    int label_idx = -1;
    if (!label_col.empty()) {
        for (std::size_t j = 0; j < ncols; ++j)
            if (trim(header[j]) == label_col) label_idx = static_cast<int>(j);
        if (label_idx < 0)
            throw std::runtime_error("label column '" + label_col + "' not found in " + path);
    }

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    std::size_t nrows = 0;
    std::size_t row_no = 1;  // header was row 0
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            ++row_no;
            continue;
        }
        const auto cells = split_csv_line(line);
        if (cells.size() != ncols)
            throw std::runtime_error(path + ": row " + std::to_string(row_no) + " has " +
                                     std::to_string(cells.size()) + " cells, expected " +
                                     std::to_string(ncols));
        for (std::size_t j = 0; j < ncols; ++j) {
            if (static_cast<int>(j) == label_idx) {
                raw_labels.push_back(trim(cells[j]));
                continue;
            }
            double v;
            if (!parse_double(cells[j], v) || !std::isfinite(v))
                throw std::runtime_error(path + ": row " + std::to_string(row_no) +
                                         ", column '" + trim(header[j]) +
                                         "': not a finite number: '" + trim(cells[j]) + "'");
            values.push_back(v);
        }
        ++nrows;
        ++row_no;
    }
    if (nrows < 2) throw std::runtime_error(path + ": need at least 2 data rows");

    const std::size_t dim = ncols - (label_idx >= 0 ? 1 : 0);
    if (dim < 1) throw std::runtime_error(path + ": no feature columns");

    RawDataset ds;
    ds.features.resize(static_cast<Eigen::Index>(nrows), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < nrows; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                values[i * dim + j];
    if (label_idx >= 0) ds.labels = encode_labels(raw_labels);
    ds.name = name.empty() ? std::filesystem::path(path).stem().string() : name;
    return ds;
}

RawDataset load_binary(const std::string& path, const std::string& name) {
    std::filesystem::path payload(path);
    std::filesystem::path sidecar = payload;
    sidecar.replace_extension(".json");
    std::ifstream meta_in(sidecar);
    if (!meta_in) throw std::runtime_error("cannot open sidecar: " + sidecar.string());
    nlohmann::json meta = nlohmann::json::parse(meta_in);
    const auto rows = meta.at("rows").get<std::int64_t>();
    const auto cols = meta.at("cols").get<std::int64_t>();
    if (rows < 2 || cols < 1)
        throw std::runtime_error(sidecar.string() + ": invalid shape " + std::to_string(rows) +
                                 "x" + std::to_string(cols));

    std::ifstream in(payload, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open binary file: " + path);
    std::vector<float> buf(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float)))
        throw std::runtime_error(path + ": file shorter than rows*cols float32");

    RawDataset ds;
    ds.features.resize(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i)
        for (std::int64_t j = 0; j < cols; ++j)
            ds.features(i, j) = static_cast<double>(buf[static_cast<std::size_t>(i) * cols + j]);
    check_finite(ds.features, path);

    if (meta.contains("labels")) {
        std::filesystem::path lpath = meta.at("labels").get<std::string>();
        if (lpath.is_relative()) lpath = payload.parent_path() / lpath;
        std::ifstream lin(lpath, std::ios::binary);
        if (!lin) throw std::runtime_error("cannot open labels file: " + lpath.string());
        std::vector<std::int32_t> lbuf(static_cast<std::size_t>(rows));
        lin.read(reinterpret_cast<char*>(lbuf.data()),
                 static_cast<std::streamsize>(lbuf.size() * sizeof(std::int32_t)));
        if (lin.gcount() != static_cast<std::streamsize>(lbuf.size() * sizeof(std::int32_t)))
            throw std::runtime_error(lpath.string() + ": expected " + std::to_string(rows) +
                                     " int32 labels");
        ds.labels = std::vector<int>(lbuf.begin(), lbuf.end());
    }
    ds.name = name.empty() ? payload.stem().string() : name;
    return ds;
}

RawDataset load_dataset(const std::string& path, DataFormat format,
                        const std::string& label_col, const std::string& name) {
    return format == DataFormat::Csv ? load_csv(path, label_col, name)
                                     : load_binary(path, name);
}

Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& X) {
    check_finite(X, "minmax_normalize");
    Eigen::MatrixXd out(X.rows(), X.cols());
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double lo = X.col(j).minCoeff();
        const double hi = X.col(j).maxCoeff();
        const double range = hi - lo;
        if (range > 0.0)
            out.col(j) = (X.col(j).array() - lo) / range;
        else
            out.col(j).setZero();  // no-information column
    }
    return out;
}

Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& X, int target) {
    if (target < 1) throw std::invalid_argument("pca_reduce: target must be >= 1");
    if (X.rows() < 2) throw std::invalid_argument("pca_reduce: need n >= 2");
    const Eigen::Index D = X.cols();
    if (D <= target) return X;  // no-op trigger

    const Eigen::RowVectorXd mean = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - mean;
    const Eigen::MatrixXd cov =
        (centered.transpose() * centered) / static_cast<double>(X.rows() - 1);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("pca_reduce: eigendecomposition failed");

    // Eigen orders eigenvalues ascending; take the top `target` reversed.
    Eigen::MatrixXd components(D, target);
    for (int c = 0; c < target; ++c) {
        Eigen::VectorXd v = eig.eigenvectors().col(D - 1 - c);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        components.col(c) = v;
    }
    return centered * components;
}

DataMatrix preprocess(const RawDataset& ds, const PreprocessConfig& cfg) {
    if (cfg.pca_target < 1 || cfg.trigger_dim < 1 || cfg.trigger_n < 1)
        throw std::invalid_argument("preprocess: config fields must be positive");
    Eigen::MatrixXd normalized = minmax_normalize(ds.features);
    const bool trigger = ds.dim() > cfg.trigger_dim || ds.n() > cfg.trigger_n;
    if (trigger) normalized = pca_reduce(normalized, cfg.pca_target);
    return DataMatrix{std::move(normalized)};
}

}  // namespace fastumap
