#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fastumap {

/// A loaded dataset before preprocessing: raw feature matrix plus optional
/// integer class labels (factor-encoded 0..C-1).
struct RawDataset {
    Eigen::MatrixXd features;  // n x D
    std::optional<std::vector<int>> labels;
    std::string name;

    Eigen::Index n() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
};

struct PreprocessConfig {
    int pca_target = 50;
    int trigger_dim = 50;
    std::int64_t trigger_n = 5000;
    std::uint64_t seed = 42;
};

/// Preprocessed sample matrix fed to the pipeline.
struct DataMatrix {
    Eigen::MatrixXd values;  // n x d

    Eigen::Index n() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
};

enum class DataFormat { Csv, BinaryMatrix };

/// Load a headered CSV. `label_col` selects the label column by header name;
/// empty means the file is unlabeled and every column is a feature.
/// Malformed rows, non-numeric feature cells, and NaN/Inf entries raise
/// std::runtime_error naming the offending row/column.
RawDataset load_csv(const std::string& path, const std::string& label_col = "",
                    const std::string& name = "");

/// Load a raw little-endian float32 row-major matrix. `path` points at the
/// .f32 payload; a JSON sidecar with the same stem and a .json extension
/// carries {"rows": n, "cols": d} and an optional "labels" path to a
/// little-endian int32 vector of length n.
RawDataset load_binary(const std::string& path, const std::string& name = "");

RawDataset load_dataset(const std::string& path, DataFormat format,
                        const std::string& label_col = "", const std::string& name = "");

/// Per-column (x - min) / (max - min). Constant columns map to all zeros.
Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& X);

/// Project onto the top min(target, D) principal components, ordered by
/// decreasing explained variance. Columns are centered internally; the sign
/// of each component is fixed by making its largest-magnitude loading
/// positive. Returns X unchanged when D <= target.
Eigen::MatrixXd pca_reduce(const Eigen::MatrixXd& X, int target);

/// Shared preprocessing: min-max normalization, then PCA when the trigger
/// fires (D > trigger_dim or n > trigger_n; dimensionality only shrinks when
/// D > trigger_dim).
DataMatrix preprocess(const RawDataset& ds, const PreprocessConfig& cfg);

}  // namespace fastumap
