#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "fastumap/evaluate.hpp"

namespace fastumap {

inline constexpr const char* kVersion = "0.1.0";

/// Writers embed the resolved configuration as `# meta = {...}` comment lines
/// ahead of the CSV header, so any output can be re-derived from its own meta
/// block. Double formatting is fixed-width, making deterministic runs produce
/// byte-identical files.

void write_coordinates_csv(const std::string& path,
                           const Eigen::Matrix<double, Eigen::Dynamic, 2>& Z,
                           const std::string& meta_json);

void write_meta_json(const std::string& path, const std::string& meta_json);

void write_results_csv(const std::string& path, const std::vector<BenchmarkRow>& rows,
                       const std::string& meta_json);

void write_results_json(const std::string& path, const std::vector<BenchmarkRow>& rows,
                        const std::string& meta_json);

void write_sweep_csv(const std::string& path, const SweepResult& sweep,
                     const std::string& meta_json);

void write_ablation_csv(const std::string& path, const AblationResult& ablation,
                        const std::string& meta_json);

void write_trace_csv(const std::string& path, const AblationResult& ablation,
                     const std::string& meta_json);

void write_equivalence_json(const std::string& path, const EquivalenceReport& report,
                            const std::string& meta_json);

}  // namespace fastumap
