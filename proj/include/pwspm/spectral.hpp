#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <json.hpp>

#include "pwspm/similarity.hpp"

namespace pwspm {

enum class EigSolver { Auto, Dense, Iterative };

std::string to_string(EigSolver s);
EigSolver parse_eigsolver(const std::string& s);

struct SpectralConfig {
  std::size_t num_clusters = 0;  // must be set (>= 2) before clustering
  EigSolver eigsolver = EigSolver::Auto;
  // Auto: dense for dense input and small graphs, iterative for sparse
  // graphs with a dense fallback up to dense_max points.
  std::size_t dense_max = 4000;
  std::size_t kmeans_restarts = 10;
  std::size_t kmeans_max_iter = 300;
  std::uint64_t seed = 0;
  double tol = 1e-8;
  std::size_t max_matvecs = 5000;
};

nlohmann::json to_json(const SpectralConfig& c);
SpectralConfig spectral_config_from_json(const nlohmann::json& j);

// Wall-clock seconds.
struct StageTimings {
  double graph_build = 0.0;
  double eigen = 0.0;
  double kmeans = 0.0;
  double total() const { return graph_build + eigen + kmeans; }
};

struct SpectralEmbedding {
  Eigen::MatrixXd rows;           // n x clusters, unit rows except flagged ones
  Eigen::VectorXd eigenvalues;    // descending
  std::vector<std::size_t> zero_rows;
  std::size_t matvecs = 0;
  EigSolver solver = EigSolver::Dense;
};

struct ClusteringResult {
  std::vector<int> labels;
  std::optional<double> accuracy;
  StageTimings timings;
  SpectralConfig config;
  SpectralEmbedding embedding;
};

nlohmann::json to_json(const ClusteringResult& r, bool include_labels);

/// D^{-1/2} A D^{-1/2}; zero degrees are replaced by the smallest normal double.
Eigen::MatrixXd normalized_operator(const Eigen::MatrixXd& a);
Eigen::SparseMatrix<double, Eigen::RowMajor> normalized_operator(
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& a);

/// Top eigenvectors of the normalised operator with rows scaled to unit
/// length. Rows whose norm is negligible stay unscaled and are listed in
/// zero_rows.
SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& a, const SpectralConfig& config);
SpectralEmbedding spectral_embedding(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                                     const SpectralConfig& config);

/// Ng-Jordan-Weiss clustering. With `truth`, the result carries the accuracy.
ClusteringResult spectral_cluster(const Eigen::MatrixXd& a, const SpectralConfig& config,
                                  const std::vector<int>* truth = nullptr);
ClusteringResult spectral_cluster(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                                  const SpectralConfig& config,
                                  const std::vector<int>* truth = nullptr);
ClusteringResult spectral_cluster(const SparseSimilarity& s, const SpectralConfig& config,
                                  const std::vector<int>* truth = nullptr);

}  // namespace pwspm
