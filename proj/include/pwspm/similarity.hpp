#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "pwspm/path_knn.hpp"

namespace pwspm {

enum class SimilarityVariant { Weighted, Unweighted };

struct SimilarityEntry {
  std::size_t row;
  std::size_t col;
  double weight;

  friend bool operator==(const SimilarityEntry&, const SimilarityEntry&) = default;
};

struct SimilarityInfo {
  PowerParam p = PowerParam::finite(1.0);
  std::size_t k = 0;
  std::optional<std::size_t> r;
  SimilarityVariant variant = SimilarityVariant::Weighted;
};

/// Symmetric sparse similarity in canonical coordinate form: both (i, j) and
/// (j, i) stored, sorted by (row, col), no duplicates, no diagonal, weights in
/// (0, 1].
class SparseSimilarity {
 public:
  /// Canonicalises `entries`; duplicates of a pair keep the largest weight,
  /// missing mirror entries are added.
  SparseSimilarity(std::size_t n, std::vector<SimilarityEntry> entries, SimilarityInfo info);

  std::size_t size() const { return n_; }
  std::size_t nnz() const { return entries_.size(); }
  const std::vector<SimilarityEntry>& entries() const { return entries_; }
  const SimilarityInfo& info() const { return info_; }

  Eigen::SparseMatrix<double, Eigen::RowMajor> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  std::size_t n_;
  std::vector<SimilarityEntry> entries_;
  SimilarityInfo info_;
};

inline constexpr std::size_t kDefaultK = 15;
inline constexpr std::size_t kDefaultR = 10;
inline constexpr std::size_t kDefaultDenseCap = 20000;

/// exp(-d^2 / (sigma_i sigma_j)), clamped below at the smallest normal double.
double locally_scaled_weight(double d, double sigma_i, double sigma_j);

/// Weighted k-NN similarity under d^(p) with the locally scaled kernel;
/// sigma_i is the path distance from x_i to its r-th closest other point.
/// The neighbour set of x_i is its k path-nearest points counting x_i itself.
SparseSimilarity build_knn_similarity(const SpatialIndex& index, std::size_t k, std::size_t r,
                                      PowerParam p);
SparseSimilarity build_knn_similarity(const EuclideanKnnTable& table, std::size_t k,
                                      std::size_t r, PowerParam p);

/// Same construction from neighbour lists that include the source first and
/// hold at least max(k, r + 1) entries. `scale` sets the floor applied to
/// zero bandwidths (epsilon * scale).
SparseSimilarity knn_similarity_from_neighbors(const std::vector<PathNeighborResult>& lists,
                                               std::size_t k, std::size_t r, PowerParam p,
                                               double scale);

/// Dense locally scaled Euclidean kernel, zero diagonal; sigma_i is the
/// distance to the r-th closest other point.
Eigen::MatrixXd build_full_similarity(const Dataset& data, std::size_t r,
                                      std::size_t cap = kDefaultDenseCap);

/// A_ij = 1 iff j is among the k path-nearest points of i or vice versa.
SparseSimilarity build_unweighted_knn(const SpatialIndex& index, std::size_t k, PowerParam p);
SparseSimilarity build_unweighted_knn(const EuclideanKnnTable& table, std::size_t k,
                                      PowerParam p);

/// Bounding-box diagonal; cheap scale proxy for the data diameter.
double bounding_diagonal(const Dataset& data);

/// "i j weight" lines, one per stored entry.
void write_triplets(const SparseSimilarity& s, const std::filesystem::path& path);

}  // namespace pwspm
