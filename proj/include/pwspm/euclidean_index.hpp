#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pwspm/dataset.hpp"

namespace pwspm {

struct Neighbor {
  std::size_t index;
  double distance;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Neighbors of `source`, ascending by (distance, index). The source itself
/// is never listed.
struct NeighborList {
  std::size_t source;
  std::vector<Neighbor> neighbors;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

/// sqrt(squared_distance); every module measures legs through this function so
/// that equal geometric distances compare bitwise equal.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

/// Exact k-d tree over a dataset. The dataset must outlive the index.
///
/// Splits on the coordinate of widest spread at the median; leaves hold at
/// most `leaf_size` points. Queries are read-only and thread safe.
class KdTree {
 public:
  static constexpr std::size_t kDefaultLeafSize = 16;

  explicit KdTree(const Dataset& data, std::size_t leaf_size = kDefaultLeafSize);

  const Dataset& data() const { return *data_; }
  std::size_t size() const { return data_->size(); }

  /// The k nearest other points of `source`; throws when k >= n. k = 0
  /// yields an empty list.
  NeighborList knn(std::size_t source, std::size_t k) const;

 private:
  struct Node {
    // Leaf when left == 0 (the root is never a child).
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t split_dim = 0;
    double split_value = 0.0;
  };

  std::size_t build(std::size_t begin, std::size_t end);

  const Dataset* data_;
  std::size_t leaf_size_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

using SpatialIndex = KdTree;

inline SpatialIndex build_index(const Dataset& data) { return KdTree(data); }

inline NeighborList knn(const SpatialIndex& index, std::size_t source, std::size_t k) {
  return index.knn(source, k);
}

/// Exhaustive-scan reference with the same contract as KdTree::knn.
NeighborList knn_brute(const Dataset& data, std::size_t source, std::size_t k);

/// Precomputed Euclidean k-NN lists for every point of a dataset.
class EuclideanKnnTable {
 public:
  EuclideanKnnTable(const SpatialIndex& index, std::size_t k);

  const Dataset& data() const { return *data_; }
  std::size_t size() const { return lists_.size(); }
  std::size_t k() const { return k_; }
  const NeighborList& operator[](std::size_t i) const { return lists_[i]; }

 private:
  const Dataset* data_;
  std::size_t k_;
  std::vector<NeighborList> lists_;
};

}  // namespace pwspm
