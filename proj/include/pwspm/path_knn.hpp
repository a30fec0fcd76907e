#pragma once

#include <cstddef>
#include <queue>
#include <unordered_set>
#include <vector>

#include "pwspm/euclidean_index.hpp"
#include "pwspm/path_metrics.hpp"

namespace pwspm {

/// Min-priority queue for pruned Dijkstra. DecreaseOrInsert is realised by
/// inserting a duplicate entry; entries for already-settled indices are
/// dropped when they reach the top. Entries are ordered by (key, tie, index).
class PruningQueue {
 public:
  struct Entry {
    long double key;
    long double tie;
    std::size_t index;
  };

  void decrease_or_insert(std::size_t index, long double key, long double tie = 0.0L);
  bool is_settled(std::size_t index) const { return settled_.contains(index); }

  /// Extracts the live entry of smallest (key, index) and settles it. Returns
  /// false when no live entry remains.
  bool extract_min(Entry& out);

  std::size_t size() const { return heap_.size(); }
  std::size_t max_size() const { return max_size_; }
  std::size_t insertions() const { return insertions_; }

 private:
  struct Greater {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.key != b.key) return a.key > b.key;
      if (a.tie != b.tie) return a.tie > b.tie;
      return a.index > b.index;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, Greater> heap_;
  std::unordered_set<std::size_t> settled_;
  std::size_t max_size_ = 0;
  std::size_t insertions_ = 0;
};

/// The k path-nearest points of a source, ascending by path distance. With
/// the source included (default) the first entry is (source, 0).
struct PathNeighborResult {
  std::size_t source;
  std::vector<Neighbor> neighbors;
};

struct PathKnnOptions {
  bool include_source = true;
};

/// Instrumentation of one or more pruned Dijkstra runs.
struct PathKnnStats {
  std::size_t runs = 0;
  std::size_t neighbor_requests = 0;  // Euclidean k-NN sets asked for
  std::size_t index_queries = 0;      // requests not served from the per-run memo
  std::size_t decrease_or_insert = 0;
  std::size_t max_queue_size = 0;

  PathKnnStats& operator+=(const PathKnnStats& o);
};

/// k nearest neighbours of `source` under the power-weighted shortest path
/// metric (or the longest-leg path distance for p = inf), counting the source
/// as one of the k. Runs Dijkstra on the implicit complete graph but expands
/// each settled vertex only along its k Euclidean nearest neighbours, which
/// preserves the k path-nearest set. Requires 1 <= k <= n-1.
PathNeighborResult path_knn(const SpatialIndex& index, std::size_t source, std::size_t k,
                            PowerParam p, const PathKnnOptions& options = {},
                            PathKnnStats* stats = nullptr);

/// Same, with Euclidean neighbour sets read from a precomputed table
/// (table.k() >= k).
PathNeighborResult path_knn(const EuclideanKnnTable& table, std::size_t source, std::size_t k,
                            PowerParam p, const PathKnnOptions& options = {},
                            PathKnnStats* stats = nullptr);

/// path_knn for every source, ordered by source index.
std::vector<PathNeighborResult> path_knn_all(const SpatialIndex& index, std::size_t k,
                                             PowerParam p, const PathKnnOptions& options = {},
                                             PathKnnStats* stats = nullptr);
std::vector<PathNeighborResult> path_knn_all(const EuclideanKnnTable& table, std::size_t k,
                                             PowerParam p, const PathKnnOptions& options = {},
                                             PathKnnStats* stats = nullptr);

}  // namespace pwspm
