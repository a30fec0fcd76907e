#include "pwspm/path_knn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace pwspm {

void PruningQueue::decrease_or_insert(std::size_t index, long double key, long double tie) {
  heap_.push({key, tie, index});
  ++insertions_;
  max_size_ = std::max(max_size_, heap_.size());
}

bool PruningQueue::extract_min(Entry& out) {
  while (!heap_.empty()) {
    const Entry top = heap_.top();
    heap_.pop();
    if (settled_.insert(top.index).second) {
      out = top;
      return true;
    }
  }
  return false;
}

PathKnnStats& PathKnnStats::operator+=(const PathKnnStats& o) {
  runs += o.runs;
  neighbor_requests += o.neighbor_requests;
  index_queries += o.index_queries;
  decrease_or_insert += o.decrease_or_insert;
  max_queue_size = std::max(max_queue_size, o.max_queue_size);
  return *this;
}

namespace {

void check_args(std::size_t n, std::size_t source, std::size_t k) {
  if (source >= n) {
    throw std::out_of_range("source " + std::to_string(source) + " out of range for n=" +
                            std::to_string(n));
  }
  if (k < 1 || k >= n) {
    throw std::invalid_argument("path_knn needs 1 <= k <= n-1 (k=" + std::to_string(k) +
                                ", n=" + std::to_string(n) + ")");
  }
}

// `neighbors(u)` returns the Euclidean k-NN list of u (at least k entries,
// u excluded).
template <typename NeighborFn>
PathNeighborResult pruned_dijkstra(NeighborFn&& neighbors, std::size_t source, std::size_t k,
                                   PowerParam p, const PathKnnOptions& options,
                                   PathKnnStats* stats) {
  const bool llpd = p.is_infinite();
  const long double power = llpd ? 1.0L : static_cast<long double>(p.value());

  const NeighborList& first = neighbors(source);
  // Keys live in the power domain relative to the source's k-th Euclidean
  // neighbour distance. Every reported path distance is at most that scale,
  // so extended precision covers the full range of relevant keys.
  double scale = 1.0;
  if (!llpd) {
    const double far = first.neighbors[k - 1].distance;
    if (far > 0.0) scale = far;
  }
  auto edge_key = [&](double euclid) -> long double {
    if (llpd) return euclid;
    return std::pow(static_cast<long double>(euclid / scale), power);
  };

  PruningQueue queue;
  queue.decrease_or_insert(source, 0.0L);

  std::size_t relaxations = 0;

  PathNeighborResult result{source, {}};
  result.neighbors.reserve(k);
  PruningQueue::Entry top{};
  while (result.neighbors.size() < k && queue.extract_min(top)) {
    const double distance =
        llpd ? static_cast<double>(top.key)
             : scale * static_cast<double>(std::pow(top.key, 1.0L / power));
    result.neighbors.push_back({top.index, distance});

    const NeighborList& adj = neighbors(top.index);
    for (std::size_t j = 0; j < k; ++j) {
      const Neighbor& v = adj.neighbors[j];
      if (queue.is_settled(v.index)) continue;
      const long double w = edge_key(v.distance);
      const long double candidate = llpd ? std::max(top.key, w) : top.key + w;
      // Longest-leg distances tie on whole plateaus; among equal keys the
      // shorter discovered path wins instead of the lower point index.
      const long double tie = llpd ? top.tie + v.distance : 0.0L;
      queue.decrease_or_insert(v.index, candidate, tie);
      ++relaxations;
    }
  }
  if (result.neighbors.size() < k) {
    throw std::logic_error("pruned Dijkstra exhausted its queue before k settles");
  }
  if (stats) {
    stats->runs += 1;
    stats->decrease_or_insert += relaxations;
    stats->max_queue_size = std::max(stats->max_queue_size, queue.max_size());
  }
  if (!options.include_source) result.neighbors.erase(result.neighbors.begin());
  return result;
}

}  // namespace

PathNeighborResult path_knn(const SpatialIndex& index, std::size_t source, std::size_t k,
                            PowerParam p, const PathKnnOptions& options, PathKnnStats* stats) {
  check_args(index.size(), source, k);
  std::unordered_map<std::size_t, NeighborList> memo;
  PathKnnStats local;
  auto neighbors = [&](std::size_t u) -> const NeighborList& {
    ++local.neighbor_requests;
    auto it = memo.find(u);
    if (it == memo.end()) {
      ++local.index_queries;
      it = memo.emplace(u, index.knn(u, k)).first;
    }
    return it->second;
  };
  auto result = pruned_dijkstra(neighbors, source, k, p, options, &local);
  if (stats) *stats += local;
  return result;
}

PathNeighborResult path_knn(const EuclideanKnnTable& table, std::size_t source, std::size_t k,
                            PowerParam p, const PathKnnOptions& options, PathKnnStats* stats) {
  check_args(table.size(), source, k);
  if (table.k() < k) {
    throw std::invalid_argument("neighbour table holds " + std::to_string(table.k()) +
                                " neighbours, path_knn needs k=" + std::to_string(k));
  }
  PathKnnStats local;
  auto neighbors = [&](std::size_t u) -> const NeighborList& {
    ++local.neighbor_requests;
    return table[u];
  };
  auto result = pruned_dijkstra(neighbors, source, k, p, options, &local);
  if (stats) *stats += local;
  return result;
}

std::vector<PathNeighborResult> path_knn_all(const EuclideanKnnTable& table, std::size_t k,
                                             PowerParam p, const PathKnnOptions& options,
                                             PathKnnStats* stats) {
  if (table.size() == 0) return {};
  check_args(table.size(), 0, k);
  const auto n = static_cast<std::ptrdiff_t>(table.size());
  std::vector<PathNeighborResult> out(table.size());
  std::vector<PathKnnStats> per_source(stats ? table.size() : 0);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t s = 0; s < n; ++s) {
    const auto src = static_cast<std::size_t>(s);
    out[src] = path_knn(table, src, k, p, options, stats ? &per_source[src] : nullptr);
  }
  if (stats) {
    for (const auto& s : per_source) *stats += s;
  }
  return out;
}

std::vector<PathNeighborResult> path_knn_all(const SpatialIndex& index, std::size_t k,
                                             PowerParam p, const PathKnnOptions& options,
                                             PathKnnStats* stats) {
  check_args(index.size(), 0, k);
  const EuclideanKnnTable table(index, k);
  if (stats) stats->index_queries += table.size();
  return path_knn_all(table, k, p, options, stats);
}

}  // namespace pwspm
