#include "pwspm/euclidean_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>

namespace pwspm {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_distance(a, b));
}

namespace {

void check_query(std::size_t n, std::size_t source, std::size_t k) {
  if (source >= n) {
    throw std::out_of_range("source " + std::to_string(source) + " out of range for n=" +
                            std::to_string(n));
  }
  if (k >= n) {
    throw std::invalid_argument("k=" + std::to_string(k) + " must satisfy k <= n-1 (n=" +
                                std::to_string(n) + ")");
  }
}

struct Candidate {
  double d2;
  std::size_t index;
  bool operator<(const Candidate& o) const {
    return d2 < o.d2 || (d2 == o.d2 && index < o.index);
  }
};

NeighborList finish(std::size_t source, std::vector<Candidate> cands) {
  std::sort(cands.begin(), cands.end());
  NeighborList out{source, {}};
  out.neighbors.reserve(cands.size());
  for (const auto& c : cands) out.neighbors.push_back({c.index, std::sqrt(c.d2)});
  return out;
}

}  // namespace

KdTree::KdTree(const Dataset& data, std::size_t leaf_size)
    : data_(&data), leaf_size_(std::max<std::size_t>(leaf_size, 1)), order_(data.size()) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(2 * data.size() / leaf_size_ + 2);
  build(0, order_.size());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end});
  if (end - begin <= leaf_size_) return id;

  const std::size_t dim = data_->dim();
  std::size_t best_dim = 0;
  double best_spread = -1.0;
  for (std::size_t d = 0; d < dim; ++d) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = begin; i < end; ++i) {
      const double v = data_->row(order_[i])[d];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      best_dim = d;
    }
  }
  if (best_spread <= 0.0) return id;  // all coincident: keep as a leaf

  const std::size_t mid = begin + (end - begin) / 2;
  auto key = [&](std::size_t p) { return data_->row(p)[best_dim]; };
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return key(a) < key(b); });
  const double split = key(order_[mid]);

  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  Node& node = nodes_[id];
  node.left = left;
  node.right = right;
  node.split_dim = best_dim;
  node.split_value = split;
  return id;
}

NeighborList KdTree::knn(std::size_t source, std::size_t k) const {
  check_query(size(), source, k);
  if (k == 0) return {source, {}};
  const auto q = data_->row(source);
  const std::size_t dim = data_->dim();

  std::priority_queue<Candidate> best;  // max-heap of the current k best
  auto worst = [&]() {
    return best.size() < k ? std::numeric_limits<double>::infinity() : best.top().d2;
  };
  // Slack on the pruning bound so that rounding in the incremental box
  // distance never discards an exact tie.
  constexpr double slack = 1.0 + 1e-9;

  std::vector<double> offsets(dim, 0.0);
  auto visit = [&](auto&& self, std::size_t id, double box_d2) -> void {
    const Node& node = nodes_[id];
    if (node.left == 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const std::size_t p = order_[i];
        if (p == source) continue;
        const Candidate c{squared_distance(q, data_->row(p)), p};
        if (best.size() < k) {
          best.push(c);
        } else if (c < best.top()) {
          best.pop();
          best.push(c);
        }
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split_value;
    const std::size_t near = diff < 0.0 ? node.left : node.right;
    const std::size_t far = diff < 0.0 ? node.right : node.left;
    self(self, near, box_d2);

    const double old = offsets[node.split_dim];
    const double far_d2 = box_d2 - old * old + diff * diff;
    if (far_d2 <= worst() * slack) {
      offsets[node.split_dim] = diff;
      self(self, far, far_d2);
      offsets[node.split_dim] = old;
    }
  };
  visit(visit, 0, 0.0);

  std::vector<Candidate> cands;
  cands.reserve(best.size());
  while (!best.empty()) {
    cands.push_back(best.top());
    best.pop();
  }
  return finish(source, std::move(cands));
}

NeighborList knn_brute(const Dataset& data, std::size_t source, std::size_t k) {
  check_query(data.size(), source, k);
  if (k == 0) return {source, {}};
  const auto q = data.row(source);
  std::vector<Candidate> all;
  all.reserve(data.size() - 1);
  for (std::size_t p = 0; p < data.size(); ++p) {
    if (p != source) all.push_back({squared_distance(q, data.row(p)), p});
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  all.resize(k);
  return finish(source, std::move(all));
}

EuclideanKnnTable::EuclideanKnnTable(const SpatialIndex& index, std::size_t k)
    : data_(&index.data()), k_(k), lists_(index.size()) {
  const auto n = static_cast<std::ptrdiff_t>(index.size());
  if (n > 0) check_query(index.size(), 0, k);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    lists_[static_cast<std::size_t>(i)] = index.knn(static_cast<std::size_t>(i), k);
  }
}

}  // namespace pwspm
