#include "pwspm/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace pwspm {

SparseSimilarity::SparseSimilarity(std::size_t n, std::vector<SimilarityEntry> entries,
                                   SimilarityInfo info)
    : n_(n), info_(info) {
  const std::size_t given = entries.size();
  entries.reserve(2 * given);
  for (std::size_t e = 0; e < given; ++e) {
    const SimilarityEntry& x = entries[e];
    if (x.row >= n || x.col >= n) throw std::out_of_range("similarity entry out of range");
    if (x.row == x.col) throw std::invalid_argument("similarity entries must be off-diagonal");
    if (!(x.weight > 0.0 && x.weight <= 1.0)) {
      throw std::invalid_argument("similarity weights must lie in (0, 1]");
    }
    entries.push_back({x.col, x.row, x.weight});
  }
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return a.row < b.row || (a.row == b.row && (a.col < b.col || (a.col == b.col && a.weight > b.weight)));
  });
  entries.erase(std::unique(entries.begin(), entries.end(),
                            [](const auto& a, const auto& b) { return a.row == b.row && a.col == b.col; }),
                entries.end());
  entries_ = std::move(entries);
}

Eigen::SparseMatrix<double, Eigen::RowMajor> SparseSimilarity::to_sparse() const {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(entries_.size());
  for (const auto& e : entries_) {
    t.emplace_back(static_cast<int>(e.row), static_cast<int>(e.col), e.weight);
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(static_cast<Eigen::Index>(n_),
                                                 static_cast<Eigen::Index>(n_));
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

Eigen::MatrixXd SparseSimilarity::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_),
                                            static_cast<Eigen::Index>(n_));
  for (const auto& e : entries_) {
    m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.weight;
  }
  return m;
}

double locally_scaled_weight(double d, double sigma_i, double sigma_j) {
  const double w = std::exp(-(d * d) / (sigma_i * sigma_j));
  return std::max(w, std::numeric_limits<double>::min());
}

double bounding_diagonal(const Dataset& data) {
  const auto& pts = data.points();
  return (pts.colwise().maxCoeff() - pts.colwise().minCoeff()).norm();
}

namespace {

double sigma_floor(double scale) {
  return std::numeric_limits<double>::epsilon() * (scale > 0.0 ? scale : 1.0);
}

void check_kr(std::size_t n, std::size_t k, std::size_t r) {
  if (r < 1) throw std::invalid_argument("r must be at least 1");
  if (r > k) {
    throw std::invalid_argument("r=" + std::to_string(r) + " exceeds k=" + std::to_string(k));
  }
  if (k >= n) {
    throw std::invalid_argument("k=" + std::to_string(k) + " must be below n=" + std::to_string(n));
  }
}

}  // namespace

SparseSimilarity knn_similarity_from_neighbors(const std::vector<PathNeighborResult>& lists,
                                               std::size_t k, std::size_t r, PowerParam p,
                                               double scale) {
  const std::size_t n = lists.size();
  const double floor = sigma_floor(scale);
  std::vector<double> sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = lists[i].neighbors;
    if (nb.size() < std::max(k, r + 1) || nb.front().index != i) {
      throw std::invalid_argument("neighbour list " + std::to_string(i) +
                                  " must start with its source and hold max(k, r+1) entries");
    }
    sigma[i] = std::max(nb[r].distance, floor);
  }
  std::vector<SimilarityEntry> entries;
  entries.reserve(n * (k - 1));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nb = lists[i].neighbors;
    for (std::size_t a = 1; a < k; ++a) {
      const std::size_t j = nb[a].index;
      entries.push_back({i, j, locally_scaled_weight(nb[a].distance, sigma[i], sigma[j])});
    }
  }
  return SparseSimilarity(n, std::move(entries),
                          SimilarityInfo{p, k, r, SimilarityVariant::Weighted});
}

SparseSimilarity build_knn_similarity(const EuclideanKnnTable& table, std::size_t k,
                                      std::size_t r, PowerParam p) {
  check_kr(table.size(), k, r);
  const std::size_t depth = std::max(k, r + 1);
  if (depth >= table.size()) {
    throw std::invalid_argument("r=" + std::to_string(r) + " needs at least r+2 points");
  }
  const auto lists = path_knn_all(table, depth, p);
  return knn_similarity_from_neighbors(lists, k, r, p, bounding_diagonal(table.data()));
}

SparseSimilarity build_knn_similarity(const SpatialIndex& index, std::size_t k, std::size_t r,
                                      PowerParam p) {
  check_kr(index.size(), k, r);
  const std::size_t depth = std::max(k, r + 1);
  if (depth >= index.size()) {
    throw std::invalid_argument("r=" + std::to_string(r) + " needs at least r+2 points");
  }
  const EuclideanKnnTable table(index, depth);
  return build_knn_similarity(table, k, r, p);
}

Eigen::MatrixXd build_full_similarity(const Dataset& data, std::size_t r, std::size_t cap) {
  const std::size_t n = data.size();
  if (n > cap) {
    throw std::invalid_argument("full similarity for n=" + std::to_string(n) +
                                " exceeds the dense cap " + std::to_string(cap));
  }
  if (r < 1 || r > n - 1) {
    throw std::invalid_argument("r=" + std::to_string(r) + " must satisfy 1 <= r <= n-1");
  }
  Eigen::MatrixXd e = pairwise_euclidean(data);
  const double floor = sigma_floor(bounding_diagonal(data));
  std::vector<double> sigma(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(r - 1), row.end());
    sigma[i] = std::max(row[r - 1], floor);
  }
  for (Eigen::Index j = 0; j < e.cols(); ++j) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      e(i, j) = i == j ? 0.0
                       : locally_scaled_weight(e(i, j), sigma[static_cast<std::size_t>(i)],
                                               sigma[static_cast<std::size_t>(j)]);
    }
  }
  return e;
}

SparseSimilarity build_unweighted_knn(const EuclideanKnnTable& table, std::size_t k,
                                      PowerParam p) {
  const auto lists = path_knn_all(table, k, p);
  std::vector<SimilarityEntry> entries;
  entries.reserve(table.size() * (k - 1));
  for (const auto& l : lists) {
    for (std::size_t a = 1; a < l.neighbors.size(); ++a) {
      entries.push_back({l.source, l.neighbors[a].index, 1.0});
    }
  }
  return SparseSimilarity(table.size(), std::move(entries),
                          SimilarityInfo{p, k, std::nullopt, SimilarityVariant::Unweighted});
}

SparseSimilarity build_unweighted_knn(const SpatialIndex& index, std::size_t k, PowerParam p) {
  if (k < 1 || k >= index.size()) {
    throw std::invalid_argument("k=" + std::to_string(k) + " must be below n=" +
                                std::to_string(index.size()));
  }
  const EuclideanKnnTable table(index, k);
  return build_unweighted_knn(table, k, p);
}

void write_triplets(const SparseSimilarity& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const auto& e : s.entries()) {
    out << e.row << ' ' << e.col << ' ' << format_double(e.weight) << '\n';
  }
}

}  // namespace pwspm
