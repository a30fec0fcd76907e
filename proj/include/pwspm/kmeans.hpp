#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace pwspm {

struct KMeansOptions {
  std::size_t restarts = 10;
  std::size_t max_iter = 300;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  std::vector<int> labels;
  Eigen::MatrixXd centers;          // clusters x dim
  double wcss = 0.0;                // within-cluster sum of squares
  std::size_t iterations = 0;       // Lloyd iterations of the best restart
  std::vector<double> wcss_trace;   // WCSS after each iteration of the best restart
};

/// Best of `restarts` k-means++ seeded Lloyd runs (lowest WCSS). Rows with
/// `fit_mask[i] == false` do not influence seeding or centres and are
/// assigned to their nearest centre at the end.
///
/// Empty clusters are re-seeded with the point farthest from its centre; when
/// every point sits on its centre (e.g. all rows identical) a cluster may stay
/// empty, and its label simply never occurs.
KMeansResult kmeans(const Eigen::MatrixXd& rows, std::size_t clusters,
                    const KMeansOptions& options = {}, const std::vector<bool>& fit_mask = {});

/// Sum over clusters of squared distances to the cluster mean.
double within_cluster_ss(const Eigen::MatrixXd& rows, const std::vector<int>& labels);

}  // namespace pwspm
