#include "pwspm/kmeans.hpp"

#include <cassert>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "pwspm/random.hpp"

namespace pwspm {

namespace {

struct Run {
  std::vector<int> labels;
  Eigen::MatrixXd centers;
  double wcss;
  std::size_t iterations;
  std::vector<double> trace;
};

std::size_t nearest(const Eigen::MatrixXd& centers, const Eigen::VectorXd& x, double& d2) {
  std::size_t best = 0;
  d2 = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (centers.row(c).transpose() - x).squaredNorm();
    if (d < d2) {
      d2 = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, std::size_t clusters, Rng& rng) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(clusters), x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n))));
  Eigen::VectorXd d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centers.row(0)).squaredNorm();
  for (std::size_t c = 1; c < clusters; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double target = uniform(rng, 0.0, total);
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        target -= d2(i);
        if (target < 0.0 && d2(i) > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(n)));
    }
    centers.row(static_cast<Eigen::Index>(c)) = x.row(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (x.row(i) - centers.row(static_cast<Eigen::Index>(c))).squaredNorm());
    }
  }
  return centers;
}

Run lloyd(const Eigen::MatrixXd& x, std::size_t clusters, std::size_t max_iter, Rng& rng) {
  const Eigen::Index n = x.rows();
  const auto k = static_cast<Eigen::Index>(clusters);
  Run run{std::vector<int>(static_cast<std::size_t>(n), -1), seed_plus_plus(x, clusters, rng), 0.0, 0, {}};
  std::vector<double> dist(static_cast<std::size_t>(n));

  for (std::size_t it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      double d2 = 0.0;
      const int c = static_cast<int>(nearest(run.centers, x.row(i).transpose(), d2));
      if (c != run.labels[static_cast<std::size_t>(i)]) {
        run.labels[static_cast<std::size_t>(i)] = c;
        changed = true;
      }
    }
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, x.cols());
    std::vector<std::size_t> counts(clusters, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = run.labels[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        run.centers.row(c) = sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      }
    }
    // Re-seed empty clusters with the worst-served point.
    for (Eigen::Index c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_d2 = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int own = run.labels[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(own)] < 2) continue;
        const double d2 = (x.row(i) - run.centers.row(own)).squaredNorm();
        if (d2 > far_d2) {
          far_d2 = d2;
          far = i;
        }
      }
      if (far < 0) continue;
      const int own = run.labels[static_cast<std::size_t>(far)];
      const auto own_count = static_cast<double>(counts[static_cast<std::size_t>(own)]);
      run.centers.row(own) = (run.centers.row(own) * own_count - x.row(far)) / (own_count - 1.0);
      --counts[static_cast<std::size_t>(own)];
      run.centers.row(c) = x.row(far);
      counts[static_cast<std::size_t>(c)] = 1;
      run.labels[static_cast<std::size_t>(far)] = static_cast<int>(c);
      changed = true;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      total += (x.row(i) - run.centers.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
    }
    assert(run.trace.empty() || total <= run.trace.back() * (1.0 + 1e-12) + 1e-12);
    run.trace.push_back(total);
    run.wcss = total;
    run.iterations = it + 1;
    if (!changed) break;
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& rows, std::size_t clusters, const KMeansOptions& options,
                    const std::vector<bool>& fit_mask) {
  const auto n = static_cast<std::size_t>(rows.rows());
  if (clusters < 1) throw std::invalid_argument("k-means needs at least one cluster");
  if (clusters > n) {
    throw std::invalid_argument("k-means with " + std::to_string(clusters) + " clusters on " +
                                std::to_string(n) + " points");
  }
  if (!rows.allFinite()) throw std::invalid_argument("k-means input must be finite");
  if (!fit_mask.empty() && fit_mask.size() != n) throw std::invalid_argument("fit mask size mismatch");

  std::vector<Eigen::Index> fit_rows;
  for (std::size_t i = 0; i < n; ++i) {
    if (fit_mask.empty() || fit_mask[i]) fit_rows.push_back(static_cast<Eigen::Index>(i));
  }
  if (fit_rows.size() < clusters) {
    fit_rows.clear();
    for (std::size_t i = 0; i < n; ++i) fit_rows.push_back(static_cast<Eigen::Index>(i));
  }
  const Eigen::MatrixXd x = rows(fit_rows, Eigen::all);

  Run best{{}, {}, std::numeric_limits<double>::infinity(), 0, {}};
  const std::size_t restarts = std::max<std::size_t>(options.restarts, 1);
  for (std::size_t r = 0; r < restarts; ++r) {
    Rng rng = make_rng(derive_seed(options.seed, r));
    Run run = lloyd(x, clusters, std::max<std::size_t>(options.max_iter, 1), rng);
    if (run.wcss < best.wcss) best = std::move(run);
  }

  KMeansResult out;
  out.centers = best.centers;
  out.iterations = best.iterations;
  out.wcss_trace = best.trace;
  out.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double d2 = 0.0;
    out.labels[i] = static_cast<int>(nearest(best.centers, rows.row(static_cast<Eigen::Index>(i)).transpose(), d2));
  }
  // Fitted rows keep their Lloyd assignment (identical except on exact ties).
  for (std::size_t f = 0; f < fit_rows.size(); ++f) {
    out.labels[static_cast<std::size_t>(fit_rows[f])] = best.labels[f];
  }
  out.wcss = best.wcss;
  return out;
}

double within_cluster_ss(const Eigen::MatrixXd& rows, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(rows.rows())) {
    throw std::invalid_argument("label count does not match row count");
  }
  std::map<int, std::pair<Eigen::VectorXd, std::size_t>> acc;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    auto& a = acc.try_emplace(labels[static_cast<std::size_t>(i)],
                              Eigen::VectorXd::Zero(rows.cols()), 0).first->second;
    a.first += rows.row(i).transpose();
    ++a.second;
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    const auto& a = acc.at(labels[static_cast<std::size_t>(i)]);
    total += (rows.row(i).transpose() - a.first / static_cast<double>(a.second)).squaredNorm();
  }
  return total;
}

}  // namespace pwspm
