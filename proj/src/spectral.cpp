#include "pwspm/spectral.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pwspm/accuracy.hpp"
#include "pwspm/eigensolver.hpp"
#include "pwspm/kmeans.hpp"
#include "pwspm/random.hpp"

namespace pwspm {

namespace {

using SparseRM = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Clock = std::chrono::steady_clock;

// Below this size a dense solve is as cheap as the iterative one.
constexpr std::size_t kSmallDense = 256;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Eigen::VectorXd inv_sqrt_degree(const Eigen::VectorXd& deg) {
  Eigen::VectorXd out(deg.size());
  for (Eigen::Index i = 0; i < deg.size(); ++i) {
    const double d = deg(i) > 0.0 ? deg(i) : std::numeric_limits<double>::min();
    out(i) = 1.0 / std::sqrt(d);
  }
  return out;
}

void validate(std::size_t n, const SpectralConfig& c) {
  if (c.num_clusters < 2) throw std::invalid_argument("spectral clustering needs at least 2 clusters");
  if (c.num_clusters > n) {
    throw std::invalid_argument("more clusters (" + std::to_string(c.num_clusters) + ") than points (" +
                                std::to_string(n) + ")");
  }
  if (c.kmeans_restarts < 1) throw std::invalid_argument("k-means restarts must be at least 1");
}

template <class Matrix>
void check_similarity(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("similarity matrix must be square");
}

SpectralEmbedding finish_embedding(EigenPairs pairs, EigSolver used) {
  SpectralEmbedding e;
  e.eigenvalues = std::move(pairs.values);
  e.rows = std::move(pairs.vectors);
  e.matvecs = pairs.matvecs;
  e.solver = used;
  const double floor = 1e-12;
  for (Eigen::Index i = 0; i < e.rows.rows(); ++i) {
    const double norm = e.rows.row(i).norm();
    if (norm > floor) {
      e.rows.row(i) /= norm;
    } else {
      e.zero_rows.push_back(static_cast<std::size_t>(i));
    }
  }
  return e;
}

ClusteringResult cluster_embedding(SpectralEmbedding emb, double eigen_seconds,
                                   const SpectralConfig& config, const std::vector<int>* truth) {
  ClusteringResult r;
  r.config = config;
  r.timings.eigen = eigen_seconds;
  const auto t0 = Clock::now();
  std::vector<bool> mask;
  if (!emb.zero_rows.empty()) {
    mask.assign(static_cast<std::size_t>(emb.rows.rows()), true);
    for (auto i : emb.zero_rows) mask[i] = false;
  }
  KMeansOptions ko;
  ko.restarts = config.kmeans_restarts;
  ko.max_iter = config.kmeans_max_iter;
  ko.seed = derive_seed(config.seed, 0x6b6d65616e73ULL);
  r.labels = kmeans(emb.rows, config.num_clusters, ko, mask).labels;
  r.timings.kmeans = seconds_since(t0);
  r.embedding = std::move(emb);
  if (truth != nullptr) r.accuracy = accuracy(r.labels, *truth);
  return r;
}

IterativeOptions iterative_options(const SpectralConfig& c) {
  IterativeOptions o;
  o.tol = c.tol;
  o.max_matvecs = c.max_matvecs;
  o.seed = derive_seed(c.seed, 0x6c616e637a6f73ULL);
  return o;
}

}  // namespace

std::string to_string(EigSolver s) {
  switch (s) {
    case EigSolver::Auto: return "auto";
    case EigSolver::Dense: return "dense";
    case EigSolver::Iterative: return "iterative";
  }
  return "auto";
}

EigSolver parse_eigsolver(const std::string& s) {
  if (s == "auto") return EigSolver::Auto;
  if (s == "dense") return EigSolver::Dense;
  if (s == "iterative") return EigSolver::Iterative;
  throw std::invalid_argument("unknown eigensolver '" + s + "' (expected auto, dense or iterative)");
}

nlohmann::json to_json(const SpectralConfig& c) {
  return {{"num_clusters", c.num_clusters}, {"eigsolver", to_string(c.eigsolver)},
          {"dense_max", c.dense_max},       {"kmeans_restarts", c.kmeans_restarts},
          {"kmeans_max_iter", c.kmeans_max_iter}, {"seed", c.seed},
          {"tol", c.tol},                   {"max_matvecs", c.max_matvecs}};
}

SpectralConfig spectral_config_from_json(const nlohmann::json& j) {
  SpectralConfig c;
  c.num_clusters = j.value("num_clusters", c.num_clusters);
  c.eigsolver = parse_eigsolver(j.value("eigsolver", to_string(c.eigsolver)));
  c.dense_max = j.value("dense_max", c.dense_max);
  c.kmeans_restarts = j.value("kmeans_restarts", c.kmeans_restarts);
  c.kmeans_max_iter = j.value("kmeans_max_iter", c.kmeans_max_iter);
  c.seed = j.value("seed", c.seed);
  c.tol = j.value("tol", c.tol);
  c.max_matvecs = j.value("max_matvecs", c.max_matvecs);
  return c;
}

nlohmann::json to_json(const ClusteringResult& r, bool include_labels) {
  nlohmann::json j;
  j["config"] = to_json(r.config);
  j["n"] = r.labels.size();
  j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
  j["timings"] = {{"graph_build", r.timings.graph_build},
                  {"eigen", r.timings.eigen},
                  {"kmeans", r.timings.kmeans},
                  {"total", r.timings.total()}};
  j["eigenvalues"] = std::vector<double>(r.embedding.eigenvalues.data(),
                                         r.embedding.eigenvalues.data() + r.embedding.eigenvalues.size());
  j["eigensolver_used"] = to_string(r.embedding.solver);
  j["matvecs"] = r.embedding.matvecs;
  j["zero_rows"] = r.embedding.zero_rows;
  if (include_labels) j["labels"] = r.labels;
  return j;
}

Eigen::MatrixXd normalized_operator(const Eigen::MatrixXd& a) {
  check_similarity(a);
  const Eigen::VectorXd s = inv_sqrt_degree(a.rowwise().sum());
  return s.asDiagonal() * a * s.asDiagonal();
}

SparseRM normalized_operator(const SparseRM& a) {
  check_similarity(a);
  Eigen::VectorXd deg = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
    for (SparseRM::InnerIterator it(a, i); it; ++it) deg(i) += it.value();
  }
  const Eigen::VectorXd s = inv_sqrt_degree(deg);
  SparseRM m = a;
  for (Eigen::Index i = 0; i < m.outerSize(); ++i) {
    for (SparseRM::InnerIterator it(m, i); it; ++it) it.valueRef() *= s(i) * s(it.col());
  }
  return m;
}

SpectralEmbedding spectral_embedding(const Eigen::MatrixXd& a, const SpectralConfig& config) {
  validate(static_cast<std::size_t>(a.rows()), config);
  const Eigen::MatrixXd m = normalized_operator(a);
  const auto n = static_cast<std::size_t>(a.rows());
  if (config.eigsolver == EigSolver::Iterative) {
    const BlockOperator op = [&m](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out.noalias() = m * in; };
    return finish_embedding(top_eigenpairs_iterative(op, n, config.num_clusters, iterative_options(config)),
                            EigSolver::Iterative);
  }
  return finish_embedding(top_eigenpairs_dense(m, config.num_clusters), EigSolver::Dense);
}

SpectralEmbedding spectral_embedding(const SparseRM& a, const SpectralConfig& config) {
  const auto n = static_cast<std::size_t>(a.rows());
  validate(n, config);
  const SparseRM m = normalized_operator(a);
  auto dense = [&] {
    return finish_embedding(top_eigenpairs_dense(Eigen::MatrixXd(m), config.num_clusters), EigSolver::Dense);
  };
  if (config.eigsolver == EigSolver::Dense ||
      (config.eigsolver == EigSolver::Auto && n <= kSmallDense)) {
    return dense();
  }
  try {
    return finish_embedding(top_eigenpairs_iterative(m, config.num_clusters, iterative_options(config)),
                            EigSolver::Iterative);
  } catch (const EigenNonConvergence&) {
    if (config.eigsolver == EigSolver::Iterative || n > config.dense_max) throw;
    return dense();
  }
}

ClusteringResult spectral_cluster(const Eigen::MatrixXd& a, const SpectralConfig& config,
                                  const std::vector<int>* truth) {
  const auto t0 = Clock::now();
  SpectralEmbedding emb = spectral_embedding(a, config);
  return cluster_embedding(std::move(emb), seconds_since(t0), config, truth);
}

ClusteringResult spectral_cluster(const SparseRM& a, const SpectralConfig& config,
                                  const std::vector<int>* truth) {
  const auto t0 = Clock::now();
  SpectralEmbedding emb = spectral_embedding(a, config);
  return cluster_embedding(std::move(emb), seconds_since(t0), config, truth);
}

ClusteringResult spectral_cluster(const SparseSimilarity& s, const SpectralConfig& config,
                                  const std::vector<int>* truth) {
  return spectral_cluster(s.to_sparse(), config, truth);
}

}  // namespace pwspm
