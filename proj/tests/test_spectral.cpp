#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "pwspm/accuracy.hpp"
#include "pwspm/eigensolver.hpp"
#include "pwspm/kmeans.hpp"
#include "pwspm/spectral.hpp"

using namespace pwspm;

namespace {

Eigen::MatrixXd random_symmetric(Eigen::Index n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) a(i, j) = a(j, i) = normal(rng, 0.0, 1.0);
  }
  return a;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly)
      .eigenvalues()
      .cwiseAbs()
      .maxCoeff();
}

double worst_residual(const Eigen::MatrixXd& m, const EigenPairs& e) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < e.values.size(); ++c) {
    worst = std::max(worst, (m * e.vectors.col(c) - e.values(c) * e.vectors.col(c)).norm());
  }
  return worst;
}

SpectralConfig config(std::size_t clusters, EigSolver solver = EigSolver::Auto) {
  SpectralConfig c;
  c.num_clusters = clusters;
  c.eigsolver = solver;
  c.seed = 5;
  return c;
}

// Two noisy Gaussian blobs joined into a k-NN graph.
Eigen::MatrixXd blob_graph(std::size_t per, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  PointMatrix x(static_cast<Eigen::Index>(2 * per), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = normal(rng, i < static_cast<Eigen::Index>(per) ? 0.0 : 6.0, 1.0);
    x(i, 1) = normal(rng, 0.0, 1.0);
  }
  return build_full_similarity(Dataset(x), 7);
}

}  // namespace

TEST_CASE("dense eigenpairs are the largest ones with small residuals") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd m = random_symmetric(60 + 40 * seed, seed);
    const auto e = top_eigenpairs_dense(m, 4);
    const Eigen::VectorXd all =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
    for (Eigen::Index c = 0; c < 4; ++c) {
      CHECK(e.values(c) == doctest::Approx(all(all.size() - 1 - c)).epsilon(1e-10));
    }
    CHECK(worst_residual(m, e) <= 1e-8 * spectral_norm(m));
    CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK_THROWS(top_eigenpairs_dense(Eigen::MatrixXd::Identity(3, 3), 4));
}

TEST_CASE("iterative and dense solvers agree on random symmetric matrices") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Eigen::Index n = 50 + 50 * static_cast<Eigen::Index>(seed);
    const Eigen::MatrixXd m = random_symmetric(n, 100 + seed);
    const std::size_t count = 1 + seed % 4;
    const auto dense = top_eigenpairs_dense(m, count);
    const BlockOperator op = [&m](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = m * in; };
    IterativeOptions o;
    o.seed = seed;
    o.max_matvecs = 20000;
    const auto it = top_eigenpairs_iterative(op, static_cast<std::size_t>(n), count, o);
    CHECK((it.values - dense.values).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(worst_residual(m, it) <= 1e-8 * spectral_norm(m) * 1.0001);
  }
}

TEST_CASE("iterative solver reports non-convergence with its matvec count") {
  const Eigen::MatrixXd m = random_symmetric(200, 3);
  const BlockOperator op = [&m](const Eigen::MatrixXd& in, Eigen::MatrixXd& out) { out = m * in; };
  IterativeOptions o;
  o.max_matvecs = 10;
  try {
    top_eigenpairs_iterative(op, 200, 3, o);
    FAIL("expected EigenNonConvergence");
  } catch (const EigenNonConvergence& e) {
    CHECK(e.matvecs() >= 10);
    CHECK(std::string(e.what()).find("matrix-vector") != std::string::npos);
  }
}

TEST_CASE("normalised operator spectrum") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Eigen::MatrixXd a = blob_graph(40, seed);  // dense kernel: connected
    const Eigen::MatrixXd m = normalized_operator(a);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues();
    CHECK(ev.minCoeff() >= -1.0 - 1e-12);
    CHECK(ev.maxCoeff() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::SparseMatrix<double, Eigen::RowMajor> sa = a.sparseView();
    CHECK((Eigen::MatrixXd(normalized_operator(sa)) - m).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("block-diagonal similarity is recovered exactly") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(7, 7);
  a.topLeftCorner(3, 3).setOnes();
  a.bottomRightCorner(4, 4).setOnes();
  const std::vector<int> truth{0, 0, 0, 1, 1, 1, 1};
  for (EigSolver s : {EigSolver::Dense, EigSolver::Iterative}) {
    const auto r = spectral_cluster(a, config(2, s), &truth);
    REQUIRE(r.accuracy.has_value());
    CHECK(*r.accuracy == 1.0);
    CHECK(r.labels.size() == 7);
    CHECK(r.timings.eigen >= 0.0);
    CHECK(r.timings.kmeans >= 0.0);
  }
}

TEST_CASE("embedding rows have unit norm") {
  const Eigen::MatrixXd a = blob_graph(50, 9);
  const auto e = spectral_embedding(a, config(2));
  CHECK(e.zero_rows.empty());
  for (Eigen::Index i = 0; i < e.rows.rows(); ++i) CHECK(e.rows.row(i).norm() == doctest::Approx(1.0));
}

TEST_CASE("isolated vertices are handled") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(8, 8);
  a.block(0, 0, 3, 3).setOnes();
  a.block(3, 3, 4, 4).setOnes();
  for (int i = 0; i < 8; ++i) a(i, i) = 0.0;  // vertex 7 has no edges at all
  const auto r = spectral_cluster(a, config(2));
  CHECK(r.labels.size() == 8);
  for (int l : r.labels) CHECK((l == 0 || l == 1));
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[3] == r.labels[4]);
  CHECK(r.labels[0] != r.labels[3]);
}

TEST_CASE("clustering is invariant to the order of points") {
  const Eigen::MatrixXd a = blob_graph(60, 4);
  const auto n = a.rows();
  std::vector<Eigen::Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = make_rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) b(i, j) = a(perm[i], perm[j]);
  }
  const auto ra = spectral_cluster(a, config(2));
  const auto rb = spectral_cluster(b, config(2));
  std::vector<int> mapped(n);
  for (Eigen::Index i = 0; i < n; ++i) mapped[i] = ra.labels[perm[i]];
  CHECK(accuracy(rb.labels, mapped) == 1.0);
}

TEST_CASE("sparse input with both solvers gives the same partition") {
  SyntheticSpec spec;
  spec.family = Family::ThreeMoons;
  spec.points_per_cluster = {200};
  spec.seed = 12;
  const Dataset d = generate(spec);
  const auto s = build_knn_similarity(build_index(d), 15, 10, PowerParam::finite(10));
  const auto dense = spectral_cluster(s, config(3, EigSolver::Dense), &d.labels());
  const auto iter = spectral_cluster(s, config(3, EigSolver::Iterative), &d.labels());
  CHECK((dense.embedding.eigenvalues - iter.embedding.eigenvalues).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK(accuracy(dense.labels, iter.labels) >= 0.99);
  CHECK(iter.embedding.solver == EigSolver::Iterative);
}

TEST_CASE("configuration checks and json") {
  const Eigen::MatrixXd a = blob_graph(10, 1);
  CHECK_THROWS(spectral_cluster(a, config(1)));
  CHECK_THROWS(spectral_cluster(a, config(21)));
  SpectralConfig c = config(2);
  c.kmeans_restarts = 0;
  CHECK_THROWS(spectral_cluster(a, c));
  CHECK_THROWS(parse_eigsolver("qr"));
  const std::vector<int> truth(20, 0);
  const auto r = spectral_cluster(a, config(2), &truth);
  const auto j = to_json(r, true);
  CHECK(j["config"]["num_clusters"] == 2);
  CHECK(j["labels"].size() == 20);
  CHECK(j["timings"]["total"].get<double>() >= 0.0);
  CHECK_FALSE(to_json(r, false).contains("labels"));
  const SpectralConfig back = spectral_config_from_json(j["config"]);
  CHECK(back.seed == 5);
  CHECK(back.kmeans_restarts == 10);
  CHECK(back.kmeans_max_iter == 300);
}

TEST_CASE("k-means on two separated pairs") {
  Eigen::MatrixXd x(4, 1);
  x << 0.0, 1.0, 10.0, 12.0;
  const auto r = kmeans(x, 2);
  CHECK(r.labels[0] == r.labels[1]);
  CHECK(r.labels[2] == r.labels[3]);
  CHECK(r.labels[0] != r.labels[2]);
  CHECK(r.wcss == doctest::Approx(0.5 + 2.0));
  CHECK(within_cluster_ss(x, r.labels) == doctest::Approx(2.5));
}

TEST_CASE("k-means on identical points terminates") {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(10, 2, 3.0);
  const auto r = kmeans(x, 2);
  CHECK(r.wcss == 0.0);
  for (int l : r.labels) CHECK(l == r.labels[0]);
  CHECK_THROWS(kmeans(x, 11));
}

TEST_CASE("k-means beats random assignments and is seed-deterministic") {
  Rng rng = make_rng(17);
  Eigen::MatrixXd x(100, 3);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = uniform(rng, 0.0, 1.0);
  }
  KMeansOptions o;
  o.seed = 4;
  const auto r = kmeans(x, 4, o);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> labels(100);
    for (auto& l : labels) l = static_cast<int>(uniform_index(rng, 4));
    CHECK(r.wcss <= within_cluster_ss(x, labels));
  }
  CHECK(kmeans(x, 4, o).labels == r.labels);
  for (std::size_t t = 1; t < r.wcss_trace.size(); ++t) {
    CHECK(r.wcss_trace[t] <= r.wcss_trace[t - 1] * (1 + 1e-12));
  }
}

TEST_CASE("masked rows do not move the centres") {
  Eigen::MatrixXd x(5, 1);
  x << 0.0, 0.2, 10.0, 10.2, 1000.0;
  std::vector<bool> mask{true, true, true, true, false};
  const auto r = kmeans(x, 2, {}, mask);
  CHECK(r.labels[4] == r.labels[2]);
  CHECK(r.labels[0] != r.labels[2]);
  CHECK(r.wcss == doctest::Approx(0.04));
}
