#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "oracles.hpp"
#include "pwspm/path_metrics.hpp"

using namespace pwspm;

namespace {

const PowerParam kInf = PowerParam::infinity();
PowerParam P(double p) { return PowerParam::finite(p); }

Dataset line(std::initializer_list<double> xs, std::optional<std::vector<int>> labels = std::nullopt) {
  PointMatrix m(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) m(i++, 0) = x;
  return Dataset(m, std::move(labels));
}

}  // namespace

TEST_CASE("power parameter parsing") {
  CHECK(PowerParam::parse("inf").is_infinite());
  CHECK(PowerParam::parse("Infinity").is_infinite());
  CHECK(PowerParam::parse("2.5").value() == 2.5);
  CHECK(PowerParam::parse("10").to_string() == "10");
  CHECK(kInf.to_string() == "inf");
  CHECK_THROWS(PowerParam::parse("0.5"));
  CHECK_THROWS(PowerParam::parse("abc"));
  CHECK_THROWS(PowerParam::parse("nan"));
  CHECK_THROWS(P(0.99));
  CHECK_THROWS(kInf.value());
  const auto list = parse_power_list("1,2,10,inf");
  REQUIRE(list.size() == 4);
  CHECK(list[2] == P(10));
  CHECK(list[3] == kInf);
}

TEST_CASE("path length examples") {
  const std::vector<double> legs{3.0, 4.0};
  CHECK(path_length(legs, P(2)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(path_length(legs, kInf) == 4.0);
  CHECK(path_length(legs, P(1)) == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(path_length(std::vector<double>{1e200, 1e200}, P(4)) ==
        doctest::Approx(std::pow(2.0, 0.25) * 1e200));

  const Dataset d = line({0.0, 3.0, 7.0});
  CHECK(path_length(d, Path{{0, 1, 2}}, P(2)) == doctest::Approx(5.0));
  CHECK_THROWS(path_length(d, Path{{0}}, P(2)));
  CHECK_THROWS(path_length(d, Path{{0, 5}}, P(2)));
}

TEST_CASE("pairwise examples on a collinear chain") {
  const Dataset d = line({0.0, 1.0, 2.0});
  CHECK(pairwise_exact(d, P(2)).values(0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(pairwise_exact(d, kInf).values(0, 2) == 1.0);
  CHECK(pairwise_exact(d, P(1)).values(0, 2) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("oracle cap") {
  const Dataset d = oracle::random_cloud(30, 2, 1);
  CHECK_THROWS_WITH_AS(pairwise_exact(d, P(2), 20), doctest::Contains("path_knn"), std::invalid_argument);
}

TEST_CASE("Floyd-Warshall agrees with exhaustive path enumeration") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset d = oracle::random_cloud(7, 1 + seed % 3, 100 + seed);
    for (double p : {1.0, 1.5, 2.0, 4.0, 10.0, std::numeric_limits<double>::infinity()}) {
      const PowerParam pp = std::isinf(p) ? kInf : P(p);
      const auto m = pairwise_exact(d, pp).values;
      for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.size(); ++j) {
          CHECK(m(i, j) == doctest::Approx(oracle::brute_path_distance(d, i, j, p)).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("d^(1) equals the Euclidean distance") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset d = oracle::random_cloud(150, 2 + seed, seed, -3.0, 3.0);
    const auto m = pairwise_exact(d, P(1)).values;
    const auto e = pairwise_euclidean(d);
    CHECK((m - e).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("metric axioms") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const Dataset d = oracle::random_cloud(40, 3, seed + 40);
    for (PowerParam p : {P(1.5), P(3), kInf}) {
      const auto m = pairwise_exact(d, p).values;
      const Eigen::Index n = m.rows();
      CHECK(m.diagonal().cwiseAbs().maxCoeff() == 0.0);
      CHECK((m - m.transpose()).cwiseAbs().maxCoeff() == 0.0);
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index l = 0; l < n; ++l) {
            if (p.is_infinite()) {
              CHECK(m(i, l) <= std::max(m(i, j), m(j, l)));
            } else {
              CHECK(m(i, l) <= (m(i, j) + m(j, l)) * (1 + 1e-12));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("subset monotonicity") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const Dataset d = oracle::random_cloud(60, 2, seed + 7);
    std::vector<std::size_t> keep;
    Rng rng = make_rng(seed);
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (uniform(rng, 0.0, 1.0) < 0.6) keep.push_back(i);
    }
    const Dataset sub = d.subset(keep);
    for (PowerParam p : {P(2), P(7), kInf}) {
      const auto full = pairwise_exact(d, p).values;
      const auto part = pairwise_exact(sub, p).values;
      for (std::size_t a = 0; a < keep.size(); ++a) {
        for (std::size_t b = 0; b < keep.size(); ++b) {
          CHECK(full(keep[a], keep[b]) <= part(a, b) * (1 + 1e-12));
        }
      }
    }
  }
}

TEST_CASE("large exponents survive the power domain") {
  const Dataset d = oracle::random_cloud(50, 3, 77, 0.0, 1e6);
  const auto m = pairwise_exact(d, P(100)).values;
  const auto o = oracle::floyd_warshall(d, 100.0);
  CHECK(m.allFinite());
  CHECK(((m - o).cwiseAbs().array() <= 1e-9 * o.array().max(1.0)).all());
  // Wide dynamic range: tight pair and far outlier.
  PointMatrix x(4, 1);
  x << 0.0, 1e-9, 2e-9, 1e9;
  const Dataset spread(x);
  const auto s = pairwise_exact(spread, P(60)).values;
  CHECK(s.allFinite());
  CHECK(s(0, 2) == doctest::Approx(std::pow(2.0, 1.0 / 60.0) * 1e-9).epsilon(1e-9));
}

TEST_CASE("separation statistics examples") {
  const Dataset d = line({0.0, 0.1, 5.0, 5.1}, std::vector<int>{0, 0, 1, 1});
  const auto st = intra_inter_stats(d, P(2));
  CHECK(st.eps1 == doctest::Approx(0.1).epsilon(1e-12));
  REQUIRE(st.eps2.has_value());
  CHECK(*st.eps2 == doctest::Approx(4.9).epsilon(1e-12));
  const Dataset one = line({0.0, 1.0}, std::vector<int>{0, 0});
  CHECK_FALSE(intra_inter_stats(one, P(2)).eps2.has_value());
  CHECK_THROWS(intra_inter_stats(line({0.0, 1.0}), P(2)));
}

TEST_CASE("zero-noise lines are separated by the line spacing") {
  SyntheticSpec s;
  s.ambient_dim = 2;
  s.noise_sigma = 0.0;
  s.points_per_cluster = {100};
  s.seed = 3;
  const Dataset d = generate(s);
  for (PowerParam p : {P(2), P(10), kInf}) {
    CHECK(*intra_inter_stats(d, p).eps2 >= 1.0);
  }
}

TEST_CASE("distance matrix csv export") {
  const auto path = std::filesystem::temp_directory_path() / "pwspm_test_dm.csv";
  write_csv(pairwise_exact(line({0.0, 1.0, 2.0}), P(2)), path);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("0,1,1.41421356", 0) == 0);
}
