#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "pwspm/dataset.hpp"

using namespace pwspm;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("pwspm_test_dataset_" + name);
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

SyntheticSpec planar(Family f) {
  SyntheticSpec s;
  s.family = f;
  s.ambient_dim = 2;
  s.noise_sigma = 0.0;
  s.seed = 11;
  return s;
}

}  // namespace

TEST_CASE("three lines at the default scale") {
  SyntheticSpec s;
  s.points_per_cluster = {500};
  s.seed = 7;
  const Dataset d = generate(s);
  CHECK(d.size() == 1500);
  CHECK(d.dim() == 50);
  CHECK(d.num_clusters() == 3);
  CHECK(d.name() == "three-lines");
}

TEST_CASE("three circles default counts and exact radii") {
  const Dataset d = generate(planar(Family::ThreeCircles));
  REQUIRE(d.size() == 1500);
  const double radii[] = {1.0, 2.25, 3.5};
  std::size_t count[3] = {0, 0, 0};
  for (std::size_t i = 0; i < d.size(); ++i) {
    const int c = d.labels()[i];
    ++count[c];
    const double r = std::hypot(d.points()(i, 0), d.points()(i, 1));
    CHECK(std::abs(r - radii[c]) <= 1e-12);
  }
  CHECK(count[0] == 222);
  CHECK(count[1] == 500);
  CHECK(count[2] == 778);
}

TEST_CASE("zero-noise lines and moons satisfy their manifold equations") {
  SUBCASE("lines") {
    const Dataset d = generate(planar(Family::ThreeLines));
    for (std::size_t i = 0; i < d.size(); ++i) {
      const double x = d.points()(i, 0), y = d.points()(i, 1);
      CHECK(std::abs(y - d.labels()[i]) <= 1e-12);
      CHECK(x >= 0.0);
      CHECK(x <= 5.0);
    }
  }
  SUBCASE("moons") {
    const Dataset d = generate(planar(Family::ThreeMoons));
    struct Arc { double cx, cy, r; bool upper; };
    const Arc arcs[] = {{0.0, 0.0, 1.0, true}, {1.5, 0.4, 1.5, false}, {3.0, 0.0, 1.0, true}};
    for (std::size_t i = 0; i < d.size(); ++i) {
      const Arc& a = arcs[d.labels()[i]];
      const double dx = d.points()(i, 0) - a.cx, dy = d.points()(i, 1) - a.cy;
      CHECK(std::abs(std::hypot(dx, dy) - a.r) <= 1e-12);
      CHECK((a.upper ? dy >= -1e-12 : dy <= 1e-12));
    }
  }
  SUBCASE("single circle") {
    const Dataset d = generate(planar(Family::Circle));
    CHECK(d.num_clusters() == 1);
    for (std::size_t i = 0; i < d.size(); ++i) {
      CHECK(std::abs(std::hypot(d.points()(i, 0), d.points()(i, 1)) - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("zero padding leaves trailing coordinates at zero without noise") {
  SyntheticSpec s = planar(Family::ThreeMoons);
  s.ambient_dim = 6;
  const Dataset d = generate(s);
  CHECK(d.points().rightCols(4).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("noise has the requested spread") {
  SyntheticSpec s;
  s.points_per_cluster = {400};
  s.ambient_dim = 20;
  s.noise_sigma = 0.3;
  s.seed = 5;
  const Dataset d = generate(s);
  const auto pad = d.points().rightCols(18);
  const double var = pad.array().square().mean();
  CHECK(std::sqrt(var) == doctest::Approx(0.3).epsilon(0.02));
}

TEST_CASE("lines without noise are at least one apart across clusters") {
  SyntheticSpec s = planar(Family::ThreeLines);
  s.points_per_cluster = {300};
  const Dataset d = generate(s);
  double best = INFINITY;
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = 0; j < d.size(); ++j) {
      if (d.labels()[i] == d.labels()[j]) continue;
      best = std::min(best, (d.points().row(i) - d.points().row(j)).norm());
    }
  }
  CHECK(best >= 1.0);
  CHECK(best < 1.01);
}

TEST_CASE("generation is deterministic in the seed") {
  SyntheticSpec s;
  s.family = Family::ThreeMoons;
  s.points_per_cluster = {50};
  s.seed = 99;
  const Dataset a = generate(s), b = generate(s);
  CHECK(a.points() == b.points());
  CHECK(a.labels() == b.labels());
  s.seed = 100;
  CHECK(generate(s).points() != a.points());
}

TEST_CASE("invalid specs and datasets are rejected") {
  SyntheticSpec s;
  s.ambient_dim = 1;
  CHECK_THROWS_AS(generate(s), std::invalid_argument);
  s.ambient_dim = 3;
  s.noise_sigma = -1.0;
  CHECK_THROWS_AS(generate(s), std::invalid_argument);

  PointMatrix x(2, 2);
  x << 0, 1, 2, NAN;
  CHECK_THROWS(Dataset(x));
  x(1, 1) = 3;
  CHECK_THROWS(Dataset(x, std::vector<int>{0, 2}));
  CHECK_THROWS(Dataset(x, std::vector<int>{0}));
  CHECK_THROWS(Dataset(PointMatrix(0, 2)));
  CHECK_NOTHROW(Dataset(x, std::vector<int>{1, 0}));
  CHECK_THROWS(parse_family("four-lines"));
  CHECK_THROWS(Dataset(x).labels());
}

TEST_CASE("csv loading") {
  SUBCASE("plain numeric table") {
    const auto p = temp_file("plain.csv");
    write_text(p, "0,1\n2.5,-3\n1e-3,4\n");
    const Dataset d = load_csv(p);
    CHECK(d.size() == 3);
    CHECK(d.dim() == 2);
    CHECK_FALSE(d.has_labels());
    CHECK(d.points()(2, 0) == 1e-3);
  }
  SUBCASE("string labels are remapped") {
    const auto p = temp_file("labels.csv");
    write_text(p, "0,0,a\n1,1,b\n2,2,a\n");
    CsvOptions o;
    o.label_column = -1;
    const Dataset d = load_csv(p, o);
    CHECK(d.dim() == 2);
    CHECK(d.labels() == std::vector<int>{0, 1, 0});
  }
  SUBCASE("numeric labels keep numeric order") {
    const auto p = temp_file("numlabels.csv");
    write_text(p, "10,0,0\n2,0,1\n9,0,2\n");
    CsvOptions o;
    o.label_column = 0;
    CHECK(load_csv(p, o).labels() == std::vector<int>{2, 0, 1});
  }
  SUBCASE("header skipping") {
    const auto p = temp_file("header.csv");
    write_text(p, "x,y\n1,2\n");
    CsvOptions o;
    o.skip_header = true;
    CHECK(load_csv(p, o).size() == 1);
    CHECK_THROWS_AS(load_csv(p), ParseError);
  }
  SUBCASE("errors carry the row number") {
    const auto ragged = temp_file("ragged.csv");
    write_text(ragged, "1,2\n3,4\n5\n");
    try {
      load_csv(ragged);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 3);
    }
    const auto bad = temp_file("bad.csv");
    write_text(bad, "1,2\nx,4\n");
    try {
      load_csv(bad);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.row() == 2);
    }
    const auto empty = temp_file("empty.csv");
    write_text(empty, "");
    CHECK_THROWS_AS(load_csv(empty), ParseError);
    CHECK_THROWS(load_csv(temp_file("does_not_exist.csv")));
  }
}

TEST_CASE("save then load round-trips exactly") {
  SyntheticSpec s;
  s.family = Family::ThreeCircles;
  s.points_per_cluster = {10, 20, 30};
  s.ambient_dim = 4;
  s.seed = 3;
  const Dataset d = generate(s);
  const auto p = temp_file("roundtrip.csv");
  save_csv(d, p);
  CsvOptions o;
  o.label_column = -1;
  const Dataset back = load_csv(p, o);
  CHECK(back.points() == d.points());
  CHECK(back.labels() == d.labels());
}

TEST_CASE("format_double is shortest round-trip") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.0, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("subset keeps order and re-densifies labels") {
  PointMatrix x(4, 1);
  x << 0, 1, 2, 3;
  const Dataset d(x, std::vector<int>{0, 1, 2, 1});
  const std::vector<std::size_t> idx{3, 2};
  const Dataset s = d.subset(idx);
  CHECK(s.points()(0, 0) == 3);
  CHECK(s.labels() == std::vector<int>{0, 1});
  CHECK(s.num_clusters() == 2);
}

TEST_CASE("descriptor and spec json") {
  SyntheticSpec s;
  s.family = Family::ThreeCircles;
  s.ambient_dim = 2;
  s.seed = 4;
  const auto j = to_json(s);
  CHECK(j["points_per_cluster"] == nlohmann::json({222, 500, 778}));
  const SyntheticSpec back = synthetic_spec_from_json(j);
  CHECK(back.counts() == s.counts());
  CHECK(back.seed == 4);
  const auto desc = describe(generate(s), {{"seed", 4}});
  CHECK(desc["n"] == 1500);
  CHECK(desc["D"] == 2);
  CHECK(desc["num_clusters"] == 3);
  CHECK(desc["provenance"]["seed"] == 4);
}
