#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "pwspd/core.hpp"
#include "pwspd/neighbors.hpp"
#include "pwspd/random.hpp"

using namespace pwspd;

namespace {

PointMatrix random_points(Index n, Index dim, std::uint64_t seed) {
  Rng rng(seed);
  PointMatrix x(n, dim);
  for (Index i = 0; i < n; ++i)
    for (Index c = 0; c < dim; ++c) x(i, c) = rng.uniform();
  return x;
}

}  // namespace

TEST_CASE("point cloud rejects bad input") {
  PointMatrix x(3, 2);
  x << 0, 0, 1, 0, 0, 1;
  CHECK_NOTHROW(PointCloud(x, 2));
  CHECK_THROWS_AS(PointCloud(x, 3), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(x, 0), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(PointMatrix(0, 2), 1), InvalidArgument);
  CHECK_THROWS_AS(PointCloud(x, 2, std::vector<int>{0, 1}), InvalidArgument);
  x(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(PointCloud(x, 2), InvalidArgument);
  x(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(PointCloud(x, 2), InvalidArgument);
}

TEST_CASE("labels round trip through the accessor") {
  PointMatrix x(2, 1);
  x << 0, 1;
  const PointCloud c(x, 1, std::vector<int>{3, 4});
  REQUIRE(c.has_labels());
  CHECK(c.labels() == std::vector<int>{3, 4});
  CHECK_THROWS(PointCloud(x, 1).labels());
}

TEST_CASE("pairwise euclidean is symmetric with a zero diagonal") {
  const PointCloud c(random_points(30, 3, 1), 3);
  const DistanceMatrix d = pairwise_euclidean(c);
  CHECK(d.euclidean);
  CHECK(d.p == 1.0);
  for (Index i = 0; i < 30; ++i) {
    CHECK(d(i, i) == 0.0);
    for (Index j = 0; j < 30; ++j) {
      CHECK(d(i, j) == d(j, i));
      CHECK(d(i, j) == doctest::Approx((c.point(i) - c.point(j)).norm()).epsilon(1e-15));
    }
  }
}

TEST_CASE("duplicate points are at distance exactly zero") {
  PointMatrix x(3, 2);
  x << 0.1, 0.7, 0.1, 0.7, 0.3, 0.2;
  CHECK(pairwise_euclidean(PointCloud(x, 2))(0, 1) == 0.0);
}

TEST_CASE("power validation") {
  CHECK_NOTHROW(validate_power(1.0));
  CHECK_NOTHROW(validate_power(7.5));
  CHECK_THROWS_AS(validate_power(0.5), InvalidArgument);
  CHECK_NOTHROW(validate_power(0.5, PowerOptions{true}));
  CHECK_THROWS_AS(validate_power(0.0, PowerOptions{true}), InvalidArgument);
  CHECK_THROWS_AS(validate_power(-1.0, PowerOptions{true}), InvalidArgument);
  CHECK_THROWS_AS(validate_power(std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
  CHECK_THROWS_AS(validate_power(std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST_CASE("power weights follow the adjacency slots") {
  const PointCloud c(random_points(10, 2, 2), 2);
  const NeighborGraph g = knn_graph(c, 3);
  const auto w = power_weights(g, 3.0);
  REQUIRE(w.size() == g.lengths().size());
  for (std::size_t s = 0; s < w.size(); ++s) CHECK(w[s] == doctest::Approx(std::pow(g.lengths()[s], 3.0)));
}

TEST_CASE("graph construction merges orientations and drops degenerate edges") {
  const std::vector<NeighborGraph::Edge> edges{{0, 1, 1.0}, {1, 0, 1.0}, {1, 2, 2.0}, {2, 2, 0.5}, {0, 3, 0.0}};
  const NeighborGraph g(4, edges, 1);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(2, 2));
  CHECK_FALSE(g.has_edge(0, 3));
  CHECK(g.degree(3) == 0);
  const auto list = g.edges();
  REQUIRE(list.size() == 2);
  CHECK(list[0].i == 0);
  CHECK(list[0].j == 1);
  CHECK(list[1].length == 2.0);
}

TEST_CASE("adopted adjacency must be consistent") {
  CHECK_NOTHROW(NeighborGraph::from_adjacency(2, 1, {0, 1, 2}, {1, 0}, {1.0, 1.0}));
  CHECK_THROWS_AS(NeighborGraph::from_adjacency(2, 1, {0, 1}, {1, 0}, {1.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(NeighborGraph::from_adjacency(2, 1, {0, 1, 2}, {1, 0}, {1.0}), InvalidArgument);
}

TEST_CASE("csv parsing") {
  std::istringstream in("# comment\n0.5,1\n\n  2,-3e-1\n");
  const PointCloud c = parse_point_cloud(in, 2);
  REQUIRE(c.size() == 2);
  CHECK(c.point(1)(1) == -0.3);

  std::istringstream labeled("0,0,1\n1,1,0\n");
  const PointCloud l = parse_point_cloud(labeled, 2, CsvOptions{true});
  CHECK(l.ambient_dim() == 2);
  CHECK(l.labels() == std::vector<int>{1, 0});
}

TEST_CASE("csv errors name the offending line") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      parse_point_cloud(in, 1);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("1,2\n3,x\n") == 2);
  CHECK(line_of("1,2\n3\n") == 2);
  CHECK(line_of("# c\n1,2\n3,nan\n") == 3);
  CHECK(line_of("1,2,\n") == 1);
  std::istringstream empty("# nothing\n");
  CHECK_THROWS_AS(parse_point_cloud(empty, 1), ParseError);
}

TEST_CASE("point csv round trips exactly") {
  const PointCloud c(random_points(25, 3, 9), 2);
  std::stringstream buf;
  write_point_cloud(buf, c);
  const PointCloud back = parse_point_cloud(buf, 2);
  CHECK(back.points() == c.points());
}

TEST_CASE("distance csv round trips including infinity") {
  DistanceMatrix d;
  d.values = Eigen::MatrixXd{{0.0, 0.1, std::numeric_limits<double>::infinity()},
                             {0.1, 0.0, 1.0 / 3.0},
                             {std::numeric_limits<double>::infinity(), 1.0 / 3.0, 0.0}};
  std::stringstream buf;
  write_distance_csv(buf, d);
  const DistanceMatrix back = parse_distance_csv(buf);
  CHECK(back.values == d.values);
  std::istringstream ragged("0,1\n1\n");
  CHECK_THROWS_AS(parse_distance_csv(ragged), ParseError);
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  for (double v : {1.0 / 3.0, 1e-300, 6.02214076e23, -0.0})
    CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("checksum is stable and sensitive") {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
  const std::string h = checksum(a);
  CHECK(h.size() == 16);
  CHECK(checksum(a) == h);
  a(2, 1) = std::nextafter(0.0, 1.0);
  CHECK(checksum(a) != h);
  // FNV-1a offset basis for empty input.
  CHECK(checksum(Eigen::MatrixXd(0, 0)) == "cbf29ce484222325");
}
