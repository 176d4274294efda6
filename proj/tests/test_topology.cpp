#include "lfc/topology.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"

using namespace lfc;

TEST_SUITE("topology") {

TEST_CASE("distance table is symmetric with a zero diagonal") {
  int nonzero = 0;
  for (int i = 0; i < kAreaCount; ++i) {
    CHECK(kTieDistanceTable[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] == 0.0);
    for (int j = i + 1; j < kAreaCount; ++j) {
      const double dij = kTieDistanceTable[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double dji = kTieDistanceTable[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      CHECK(dij == dji);
      CHECK(dij >= 0.0);
      if (dij != 0.0) ++nonzero;
    }
  }
  CHECK(nonzero == 53);
}

TEST_CASE("standard topology: 53 lines, connected, ordered endpoints") {
  const Topology topo = build_eea_topology();
  CHECK(topo.lines().size() == 53);
  CHECK(topo.connected());
  for (const TieLine& l : topo.lines()) {
    CHECK(l.a < l.b);
    CHECK(l.d > 0.0);
    CHECK(l.k == 1.0);
    const double table =
        kTieDistanceTable[static_cast<std::size_t>(l.a)][static_cast<std::size_t>(l.b)];
    CHECK(l.d == table * 1000.0);
  }
}

TEST_CASE("tie_coefficient is k over d") {
  CHECK(tie_coefficient({0, 1, 500.0, 1.0}) == doctest::Approx(0.002).epsilon(1e-15));
  CHECK(tie_coefficient({0, 1, 250.0, 2.0}) == doctest::Approx(0.008).epsilon(1e-15));
  CHECK_THROWS_AS(tie_coefficient({0, 1, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(tie_coefficient({0, 1, -3.0, 1.0}), std::invalid_argument);
}

TEST_CASE("adjacency mirrors the line list") {
  const Topology topo = build_eea_topology();
  int degree_sum = 0;
  for (int i = 0; i < kAreaCount; ++i) {
    for (const auto& nb : topo.neighbors(i)) {
      CHECK(nb.area != i);
      CHECK(nb.coeff > 0.0);
      // The reverse edge must exist with the same coefficient.
      bool mirrored = false;
      for (const auto& back : topo.neighbors(nb.area)) {
        if (back.area == i && back.coeff == nb.coeff) mirrored = true;
      }
      CHECK(mirrored);
    }
    degree_sum += static_cast<int>(topo.neighbors(i).size());
  }
  CHECK(degree_sum == 2 * 53);
}

TEST_CASE("tie power: zero angles, single-edge pulse, antisymmetry") {
  const Topology topo = build_eea_topology();
  std::array<double, kAreaCount> angles{};
  for (double p : tie_power(angles, topo)) CHECK(p == 0.0);

  // A unit angle on one area pushes coeff-sum out of it and coeff into
  // each neighbor.
  angles[9] = 1.0;  // DE
  const auto pulse = tie_power(angles, topo);
  double expect = 0.0;
  for (const auto& nb : topo.neighbors(9)) expect += nb.coeff;
  CHECK(pulse[9] == doctest::Approx(expect).epsilon(1e-14));
  for (const auto& nb : topo.neighbors(9)) {
    CHECK(pulse[static_cast<std::size_t>(nb.area)] == doctest::Approx(-nb.coeff).epsilon(1e-14));
  }

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-30.0, 30.0);
  for (int trial = 0; trial < 100; ++trial) {
    double scale = 0.0;
    for (auto& a : angles) {
      a = dist(rng);
      scale = std::max(scale, std::abs(a));
    }
    const auto p = tie_power(angles, topo);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(std::abs(sum) <= 1e-12 * std::max(1.0, scale));
  }
}

TEST_CASE("edge list CSV shape") {
  const Topology topo = build_eea_topology();
  std::istringstream in(topo.edge_list_csv());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "iso_a,iso_b,d_km,k");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  CHECK(rows == 53);
}

TEST_CASE("a custom line set is honored") {
  // Three areas in a path: 0-1-2.
  Topology topo({{0, 1, 100.0, 1.0}, {1, 2, 200.0, 1.0}});
  CHECK(!topo.connected());  // remaining 23 areas are isolated
  std::array<double, kAreaCount> angles{};
  angles[0] = 2.0;
  const auto p = tie_power(angles, topo);
  CHECK(p[0] == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-0.02).epsilon(1e-14));
  CHECK(p[2] == 0.0);
  CHECK(p[25] == 0.0);
}

}  // TEST_SUITE
