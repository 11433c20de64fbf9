#include <doctest.h>

#include <algorithm>
#include <map>
#include <numbers>
#include <set>

#include "tpump/lattice.hpp"

using namespace tpump;

TEST_CASE("fig1c topology has seven six-site chains joined C to A") {
  const auto t = fig1c_topology();
  CHECK(t.num_chains() == 7);
  CHECK(t.num_sites() == 42);
  CHECK(t.num_trimers() == 14);
  CHECK(t.couplings().size() == 6);
  for (const auto& c : t.chains()) {
    CHECK(c.length == 6);
    CHECK(c.phase == doctest::Approx(std::numbers::pi / 3.0));
  }
  std::set<std::pair<int, int>> pairs;
  for (const auto& c : t.couplings()) {
    CHECK(c.from.edge == Edge::C);
    CHECK(c.to.edge == Edge::A);
    CHECK(c.strength == 1.0);
    pairs.emplace(c.from.chain, c.to.chain);
  }
  const std::set<std::pair<int, int>> expected{{1, 2}, {1, 3}, {3, 5}, {3, 7}, {2, 6}, {2, 4}};
  CHECK(pairs == expected);
}

TEST_CASE("flat indexing is a bijection with chain blocks in id order") {
  const auto t = ArrayTopology::build({{5, 3, 0.0}, {2, 9, 0.0}, {9, 6, 0.0}}, {});
  CHECK(t.chains()[0].id == 2);
  CHECK(t.chain_offset(2) == 0);
  CHECK(t.chain_offset(5) == 9);
  CHECK(t.chain_offset(9) == 12);
  for (std::size_t i = 0; i < t.num_sites(); ++i) CHECK(t.flatten(t.unflatten(i)) == i);
  CHECK(t.edge_site({5, Edge::A}) == 9);
  CHECK(t.edge_site({5, Edge::C}) == 11);
  CHECK(t.edge_site({9, Edge::C}) == 17);
  CHECK_THROWS_AS(t.flatten({5, 4}), ConfigError);
  CHECK_THROWS_AS(t.flatten({5, 0}), ConfigError);
  CHECK_THROWS_AS(t.flatten({3, 1}), ConfigError);
  CHECK_THROWS_AS(t.unflatten(18), ConfigError);
}

TEST_CASE("bonds: L-1 per chain plus one per coupling, always i < j") {
  const auto t = fig1c_topology();
  const auto intra = t.intra_chain_bonds(0.5);
  CHECK(intra.size() == 35);
  for (const auto& b : intra) {
    CHECK(b.j == b.i + 1);
    CHECK(b.strength == 0.5);
    CHECK(t.unflatten(b.i).chain == t.unflatten(b.j).chain);
  }
  const auto links = t.coupling_links();
  REQUIRE(links.size() == 6);
  for (const auto& l : links) {
    CHECK(l.i < l.j);
    const auto a = t.unflatten(l.i);
    const auto b = t.unflatten(l.j);
    CHECK(a.chain != b.chain);
  }
  // 1C -> 2A: flat 5 and 6.
  CHECK(std::any_of(links.begin(), links.end(), [](const Link& l) { return l.i == 5 && l.j == 6; }));
}

TEST_CASE("invalid topologies are rejected") {
  CHECK_THROWS_AS(ArrayTopology::build({}, {}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build({{1, 4, 0.0}}, {}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build({{1, 0, 0.0}}, {}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build({{0, 3, 0.0}}, {}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build({{1, 3, 0.0}, {1, 6, 0.0}}, {}), ConfigError);

  const std::vector<ChainSpec> two{{1, 6, 0.0}, {2, 6, 0.0}};
  CHECK_THROWS_AS(ArrayTopology::build(two, {{{1, Edge::C}, {3, Edge::A}, 1.0}}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build(two, {{{1, Edge::C}, {1, Edge::A}, 1.0}}), ConfigError);
  CHECK_THROWS_AS(ArrayTopology::build(two, {{{1, Edge::C}, {2, Edge::C}, 1.0}}), ConfigError);
  try {
    ArrayTopology::build(two, {{{1, Edge::A}, {2, Edge::A}, 1.0}});
    FAIL("A-A coupling accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("A edge coupled to A edge") != std::string::npos);
  }
  CHECK_THROWS_AS(ArrayTopology::build(two, {{{1, Edge::C}, {2, Edge::A}, 1.0},
                                             {{2, Edge::A}, {1, Edge::C}, 2.0}}),
                  ConfigError);
  CHECK_NOTHROW(ArrayTopology::build(two, {{{1, Edge::C}, {2, Edge::A}, 1.0},
                                           {{2, Edge::C}, {1, Edge::A}, 1.0}}));
}

TEST_CASE("edge labels parse case-insensitively") {
  CHECK(parse_edge("a") == Edge::A);
  CHECK(parse_edge("C") == Edge::C);
  CHECK(to_string(Edge::C) == "C");
  CHECK_THROWS_AS(parse_edge("B"), ConfigError);
}

TEST_CASE("bethe lattice: chain count, z = 3 junctions, A-C couplings only") {
  CHECK_THROWS_AS(bethe_topology(0), ConfigError);
  for (int depth = 1; depth <= 4; ++depth) {
    const auto t = bethe_topology(depth, 6, 0.3, 0.7);
    CHECK(t.num_chains() == static_cast<std::size_t>(3 * ((1 << depth) - 1)));
    std::map<std::pair<int, int>, int> degree;
    std::map<int, int> c_fanout;
    for (const auto& c : t.couplings()) {
      CHECK(c.from.edge == Edge::C);
      CHECK(c.to.edge == Edge::A);
      CHECK(c.strength == 0.7);
      ++degree[{c.from.chain, 1}];
      ++degree[{c.to.chain, 0}];
      ++c_fanout[c.from.chain];
    }
    for (const auto& [chain, n] : c_fanout) CHECK(n == 2);
    for (const auto& [edge, n] : degree)
      if (edge.second == 0) CHECK(n == 1);
    // Every junction is one C edge and two A edges.
    CHECK(t.couplings().size() == 2 * c_fanout.size());
    for (const auto& c : t.chains()) CHECK(c.phase == 0.3);
  }
}

TEST_CASE("ring topology closes two chains into a loop") {
  const auto t = ring_topology(9, 0.0, 1.0);
  CHECK(t.num_sites() == 18);
  const auto links = t.coupling_links();
  REQUIRE(links.size() == 2);
  std::set<std::pair<std::size_t, std::size_t>> got;
  for (const auto& l : links) got.emplace(l.i, l.j);
  CHECK(got == std::set<std::pair<std::size_t, std::size_t>>{{8, 9}, {0, 17}});
}

TEST_CASE("regions from chains and their validation") {
  const auto t = fig1c_topology();
  const auto r = t.region_of_chains("II", {2, 3});
  CHECK(r.name == "II");
  CHECK(r.sites.size() == 12);
  CHECK(r.sites.front() == 6);
  CHECK(r.sites.back() == 17);
  CHECK_NOTHROW(validate_regions(t, {t.region_of_chains("I", {1}), r}));
  CHECK_THROWS_AS(validate_regions(t, {t.region_of_chains("x", {1, 2}), r}), ConfigError);
  CHECK_THROWS_AS(validate_regions(t, {RegionSpec{"bad", {42}}}), ConfigError);
  CHECK_THROWS_AS(validate_regions(t, {RegionSpec{"dup", {3, 3}}}), ConfigError);
  CHECK_NOTHROW(validate_regions(t, {RegionSpec{"empty", {}}}));
}
