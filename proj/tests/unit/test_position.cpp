// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "edumetrics/position.hpp"

using namespace edumetrics;
using namespace edumetrics::position;
using Catch::Approx;

namespace {

void clique(CrossSiteGraph& g, std::initializer_list<const char*> nodes) {
  for (const char* a : nodes)
    for (const char* b : nodes) g.add_link(a, b);
}

/// Two mutual triangles, and "m" linking once into each.
CrossSiteGraph two_triangles_and_bridge() {
  CrossSiteGraph g;
  clique(g, {"a1", "a2", "a3"});
  clique(g, {"b1", "b2", "b3"});
  g.add_link("m", "a1");
  g.add_link("m", "b1");
  return g;
}

CrossSiteBuild build(const std::string& links, const std::string& map) {
  std::istringstream l(links), m(map);
  return build_cross_site_graph(l, SiteMap::parse(m));
}

CrossSiteGraph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  CrossSiteGraph g;
  for (std::size_t i = 0; i < n; ++i) g.graph.add_node("s" + std::to_string(i));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && coin(rng)) g.add_link("s" + std::to_string(i), "s" + std::to_string(j), 1 + rng() % 3);
  return g;
}

}  // namespace

TEST_CASE("build_cross_site_graph aggregates page links", "[position][build]") {
  auto b = build(
      "http://a.example/p1,http://b.example/x\n"
      "http://a.example/p2,http://b.example/x\n"
      "http://a.example/p1,http://a.example/p2\n",
      "http://a.example/,A\nhttp://b.example/,B\n");
  auto& g = b.graph;
  CHECK(g.graph.size() == 2);
  CHECK(g.graph.edge_count() == 1);
  CHECK(g.multiplicity.at({*g.find("A"), *g.find("B")}) == 2);
  CHECK(b.intra_site_links_dropped == 1);
  CHECK(b.unmapped_urls == 0);
}

TEST_CASE("build_cross_site_graph groups unmapped URLs by registrable domain", "[position][build]") {
  auto b = build(
      "http://a.example/p1,http://www.recursos.edu.ar/x\n"
      "http://a.example/p1,http://docs.recursos.edu.ar/y\n",
      "http://a.example/,A\n");
  CHECK(b.graph.find("recursos.edu.ar"));
  CHECK(b.graph.graph.edge_count() == 1);
  CHECK(b.unmapped_urls == 2);
}

TEST_CASE("build_cross_site_graph longest prefix wins", "[position][build]") {
  auto b = build("http://host.example/portal/x,http://host.example/y\n",
                 "http://host.example/,H\nhttp://host.example/portal/,P\n");
  CHECK(b.graph.graph.has_edge(*b.graph.find("P"), *b.graph.find("H")));
}

TEST_CASE("build_cross_site_graph rejects graphs without links", "[position][build]") {
  CHECK_THROWS_AS(build("", ""), DomainError);
  CHECK_THROWS_AS(build("http://a.example/1,http://a.example/2\n", ""), DomainError);
}

TEST_CASE("authoritativeness and hubness", "[position][degree]") {
  CrossSiteGraph g;
  g.add_link("x", "t");
  g.add_link("y", "t");
  g.add_link("z", "t", 5);
  g.add_link("t", "x");
  g.add_link("t", "p");
  g.add_link("t", "q");
  g.add_link("t", "r");
  CHECK(authoritativeness(g, "t").distinct == 3);
  CHECK(authoritativeness(g, "t").weighted == 7);
  CHECK(authoritativeness(g, "z").distinct == 0);
  CHECK(hubness(g, "t").distinct == 4);
  CHECK(hubness(g, "p").distinct == 0);
  CHECK(hubness(g, "z").weighted == 5);
  CHECK_THROWS_AS(authoritativeness(g, "nowhere"), DomainError);
  CHECK_THROWS_AS(hubness(g, "nowhere"), DomainError);
}

TEST_CASE("handshake identity", "[position][degree][property]") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_graph(1 + rng() % 12, 0.3, rng);
    std::uint64_t in = 0, out = 0, win = 0, wout = 0, mult = 0;
    for (const auto& name : g.graph.names()) {
      in += authoritativeness(g, name).distinct;
      out += hubness(g, name).distinct;
      win += authoritativeness(g, name).weighted;
      wout += hubness(g, name).weighted;
    }
    for (const auto& [k, m] : g.multiplicity) mult += m;
    REQUIRE(in == g.graph.edge_count());
    REQUIRE(out == g.graph.edge_count());
    REQUIRE(win == mult);
    REQUIRE(wout == mult);
  }
}

TEST_CASE("detect_communities examples", "[position][communities]") {
  CrossSiteGraph disjoint;
  clique(disjoint, {"a1", "a2", "a3"});
  clique(disjoint, {"b1", "b2", "b3"});
  CHECK(detect_communities(disjoint, 1).community_count() == 2);

  CrossSiteGraph full;
  clique(full, {"a", "b", "c", "d", "e"});
  CHECK(detect_communities(full, 1).community_count() == 1);

  CrossSiteGraph joined;
  clique(joined, {"a1", "a2", "a3"});
  clique(joined, {"b1", "b2", "b3"});
  joined.add_link("a1", "b1");
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 12345ull}) {
    auto c = detect_communities(joined, seed);
    CHECK(c.community_count() == 2);
    CHECK(c.converged);
  }
}

TEST_CASE("detect_communities is deterministic and respects components", "[position][communities][property]") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph(2 + rng() % 15, 0.2, rng);
    const auto seed = rng();
    auto a = detect_communities(g, seed);
    auto b = detect_communities(g, seed);
    REQUIRE(a.label == b.label);
    REQUIRE(a.iterations == b.iterations);
    REQUIRE(a.algorithm == kLabelPropagation);
    REQUIRE(a.iterations <= 100);

    // two copies of g with no links between them
    CrossSiteGraph twice;
    for (const auto& name : g.graph.names()) {
      twice.graph.add_node("L" + name);
      twice.graph.add_node("R" + name);
    }
    for (auto [x, y] : g.graph.edges()) {
      twice.add_link("L" + g.graph.name(x), "L" + g.graph.name(y));
      twice.add_link("R" + g.graph.name(x), "R" + g.graph.name(y));
    }
    auto c = detect_communities(twice, seed);
    std::set<std::uint32_t> left, right;
    for (const auto& name : g.graph.names()) {
      left.insert(c.label[*twice.find("L" + name)]);
      right.insert(c.label[*twice.find("R" + name)]);
    }
    for (auto l : left) REQUIRE(right.count(l) == 0);
  }
}

TEST_CASE("bridging examples", "[position][bridging]") {
  auto g = two_triangles_and_bridge();
  auto c = detect_communities(g, 7);
  REQUIRE(c.community_count() >= 2);
  REQUIRE(c.label[*g.find("a1")] != c.label[*g.find("b1")]);

  auto m = bridging(g, "m", c);
  CHECK(m.degree == 2);
  CHECK(m.adjacent_communities == 2u);
  CHECK(m.bridge_score == 1.0);
  CHECK(m.bridge);

  for (const char* inner : {"a1", "a2", "a3", "b1", "b2", "b3"}) {
    auto r = bridging(g, inner, c);
    CHECK_FALSE(r.bridge);
  }
  CHECK(bridging(g, "a2", c).adjacent_communities == 1u);

  g.graph.add_node("alone");
  auto c2 = detect_communities(g, 7);
  auto iso = bridging(g, "alone", c2);
  CHECK(iso.isolated);
  CHECK_FALSE(iso.bridge_score);
  CHECK_FALSE(iso.adjacent_communities);
  CHECK(position_profile(g, "alone", c2).flags == std::vector<std::string>{"isolated_site"});

  CHECK_THROWS_AS(bridging(g, "m", c), DomainError);
}

TEST_CASE("bridging invariants", "[position][bridging][property]") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = random_graph(2 + rng() % 12, 0.25, rng);
    auto c1 = detect_communities(g, 1);
    auto c2 = detect_communities(g, 2);
    for (const auto& name : g.graph.names()) {
      auto r = bridging(g, name, c1);
      auto again = bridging(g, name, c1);
      REQUIRE(r.bridge == again.bridge);
      REQUIRE(r.degree == bridging(g, name, c2).degree);
      if (r.isolated) continue;
      REQUIRE(*r.adjacent_communities >= 1);
      REQUIRE(*r.adjacent_communities <= r.distinct_neighbors);
      REQUIRE(*r.bridge_score > 0.0);
      REQUIRE(*r.bridge_score <= 1.0);
    }
  }
}

TEST_CASE("position_profile role flags", "[position][profile]") {
  CrossSiteGraph in_star, out_star;
  for (const char* leaf : {"l1", "l2", "l3", "l4"}) {
    in_star.add_link(leaf, "center");
    out_star.add_link("center", leaf);
  }
  auto ci = detect_communities(in_star, 1);
  auto p = position_profile(in_star, "center", ci);
  CHECK(p.authority);
  CHECK_FALSE(p.hub);
  CHECK(p.degree() == 4);
  CHECK_FALSE(position_profile(in_star, "l1", ci).authority);

  auto co = detect_communities(out_star, 1);
  auto q = position_profile(out_star, "center", co);
  CHECK(q.hub);
  CHECK_FALSE(q.authority);

  // ins sorted [0,1,1,1,1,2,4] and outs [0,1,1,1,1,2,4]: both cutoffs are 1.5
  CrossSiteGraph mid;
  for (const char* s : {"s1", "s2", "s3", "s4"}) {
    mid.add_link(s, "A");
    mid.add_link("H", s);
  }
  mid.add_link("s1", "M");
  mid.add_link("M", "s2");
  auto cm = detect_communities(mid, 1);
  auto r = position_profile(mid, "M", cm);
  CHECK_FALSE(r.authority);
  CHECK_FALSE(r.hub);
  CHECK(position_profile(mid, "A", cm).authority);
  CHECK(position_profile(mid, "H", cm).hub);
}

TEST_CASE("quantile uses linear interpolation", "[position]") {
  CHECK(detail::quantile({2, 4, 4, 4, 4, 5, 5}, 0.5) == 4.0);
  CHECK(detail::quantile({1, 2, 3, 4}, 0.75) == Approx(3.25));
  CHECK(detail::quantile({7}, 0.75) == 7.0);
}
