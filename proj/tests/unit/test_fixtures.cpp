// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "edumetrics/catalog.hpp"
#include "edumetrics/fixtures.hpp"
#include "edumetrics/position.hpp"
#include "edumetrics/segmentation.hpp"
#include "edumetrics/structure.hpp"
#include "edumetrics/usage.hpp"

using namespace edumetrics;
using namespace edumetrics::fixtures;
using Catch::Approx;

namespace {

position::CrossSiteGraph as_cross_site(const Digraph& g) {
  std::istringstream links(page_links_text(g)), map(site_map_text(g));
  return position::build_cross_site_graph(links, position::SiteMap::parse(map)).graph;
}

usage::LogParseResult parse(const GeneratedLog& log) {
  std::istringstream in(join_lines(log.lines));
  return usage::parse_log(in);
}

}  // namespace

TEST_CASE("gen_graph shapes", "[fixtures][graph]") {
  auto chain = gen_graph({GraphKind::chain, 4});
  CHECK(chain.size() == 4);
  CHECK(chain.edge_count() == 3);
  CHECK(gen_graph({GraphKind::complete, 3}).edge_count() == 6);
  CHECK(gen_graph({GraphKind::cycle, 5}).edge_count() == 5);
  CHECK(gen_graph({GraphKind::star, 5}).edge_count() == 4);
  CHECK(gen_graph({GraphKind::edgeless, 5}).edge_count() == 0);
  CHECK(gen_graph({GraphKind::chain, 1}).size() == 1);
  CHECK_THROWS_AS(gen_graph({GraphKind::chain, 0}), DomainError);
  CHECK_THROWS_AS(gen_graph({GraphKind::two_community, 4}), DomainError);
  CHECK_THROWS_AS(graph_kind("lattice"), ConfigError);
  CHECK(graph_kind("two-community") == GraphKind::two_community);
}

TEST_CASE("gen_graph random digraphs are reproducible", "[fixtures][graph]") {
  GraphSpec s{GraphKind::random_digraph, 30, 99, 0.2};
  CHECK(edge_list_text(gen_graph(s)) == edge_list_text(gen_graph(s)));
  s.seed = 100;
  auto other = edge_list_text(gen_graph(s));
  s.seed = 99;
  CHECK(other != edge_list_text(gen_graph(s)));
}

TEST_CASE("two-community graphs plant two communities and a bridge", "[fixtures][graph]") {
  for (std::size_t n : {5u, 6u, 7u, 9u, 12u}) {
    auto g = as_cross_site(gen_graph({GraphKind::two_community, n}));
    const std::string bridge = "p" + std::to_string(n - 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      auto c = position::detect_communities(g, seed);
      INFO("n=" << n << " seed=" << seed);
      REQUIRE(c.label[*g.find("p0")] != c.label[*g.find("p" + std::to_string((n - 1) / 2))]);
      auto b = position::bridging(g, bridge, c);
      CHECK(b.adjacent_communities == 2u);
      CHECK(b.bridge_score == 1.0);
      CHECK(b.bridge);
    }
  }
}

TEST_CASE("edge_list_text feeds build_site_graph", "[fixtures][graph]") {
  auto g = gen_graph({GraphKind::star, 4, 0, 0.3, "page"});
  g.add_node("orphan");
  std::istringstream in(edge_list_text(g));
  auto b = structure::build_site_graph(in);
  CHECK(b.site.graph.size() == 5);
  CHECK(b.site.graph.edge_count() == 3);
  CHECK(b.site.graph.name(b.site.root) == "page0");
  CHECK(structure::depth(b.site).unreachable == 1);
}

TEST_CASE("gen_catalog plants diversity and age", "[fixtures][catalog]") {
  CatalogSpec uniform;
  uniform.topic_counts = {{"a", 5}, {"b", 5}, {"c", 5}, {"d", 5}};
  auto u = gen_catalog(uniform);
  CHECK(catalog::shannon_diversity(catalog::offer_distribution(u, catalog::Axis::topic)).shannon ==
        Approx(std::log(4.0)).epsilon(1e-14));

  CatalogSpec single;
  single.topic_counts = {{"math", 7}};
  CHECK(catalog::shannon_diversity(catalog::offer_distribution(gen_catalog(single), catalog::Axis::topic))
            .shannon == 0.0);

  CatalogSpec aged;
  aged.topic_counts = {{"a", 4}};
  aged.ages_days = {10, 20};
  CHECK(catalog::average_age(gen_catalog(aged), aged.reference).mean_days == 15.0);

  aged.topic_counts = {{"a", 3}};
  CHECK_THROWS_AS(gen_catalog(aged), DomainError);
}

TEST_CASE("catalog_csv round-trips through the parser", "[fixtures][catalog]") {
  CatalogSpec s;
  s.topic_counts = {{"math, algebra", 3}, {"history", 2}};
  s.resource_types = {"guide \"teacher\"", "activity"};
  s.seed = 5;
  auto records = gen_catalog(s);
  std::istringstream in(catalog_csv(records));
  auto parsed = catalog::parse_catalog(in);
  REQUIRE(parsed.records.size() == records.size());
  CHECK(parsed.diagnostics.error_count() == 0);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed.records[i].identifier == records[i].identifier);
    CHECK(parsed.records[i].topic == records[i].topic);
    CHECK(parsed.records[i].resource_type == records[i].resource_type);
    CHECK(parsed.records[i].published == records[i].published);
  }
  CHECK(catalog_csv(gen_catalog(s)) == catalog_csv(records));
}

TEST_CASE("gen_log recovers planted demand", "[fixtures][log]") {
  LogSpec spec;
  spec.visits_per_bucket = {10, 20, 30};
  spec.visitors = 5;
  spec.paths = {"/a", "/b", "/c"};
  spec.seed = 3;
  auto log = gen_log(spec);
  CHECK(log.visits == 60);
  auto parsed = parse(log);
  CHECK(parsed.diagnostics.error_count() == 0);
  auto sessions = usage::sessionize(parsed.entries);
  usage::AnalysisPeriod period{spec.start, spec.start + Seconds{3 * 86400}, spec.bucket};
  auto demand = usage::overall_demand(sessions, period);
  CHECK(demand.buckets == std::vector<std::uint64_t>{10, 20, 30});
  auto trend = segmentation::demand_trend(std::span<const std::uint64_t>(demand.buckets));
  CHECK(trend.relative_slope.value() == Approx(0.5).margin(1e-9));
  CHECK(usage::activity_level(sessions) ==
        Approx(static_cast<double>(log.human_lines) / static_cast<double>(log.visits)));
}

TEST_CASE("gen_log bot lines are removed exactly", "[fixtures][log]") {
  LogSpec spec;
  spec.visits_per_bucket = {8, 8};
  spec.visitors = 4;
  spec.bot_fraction = 0.5;
  spec.seed = 11;
  auto log = gen_log(spec);
  CHECK(log.bot_lines == log.human_lines);
  auto parsed = parse(log);
  auto split = usage::filter_agents(parsed.entries, usage::default_bot_signatures());
  CHECK(split.bots.size() == log.bot_lines);
  CHECK(split.human.size() == log.human_lines);
}

TEST_CASE("gen_log edge cases", "[fixtures][log]") {
  LogSpec none;
  none.visitors = 0;
  CHECK(gen_log(none).lines.empty());

  LogSpec crowded;
  crowded.visits_per_bucket = {100};
  crowded.visitors = 1;
  CHECK_THROWS_AS(gen_log(crowded), DomainError);

  LogSpec orphan;
  orphan.visits_per_bucket = {1};
  orphan.visitors = 0;
  CHECK_THROWS_AS(gen_log(orphan), DomainError);

  LogSpec s;
  s.visits_per_bucket = {5, 3};
  s.visitors = 2;
  s.bot_fraction = 0.2;
  s.seed = 8;
  CHECK(gen_log(s).lines == gen_log(s).lines);
}
