// SPDX-License-Identifier: Apache-2.0
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure. Each criterion collects every failed check rather than stopping
// at the first.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "edumetrics/compare.hpp"
#include "edumetrics/edumetrics.hpp"
#include "edumetrics/fixtures.hpp"
#include "edumetrics/json_schema.hpp"
#include "edumetrics/pipeline.hpp"
#include "oracles.hpp"

using namespace edumetrics;
namespace fs = std::filesystem;

namespace {

struct Checker {
  std::vector<std::string> failures;
  std::size_t checks = 0;

  void operator()(bool ok, const std::string& what) {
    ++checks;
    if (!ok && failures.size() < 10) failures.push_back(what);
    if (!ok && failures.size() == 10) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

catalog::TopicDistribution dist(std::initializer_list<std::pair<const char*, std::uint64_t>> items) {
  catalog::TopicDistribution d;
  for (auto [k, v] : items) d.add(k, v);
  return d;
}

position::CrossSiteGraph as_cross_site(const Digraph& g) {
  position::CrossSiteGraph c;
  for (const auto& n : g.names()) c.graph.add_node(n);
  for (auto [a, b] : g.edges()) c.add_link(g.name(a), g.name(b));
  return c;
}

// ---------------------------------------------------------------------------

void shannon_suite(Checker& check) {
  const auto t = Clock::now();
  for (std::uint64_t c : {1u, 7u, 1000u}) {
    fixtures::CatalogSpec s;
    s.topic_counts = {{"mathematics", c}};
    auto recs = fixtures::gen_catalog(s);
    auto d = catalog::shannon_diversity(catalog::offer_distribution(recs, catalog::Axis::topic));
    check(d.shannon == 0.0, "single topic H = 0 for count " + std::to_string(c));
    check(d.evenness >= 0.0 && d.evenness <= 1.0, "single topic evenness in [0,1]");
  }
  for (std::size_t k : {2u, 4u, 8u}) {
    for (std::uint64_t per : {1u, 5u, 123u}) {
      fixtures::CatalogSpec s;
      for (std::size_t i = 0; i < k; ++i) s.topic_counts["t" + std::to_string(i)] = per;
      auto recs = fixtures::gen_catalog(s);
      auto d = catalog::shannon_diversity(catalog::offer_distribution(recs, catalog::Axis::topic));
      check(near(d.shannon, std::log(static_cast<double>(k)), 1e-12),
            "uniform k=" + std::to_string(k) + " H = ln k");
      check(near(d.evenness, 1.0, 1e-12), "uniform k=" + std::to_string(k) + " evenness 1");
    }
  }
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    catalog::TopicDistribution base;
    const auto labels = 1 + rng() % 12;
    for (std::uint64_t i = 0; i < labels; ++i) base.add("t" + std::to_string(i), rng() % 50);
    if (base.total == 0) continue;
    const std::uint64_t m = 2 + rng() % 20;
    catalog::TopicDistribution scaled;
    for (const auto& [label, c] : base.counts) scaled.add(label, c * m);
    const auto taxonomy = labels + rng() % 5;
    auto a = catalog::shannon_diversity(base, taxonomy);
    auto b = catalog::shannon_diversity(scaled, taxonomy);
    check(near(a.shannon, b.shannon, 1e-12), "scale invariance of H");
    check(near(a.evenness, b.evenness, 1e-12), "scale invariance of evenness");
    check(a.shannon >= 0.0 && a.shannon <= std::log(static_cast<double>(taxonomy)) + 1e-12, "H within [0, ln S]");
    check(a.evenness >= 0.0 && a.evenness <= 1.0, "evenness in [0,1]");
  }
  check(near(catalog::shannon_diversity(dist({{"a", 8}, {"b", 2}})).shannon,
             -(0.8 * std::log(0.8) + 0.2 * std::log(0.2)), 1e-14),
        "two-topic hand value");
  check(seconds_since(t) < 1.0, "runtime under 1 s");
}

// ---------------------------------------------------------------------------

void structure_extremes(Checker& check) {
  using fixtures::GraphKind;
  for (std::size_t n = 3; n <= 8; ++n) {
    const auto ns = std::to_string(n);
    auto complete = fixtures::gen_graph({GraphKind::complete, n});
    auto edgeless = fixtures::gen_graph({GraphKind::edgeless, n});
    auto chain = fixtures::gen_graph({GraphKind::chain, n});
    auto cycle = fixtures::gen_graph({GraphKind::cycle, n});
    check(structure::navigability(complete).value == 1.0, "navigability(complete " + ns + ") = 1");
    check(structure::navigability(edgeless).value == 0.0, "navigability(edgeless " + ns + ") = 0");
    check(structure::linearity(chain).value == 1.0, "linearity(chain " + ns + ") = 1");
    check(structure::linearity(cycle).value == 0.0, "linearity(cycle " + ns + ") = 0");
  }
  auto chain3 = fixtures::gen_graph({GraphKind::chain, 3});
  auto nav = structure::navigability(chain3).value;
  check(nav && near(*nav, 5.0 / 12.0, 1e-12), "chain-of-3 navigability = 5/12");
}

// ---------------------------------------------------------------------------

void check_graph(Checker& check, const Digraph& g, std::mt19937_64& rng, const std::string& tag) {
  const auto n = g.size();
  const auto ref = oracle::path_enumeration_distances(g);
  const auto m = structure::converted_distances(g);
  bool same = true;
  for (std::size_t i = 0; i < n && same; ++i)
    for (std::size_t j = 0; j < n && same; ++j) {
      const std::uint64_t want = i == j ? 0 : ref[i][j] < 0 ? n : std::min<std::uint64_t>(ref[i][j], n);
      same = m.at(i, j) == want;
    }
  check(same, "converted distances match path enumeration (" + tag + ")");

  const auto dens = structure::density(g).value;
  const auto nav = structure::navigability(g).value;
  const auto lin = structure::linearity(g).value;
  check(dens && *dens >= 0.0 && *dens <= 1.0, "density in [0,1] (" + tag + ")");
  check(nav && *nav >= 0.0 && *nav <= 1.0, "navigability in [0,1] (" + tag + ")");
  check(lin && *lin >= 0.0 && *lin <= 1.0, "linearity in [0,1] (" + tag + ")");
  check(nav && near(*nav, oracle::compactness(g, n), 1e-12), "navigability matches oracle (" + tag + ")");
  check(lin && near(*lin, oracle::stratum(g), 1e-12), "linearity matches oracle (" + tag + ")");

  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  const auto h = oracle::relabel(g, perm, rng);
  check(structure::density(h).value == dens, "density isomorphism-invariant (" + tag + ")");
  check(structure::navigability(h).value == nav, "navigability isomorphism-invariant (" + tag + ")");
  check(structure::linearity(h).value == lin, "linearity isomorphism-invariant (" + tag + ")");
}

void graph_oracle(Checker& check) {
  const auto t = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t graphs = 0;
  for (std::size_t n = 2; n <= 5; ++n) {
    const std::uint64_t count = std::uint64_t{1} << (n * (n - 1));
    for (std::uint64_t bits = 0; bits < count; ++bits, ++graphs)
      check_graph(check, oracle::from_adjacency_bits(n, bits), rng,
                  "n=" + std::to_string(n) + " bits=" + std::to_string(bits));
  }
  for (int i = 0; i < 10000; ++i, ++graphs) {
    const std::size_t n = 2 + rng() % 7;
    const double p = static_cast<double>(rng() % 1000) / 1000.0;
    check_graph(check, oracle::random_digraph(n, p, rng), rng, "random #" + std::to_string(i));
  }
  check(graphs >= 10000, "at least 10,000 graphs");
  check(seconds_since(t) < 60.0, "runtime under 60 s");
}

// ---------------------------------------------------------------------------

usage::LogEntry view(const std::string& visitor, Instant t, const std::string& path) {
  usage::LogEntry e;
  e.visitor_key = visitor;
  e.client = "192.0.2.1";
  e.auth_user = "-";
  e.timestamp = t;
  e.method = "GET";
  e.path = path;
  e.protocol = "HTTP/1.1";
  e.status = 200;
  e.bytes = "1";
  e.user_agent = "Mozilla/5.0";
  return e;
}

void session_oracle(Checker& check) {
  const auto t = Clock::now();
  const Instant t0 = *parse_iso_instant("2008-03-01T00:00:00Z");
  const Seconds timeout{1800};
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<usage::LogEntry> entries;
    const auto visitors = 1 + rng() % 5;
    const auto count = rng() % 60;
    for (std::uint64_t i = 0; i < count; ++i) {
      // spacing near the timeout so boundaries are exercised
      const auto offset = static_cast<std::int64_t>(rng() % 4 == 0 ? (rng() % 8) * 1800 + rng() % 3 : rng() % 30000);
      entries.push_back(view("v" + std::to_string(rng() % visitors), t0 + Seconds{offset},
                             "/p" + std::to_string(rng() % 6)));
    }
    const auto sessions = usage::sessionize(entries, timeout);
    const auto ref = oracle::session_grouping(entries, timeout.count());

    std::map<std::string, std::vector<std::vector<std::int64_t>>> got;
    std::size_t views = 0;
    bool well_formed = true;
    for (const auto& s : sessions) {
      std::vector<std::int64_t> ts;
      for (const auto& v : s.views) ts.push_back(v.timestamp.time_since_epoch().count());
      well_formed = well_formed && !ts.empty() && std::is_sorted(ts.begin(), ts.end()) &&
                    s.start == s.views.front().timestamp && s.end == s.views.back().timestamp;
      views += s.views.size();
      got[s.visitor_key].push_back(std::move(ts));
    }
    const auto tag = " (trial " + std::to_string(trial) + ")";
    check(well_formed, "sessions ordered with matching bounds" + tag);
    check(views == entries.size(), "every view in exactly one session" + tag);
    check(got == ref, "sessionize equals brute-force grouping" + tag);

    // round trip: flattening and re-sessionizing reproduces the sessions
    std::vector<usage::LogEntry> flat;
    for (const auto& s : sessions)
      for (const auto& v : s.views) flat.push_back(view(s.visitor_key, v.timestamp, v.path));
    std::shuffle(flat.begin(), flat.end(), rng);
    check(usage::sessionize(flat, timeout) == sessions, "partition round-trip" + tag);
  }
  std::vector<usage::LogEntry> at{view("v", t0, "/a"), view("v", t0 + timeout, "/b")};
  std::vector<usage::LogEntry> over{view("v", t0, "/a"), view("v", t0 + timeout + Seconds{1}, "/b")};
  check(usage::sessionize(at, timeout).size() == 1, "gap equal to the timeout stays in one session");
  check(usage::sessionize(over, timeout).size() == 2, "gap of timeout + 1 s splits");
  check(seconds_since(t) < 30.0, "runtime under 30 s");
}

// ---------------------------------------------------------------------------

struct Recovered {
  std::vector<std::uint64_t> buckets;
  segmentation::Trend trend;
  segmentation::DynamicsClass dynamics;
  std::size_t bots_removed = 0;
  std::size_t humans_kept = 0;
  fixtures::GeneratedLog log;
};

Recovered recover(const std::vector<std::uint64_t>& visits, double bot_fraction, std::uint64_t seed) {
  fixtures::LogSpec spec;
  spec.visits_per_bucket = visits;
  spec.visitors = 6;
  spec.bot_fraction = bot_fraction;
  spec.paths = {"/a", "/b", "/c", "/d"};
  spec.seed = seed;
  Recovered r;
  r.log = fixtures::gen_log(spec);
  std::istringstream in(fixtures::join_lines(r.log.lines));
  auto parsed = usage::parse_log(in);
  auto split = usage::filter_agents(parsed.entries, usage::default_bot_signatures());
  r.bots_removed = split.bots.size();
  r.humans_kept = split.human.size();
  auto sessions = usage::sessionize(split.human);
  usage::AnalysisPeriod period{spec.start,
                               spec.start + Seconds{spec.bucket.count() * static_cast<std::int64_t>(visits.size())},
                               spec.bucket};
  auto demand = usage::overall_demand(sessions, period);
  r.buckets = demand.buckets;
  r.trend = segmentation::demand_trend(std::span<const std::uint64_t>(demand.buckets));
  r.dynamics = segmentation::dynamics_class(r.trend.relative_slope);
  return r;
}

void planted_recovery(Checker& check) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto tag = " (seed " + std::to_string(seed) + ")";
    auto g = recover({10, 20, 30}, 0.0, seed);
    check(g.buckets == std::vector<std::uint64_t>{10, 20, 30}, "planted buckets recovered" + tag);
    check(g.trend.relative_slope && near(*g.trend.relative_slope, 0.5, 1e-9), "relative slope 0.5" + tag);
    check(g.dynamics.value == segmentation::Dynamics::growing, "dynamics Growing" + tag);

    auto s = recover({20, 20, 20, 20}, 0.0, seed);
    check(s.trend.relative_slope && near(*s.trend.relative_slope, 0.0, 1e-12), "constant series slope 0" + tag);
    check(s.dynamics.value == segmentation::Dynamics::stable && !s.dynamics.declining, "constant series Stable" + tag);

    for (double f : {0.1, 0.5}) {
      auto b = recover({10, 20, 30}, f, seed);
      check(b.log.bot_lines > 0, "bot lines planted" + tag);
      check(b.bots_removed == b.log.bot_lines, "planted bot lines removed exactly" + tag);
      check(b.humans_kept == b.log.human_lines, "human lines kept exactly" + tag);
      check(b.buckets == std::vector<std::uint64_t>{10, 20, 30}, "buckets unaffected by bots" + tag);
      check(b.trend.relative_slope && near(*b.trend.relative_slope, 0.5, 1e-9), "slope unaffected by bots" + tag);
    }
  }
}

// ---------------------------------------------------------------------------

void position_suite(Checker& check) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 30;
    auto g = oracle::random_digraph(n, static_cast<double>(rng() % 100) / 100.0, rng);
    position::CrossSiteGraph c;
    for (const auto& name : g.names()) c.graph.add_node(name);
    for (auto [a, b] : g.edges()) c.add_link(g.name(a), g.name(b), 1 + rng() % 4);
    std::uint64_t in = 0, out = 0, win = 0, wout = 0;
    for (const auto& name : c.graph.names()) {
      in += position::authoritativeness(c, name).distinct;
      out += position::hubness(c, name).distinct;
      win += position::authoritativeness(c, name).weighted;
      wout += position::hubness(c, name).weighted;
    }
    check(in == out && in == c.graph.edge_count(), "handshake: sum Id = sum Od = |E|");
    check(win == wout, "handshake on page-level weights");
  }

  for (std::size_t n : {7u, 9u, 11u, 15u}) {
    auto g = as_cross_site(fixtures::gen_graph({fixtures::GraphKind::two_community, n}));
    const std::size_t a = (n - 1) / 2;
    const std::string bridge = "p" + std::to_string(n - 1);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const auto tag = " (n=" + std::to_string(n) + " seed=" + std::to_string(seed) + ")";
      auto c = position::detect_communities(g, seed);
      auto b = position::bridging(g, bridge, c);
      check(b.adjacent_communities == 2u, "bridge node adjacent_communities = 2" + tag);
      check(b.bridge_score == 1.0, "bridge node bridge_score = 1.0" + tag);
      check(b.bridge, "bridge flag set on the bridge node" + tag);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (i == 0 || i == a) continue;  // attachment points are not interior
        auto interior = position::bridging(g, "p" + std::to_string(i), c);
        check(!interior.bridge, "no bridge flag on interior node p" + std::to_string(i) + tag);
      }
      auto again = position::detect_communities(g, seed);
      check(again.label == c.label && again.iterations == c.iterations, "community detection deterministic" + tag);
    }
  }
}

// ---------------------------------------------------------------------------

void segmentation_totality(Checker& check) {
  using namespace segmentation;
  const std::map<std::string, double> ratios{{"big", 0.6}, {"small", 0.4}};
  const auto sizes = size_class(ratios);
  std::set<std::string> names;
  for (double slope : {0.3, -0.1, 0.01})
    for (const auto& [portal, size] : sizes.classes) {
      auto label = segment(dynamics_class(slope), size);
      if (label.quadrant) names.insert(quadrant_name(*label.quadrant));
    }
  const std::set<std::string> expected{
      "Growing portals with large relative size", "Growing portals with low relative size",
      "Stable portals with large relative size", "Stable portals with small relative size"};
  check(names == expected, "all four quadrants reached with their exact names");
  check(!segment(dynamics_class(std::nullopt), Size::large).segmented(), "no slope leaves a portal unsegmented");

  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> counts(2 + rng() % 10);
    for (auto& c : counts) c = static_cast<double>(rng() % 100);
    const double m = 0.5 + static_cast<double>(rng() % 1000) / 10.0;
    std::vector<double> scaled;
    for (double c : counts) scaled.push_back(c * m);
    auto a = demand_trend(std::span<const double>(counts));
    auto b = demand_trend(std::span<const double>(scaled));
    const bool both = a.relative_slope.has_value() == b.relative_slope.has_value();
    check(both && (!a.relative_slope || near(*a.relative_slope, *b.relative_slope, 1e-9)),
          "relative slope invariant under demand scaling");
    const double threshold = 0.01 + static_cast<double>(rng() % 50) / 100.0;
    if (a.relative_slope && std::abs(*a.relative_slope - threshold) > 1e-9)
      check(dynamics_class(a.relative_slope, threshold).value == dynamics_class(b.relative_slope, threshold).value,
            "dynamics class invariant under demand scaling");

    std::map<std::string, std::uint64_t> sizes_raw, sizes_scaled;
    const auto k = static_cast<std::uint64_t>(2 + rng() % 50);
    const auto portals = 2 + rng() % 8;
    for (std::uint64_t p = 0; p < portals; ++p) {
      const auto c = 1 + rng() % 100;
      sizes_raw["p" + std::to_string(p)] = c;
      sizes_scaled["p" + std::to_string(p)] = c * k;
    }
    auto ra = relative_size(sizes_raw);
    auto rb = relative_size(sizes_scaled);
    bool same_ratio = true;
    for (const auto& [p, r] : ra) same_ratio = same_ratio && near(r, rb.at(p), 1e-12);
    check(same_ratio, "relative size invariant under catalog scaling");
    check(size_class(ra).classes == size_class(rb).classes, "size class invariant under catalog scaling");
  }
}

// ---------------------------------------------------------------------------

config::RunConfig config_from_file(const fs::path& conf, const config::KeyValues& overrides = {}) {
  auto kv = config::parse_file(conf);
  for (const auto& [k, v] : overrides) kv[k] = v;
  return config::from_key_values(kv);
}

report::PortalReport run_report(const fs::path& conf, const config::KeyValues& overrides = {}) {
  auto run = pipeline::run_portal(config_from_file(conf, overrides));
  return report::assemble_report(run.outputs);
}

void end_to_end(Checker& check) {
  const fs::path dir = fs::temp_directory_path() / ("edumetrics_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fixtures::PortalSetSpec spec;
  spec.seed = 11;
  auto files = fixtures::write_portal_set(dir, spec);

  std::vector<report::PortalReport> reports;
  for (const auto& [portal, conf] : files.configs) {
    auto r = run_report(conf);
    const auto text = report::serialize(r);
    const auto errors = json_schema::validate(report::portal_report_schema(), nlohmann::json::parse(text));
    check(errors.empty(), portal + " report is schema-valid" + (errors.empty() ? "" : ": " + errors.front()));
    check(report::deserialize(text) == r, portal + " report round-trips");
    check(r.segment && r.segment->code, portal + " is segmented");
    check(r.provision && r.organization && r.position, portal + " has every section");
    reports.push_back(r);
  }
  if (reports.size() == 2 && reports[0].segment && reports[1].segment)
    check(reports[0].segment->code == reports[1].segment->code, "both portals share a segment");

  try {
    auto c = report::compare_within_segment(reports, 0.10);
    bool pointer = false;
    for (const auto& s : c.segments)
      for (const auto& p : s.pointers)
        if (p.portal == "portal-b" && p.leader == "portal-a" && p.metric == "navigability") pointer = true;
    check(pointer, "learning pointer from portal-b to portal-a on navigability");
  } catch (const std::exception& e) {
    check(false, std::string("comparison failed: ") + e.what());
  }

  auto mismatched = reports;
  if (mismatched.size() == 2) {
    mismatched[1] = run_report(files.configs.at("portal-b"), {{"gap_threshold", "0.2"}});
    bool refused = false;
    try {
      report::compare_within_segment(mismatched, 0.10);
    } catch (const report::ComparabilityError&) {
      refused = true;
    }
    check(refused, "threshold-mismatched reports are refused");
  }

  // scale: 100k log lines and a 5k-page site graph through the full pipeline
  const fs::path big = dir / "scale";
  fixtures::PortalSetSpec large;
  large.portals = {"portal-a"};
  large.pages = 5000;
  large.log_lines = 100000;
  large.records = 400;
  large.seed = 5;
  auto big_files = fixtures::write_portal_set(big, large);
  const auto t = Clock::now();
  auto run = pipeline::run_portal(config_from_file(big_files.configs.at("portal-a")));
  auto r = report::assemble_report(run.outputs);
  const double elapsed = seconds_since(t);
  const auto lines = run.diagnostics["usage"]["entries"].get<std::uint64_t>();
  const auto pages = run.diagnostics["structure"]["pages"].get<std::uint64_t>();
  check(lines >= 100000, "scale run parsed at least 100k log lines (" + std::to_string(lines) + ")");
  check(pages == 5000, "scale run used a 5k-page site graph");
  check(r.organization && r.organization->navigability, "scale run produced organization metrics");
  check(elapsed < 10.0, "scale run under 10 s (" + std::to_string(elapsed) + " s)");
  std::cout << "  scale run: " << lines << " log lines, " << pages << " pages, " << elapsed << " s\n";
  fs::remove_all(dir);
}

// ---------------------------------------------------------------------------

void sensitivity_guard(Checker& check) {
  const auto violations = report::sensitivity_violations();
  check(violations.empty(), "schema declares no traffic-volume keys" +
                                (violations.empty() ? std::string{} : ": " + violations.front()));
  check(report::portal_report_schema().value("additionalProperties", true) == false,
        "schema closes the top-level object");

  report::ModuleOutputs in;
  in.portal_id = "p";
  in.trend = segmentation::demand_trend(std::vector<double>{10, 20, 30});
  in.activity_level = 2.5;
  in.relative_size = 0.5;
  const auto j = nlohmann::json::parse(report::serialize(report::assemble_report(in)));
  std::vector<std::string> leaked;
  std::function<void(const nlohmann::json&, const std::string&)> walk = [&](const nlohmann::json& v,
                                                                           const std::string& path) {
    if (v.is_object())
      for (const auto& [k, x] : v.items()) {
        if (report::is_traffic_volume_key(k)) leaked.push_back(path + "/" + k);
        walk(x, path + "/" + k);
      }
    else if (v.is_array())
      for (const auto& x : v) walk(x, path);
  };
  walk(j, "");
  check(leaked.empty(), "serialized report carries no traffic-volume keys");
  check(j.dump().find("visits") == std::string::npos, "serialized report never names visits");
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    void (*run)(Checker&);
  };
  const Criterion criteria[] = {
      {1, "Shannon suite", shannon_suite},
      {2, "structure extremes", structure_extremes},
      {3, "exhaustive graph oracle", graph_oracle},
      {4, "sessionization oracle", session_oracle},
      {5, "planted recovery", planted_recovery},
      {6, "position suite", position_suite},
      {7, "segmentation totality", segmentation_totality},
      {8, "end-to-end", end_to_end},
      {9, "sensitivity guard", sensitivity_guard},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Checker check;
    const auto t = Clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check(false, std::string("unexpected exception: ") + e.what());
    }
    const double s = seconds_since(t);
    std::printf("%s criterion %d: %s (%zu checks, %.2f s)\n", check.ok() ? "PASS" : "FAIL", c.number, c.name,
                check.checks, s);
    for (const auto& f : check.failures) std::printf("    failed: %s\n", f.c_str());
    std::fflush(stdout);
    if (!check.ok()) ++failed;
  }
  std::printf("%d of 9 criteria passed\n", 9 - failed);
  return failed == 0 ? 0 : 1;
}
