// SPDX-License-Identifier: Apache-2.0
#pragma once

// Per-portal pipeline: catalog / structure / usage, then position, then
// segmentation, then report assembly. Each stage records its raw tallies in a
// local-only diagnostics document.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edumetrics/catalog.hpp"
#include "edumetrics/config.hpp"
#include "edumetrics/error.hpp"
#include "edumetrics/io.hpp"
#include "edumetrics/position.hpp"
#include "edumetrics/report.hpp"
#include "edumetrics/segmentation.hpp"
#include "edumetrics/structure.hpp"
#include "edumetrics/usage.hpp"

namespace edumetrics::pipeline {

using nlohmann::json;
using config::RunConfig;

inline json row_errors(const ParseDiagnostics& d, std::size_t limit = 20) {
  json errs = json::array();
  for (std::size_t i = 0; i < d.errors.size() && i < limit; ++i)
    errs.push_back({{"line", d.errors[i].line}, {"message", d.errors[i].message}});
  return {{"lines_read", d.lines_read}, {"malformed", d.error_count()}, {"first_errors", errs}};
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// ---------------------------------------------------------------------------
// Catalog

struct CatalogStage {
  catalog::CatalogParseResult parsed;
  std::optional<catalog::TopicTaxonomy> taxonomy;
};

inline CatalogStage load_catalog(const RunConfig& cfg) {
  if (!cfg.catalog) throw ConfigError("no catalog file configured ('catalog')");
  CatalogStage s;
  std::istringstream in(io::read_file(*cfg.catalog));
  s.parsed = catalog::parse_catalog(in);
  if (cfg.taxonomy) {
    std::istringstream tin(io::read_file(*cfg.taxonomy));
    s.taxonomy = catalog::TopicTaxonomy::parse(tin);
  }
  return s;
}

/// Portal whose metrics are computed: the configured one, or the only portal
/// present in the catalog.
inline std::string resolve_portal(const RunConfig& cfg, const CatalogStage* cat) {
  if (!cfg.portal_id.empty()) return cfg.portal_id;
  if (cat) {
    auto portals = catalog::portals_of(cat->parsed.records);
    if (portals.size() == 1) return portals.front();
  }
  throw ConfigError("'portal_id' must be set");
}

struct ProvisionMetrics {
  catalog::Diversity offered;
  std::optional<catalog::Richness> richness;
  catalog::AgeProfile age;
  catalog::TopicDistribution by_topic;
  catalog::TopicDistribution by_type;
};

inline ProvisionMetrics provision_metrics(const std::vector<catalog::ContentRecord>& records,
                                          const std::optional<catalog::TopicTaxonomy>& taxonomy,
                                          Date reference) {
  ProvisionMetrics m;
  m.by_topic = catalog::offer_distribution(records, catalog::Axis::topic);
  m.by_type = catalog::offer_distribution(records, catalog::Axis::resource_type);
  m.offered = catalog::shannon_diversity(
      m.by_topic, taxonomy ? std::optional<std::size_t>(taxonomy->size()) : std::nullopt);
  if (taxonomy) m.richness = catalog::richness(records, *taxonomy);
  m.age = catalog::average_age(records, reference);
  return m;
}

inline json distribution_json(const catalog::TopicDistribution& d) {
  return {{"counts", d.counts}, {"total", d.total}};
}

// ---------------------------------------------------------------------------
// Usage

struct UsageStage {
  usage::LogParseResult parsed;
  std::size_t human_entries = 0;
  std::size_t bot_entries = 0;
  std::vector<usage::LogEntry> views;  ///< human 2xx/3xx entries
  std::vector<usage::Session> sessions;
};

inline UsageStage load_usage(const RunConfig& cfg) {
  if (cfg.logs.empty()) throw ConfigError("no log files configured ('logs')");
  UsageStage s;
  usage::VisitorKeyPolicy policy{cfg.use_auth_user};
  for (const auto& path : cfg.logs) {
    usage::LogParseResult one;
    std::istringstream in(io::read_maybe_gzip(path));
    usage::parse_log_into(in, one, policy);
    try {
      usage::check_log_quality(one);
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
    s.parsed.diagnostics.lines_read += one.diagnostics.lines_read;
    s.parsed.diagnostics.errors.insert(s.parsed.diagnostics.errors.end(), one.diagnostics.errors.begin(),
                                       one.diagnostics.errors.end());
    s.parsed.non_view_entries += one.non_view_entries;
    s.parsed.entries.insert(s.parsed.entries.end(), std::make_move_iterator(one.entries.begin()),
                            std::make_move_iterator(one.entries.end()));
  }
  std::vector<std::string> signatures = usage::default_bot_signatures();
  if (cfg.bots) {
    std::istringstream in(io::read_file(*cfg.bots));
    auto extra = usage::parse_signatures(in);
    signatures.insert(signatures.end(), extra.begin(), extra.end());
  }
  auto partition = usage::filter_agents(s.parsed.entries, signatures);
  s.human_entries = partition.human.size();
  s.bot_entries = partition.bots.size();
  s.views = usage::views_only(partition.human);
  s.sessions = usage::sessionize(s.views, cfg.session_timeout());
  return s;
}

/// Configured period, or whole UTC days spanning the human page views.
inline std::optional<usage::AnalysisPeriod> resolve_period(const RunConfig& cfg, const UsageStage* u) {
  std::optional<Instant> start = cfg.period_start;
  std::optional<Instant> end = cfg.period_end;
  if ((!start || !end) && u) {
    auto first = usage::earliest_timestamp(u->views);
    auto last = usage::latest_timestamp(u->views);
    if (first && !start) start = std::chrono::floor<std::chrono::days>(*first);
    if (last && !end) end = std::chrono::floor<std::chrono::days>(*last) + std::chrono::days{1};
  }
  if (!start || !end) return std::nullopt;
  usage::AnalysisPeriod p{*start, *end, cfg.bucket()};
  p.validate();
  return p;
}

/// Configured reference date, else the latest date present in the inputs.
inline std::optional<Date> resolve_reference(const RunConfig& cfg, const CatalogStage* cat, const UsageStage* u) {
  if (cfg.reference_date) return cfg.reference_date;
  std::optional<Date> latest;
  if (cat) latest = catalog::latest_publication(cat->parsed.records);
  if (u) {
    if (auto t = usage::latest_timestamp(u->parsed.entries)) {
      Date d = std::chrono::floor<std::chrono::days>(*t);
      if (!latest || d > *latest) latest = d;
    }
  }
  return latest;
}

// ---------------------------------------------------------------------------
// Structure and position

inline structure::SiteGraphBuild load_site_graph(const RunConfig& cfg) {
  if (!cfg.edges) throw ConfigError("no site graph configured ('edges')");
  std::istringstream in(io::read_file(*cfg.edges));
  return cfg.edges_format == "outlinks" ? structure::build_site_graph_from_outlinks(in, cfg.root)
                                        : structure::build_site_graph(in, cfg.root);
}

inline position::PositionThresholds position_thresholds(const report::Thresholds& t) {
  return {t.authority_percentile, t.hub_percentile, t.bridge_score,
          static_cast<std::size_t>(t.bridge_min_communities), t.bridge_degree_quantile};
}

inline position::CrossSiteBuild load_cross_site(const RunConfig& cfg) {
  if (!cfg.page_links) throw ConfigError("no page link file configured ('page_links')");
  position::SiteMap map;
  ParseDiagnostics map_diag;
  if (cfg.site_map) {
    std::istringstream in(io::read_file(*cfg.site_map));
    map = position::SiteMap::parse(in, &map_diag);
  }
  std::istringstream in(io::read_file(*cfg.page_links));
  auto b = position::build_cross_site_graph(in, map);
  b.diagnostics.errors.insert(b.diagnostics.errors.end(), map_diag.errors.begin(), map_diag.errors.end());
  return b;
}

inline json position_json(const position::PositionProfile& p) {
  return {{"site", p.site},
          {"in_degree", p.in.distinct},
          {"weighted_in_degree", p.in.weighted},
          {"out_degree", p.out.distinct},
          {"weighted_out_degree", p.out.weighted},
          {"degree", p.degree()},
          {"distinct_neighbors", p.bridging.distinct_neighbors},
          {"adjacent_communities", opt(p.bridging.adjacent_communities)},
          {"bridge_score", opt(p.bridging.bridge_score)},
          {"authority", p.authority},
          {"hub", p.hub},
          {"bridge", p.bridging.bridge},
          {"flags", p.flags}};
}

// ---------------------------------------------------------------------------
// Segmentation

struct SegmentationStage {
  usage::DemandCounts demand;
  std::optional<segmentation::Trend> trend;
  segmentation::DynamicsClass dynamics;
  std::map<std::string, double> relative_sizes;
  std::optional<segmentation::SizeClassification> sizes;
  std::optional<segmentation::SegmentLabel> label;
  std::vector<std::string> flags;
};

inline SegmentationStage segmentation_stage(const RunConfig& cfg, const std::string& portal,
                                            const CatalogStage* cat, const UsageStage* u,
                                            const std::optional<usage::AnalysisPeriod>& period) {
  SegmentationStage s;
  if (u && period) {
    s.demand = usage::overall_demand(u->sessions, *period);
    if (s.demand.buckets.size() >= 2) {
      s.trend = segmentation::demand_trend(std::span<const std::uint64_t>(s.demand.buckets));
      s.dynamics = segmentation::dynamics_class(s.trend->relative_slope, cfg.thresholds.growth_threshold);
    } else {
      s.flags.push_back("segmentation:single_bucket_period");
    }
  }
  if (cat && !cat->parsed.records.empty()) {
    auto ids = catalog::identifier_counts(cat->parsed.records);
    s.relative_sizes = segmentation::relative_size(ids.per_portal);
    s.sizes = segmentation::size_class(s.relative_sizes);
    if (s.sizes->single_portal) s.flags.push_back("segmentation:single_portal_network");
  }
  if (s.trend && s.sizes && s.sizes->classes.count(portal))
    s.label = segmentation::segment(s.dynamics, s.sizes->classes.at(portal));
  return s;
}

// ---------------------------------------------------------------------------
// Full run

struct PortalRun {
  report::ModuleOutputs outputs;
  json diagnostics;
};

/// Runs every module whose inputs are configured and collects outputs for
/// assemble_report.
inline PortalRun run_portal(const RunConfig& cfg) {
  PortalRun run;
  auto& out = run.outputs;
  json& diag = run.diagnostics;
  out.thresholds = cfg.thresholds;

  std::optional<CatalogStage> cat;
  if (cfg.catalog) cat = load_catalog(cfg);
  std::optional<UsageStage> use;
  if (!cfg.logs.empty()) use = load_usage(cfg);

  const std::string portal = resolve_portal(cfg, cat ? &*cat : nullptr);
  out.portal_id = portal;
  diag["portal_id"] = portal;
  auto period = resolve_period(cfg, use ? &*use : nullptr);
  out.period = period;
  auto reference = resolve_reference(cfg, cat ? &*cat : nullptr, use ? &*use : nullptr);
  out.reference_date = reference;

  std::vector<catalog::ContentRecord> records;
  std::optional<catalog::TopicDistribution> offer;
  if (cat) {
    records = catalog::records_of_portal(cat->parsed.records, portal);
    diag["catalog"] = {{"rows", row_errors(cat->parsed.diagnostics)},
                       {"duplicates_dropped", cat->parsed.duplicates_dropped},
                       {"portal_records", records.size()}};
    if (records.empty()) {
      out.flags.push_back("provision:portal_absent_from_catalog");
    } else {
      auto m = provision_metrics(records, cat->taxonomy, *reference);
      out.offered = m.offered;
      out.richness = m.richness;
      out.age = m.age;
      offer = m.by_topic;
      if (!cat->taxonomy) out.flags.push_back("provision:no_taxonomy");
      diag["catalog"]["offer_by_topic"] = distribution_json(m.by_topic);
      diag["catalog"]["offer_by_resource_type"] = distribution_json(m.by_type);
    }
  }

  if (use) {
    diag["usage"] = {{"lines", row_errors(use->parsed.diagnostics)},
                     {"entries", use->parsed.entries.size()},
                     {"human_entries", use->human_entries},
                     {"bot_entries", use->bot_entries},
                     {"non_view_entries", use->parsed.non_view_entries},
                     {"page_views", use->views.size()},
                     {"sessions", use->sessions.size()}};
    if (!use->sessions.empty()) out.activity_level = usage::activity_level(use->sessions);
    if (period) {
      out.recency = usage::recency(use->sessions, *period);
      diag["usage"]["recency_eligible_visitors"] = out.recency->eligible_visitors;
      diag["usage"]["recency_single_visit_visitors"] = out.recency->single_visit_visitors;
    }
    auto nav = usage::navigation_summary(use->sessions, cfg.thresholds.linearity_band);
    out.navigation = nav;
    diag["usage"]["navigation_measured_sessions"] = nav.measured_sessions;
    diag["usage"]["navigation_degenerate_sessions"] = nav.degenerate_sessions;

    if (cfg.join_map && period && !records.empty()) {
      std::istringstream jin(io::read_file(*cfg.join_map));
      ParseDiagnostics jd;
      auto join = usage::PathJoin::parse(jin, &jd);
      try {
        auto acc = usage::accessed_distribution(use->sessions, join, records, catalog::Axis::topic, *period);
        std::optional<std::size_t> s;
        if (cat && cat->taxonomy) s = cat->taxonomy->size();
        out.accessed_by_use = catalog::shannon_diversity(acc.total_by_views, s);
        out.accessed_by_audience = catalog::shannon_diversity(acc.total_by_visitors, s);
        if (offer)
          out.gaps = catalog::demand_offer_gap(*offer, acc.total_by_views, cfg.thresholds.gap_threshold,
                                               cat && cat->taxonomy ? &*cat->taxonomy : nullptr);
        diag["usage"]["accessed_by_views"] = distribution_json(acc.total_by_views);
        diag["usage"]["accessed_by_visitors"] = distribution_json(acc.total_by_visitors);
        diag["usage"]["uncatalogued_views"] = acc.uncatalogued_views;
      } catch (const DomainError& e) {
        out.flags.push_back("provision:no_joinable_views");
        diag["usage"]["accessed_error"] = e.what();
      }
      diag["usage"]["join_map_errors"] = jd.error_count();
    }
  }

  if (cfg.edges) {
    auto b = load_site_graph(cfg);
    out.organization = structure::organization_profile(b.site, cfg.thresholds.conversion_constant);
    diag["structure"] = {{"rows", row_errors(b.diagnostics)},
                         {"pages", b.site.graph.size()},
                         {"links", b.site.graph.edge_count()},
                         {"root", b.site.graph.name(b.site.root)},
                         {"self_loops_dropped", b.self_loops_dropped},
                         {"parallel_edges_collapsed", b.parallel_edges_collapsed},
                         {"external_links_dropped", b.external_links_dropped}};
  }

  if (cfg.page_links) {
    auto b = load_cross_site(cfg);
    auto communities = position::detect_communities(b.graph, cfg.thresholds.seed);
    const std::string site = cfg.site_id.value_or(portal);
    out.position = position::position_profile(b.graph, site, communities, position_thresholds(cfg.thresholds));
    out.communities_detected = communities.community_count();
    diag["position"] = {{"rows", row_errors(b.diagnostics)},
                        {"sites", b.graph.graph.size()},
                        {"site_links", b.graph.graph.edge_count()},
                        {"intra_site_links_dropped", b.intra_site_links_dropped},
                        {"unmapped_urls", b.unmapped_urls},
                        {"community_iterations", communities.iterations},
                        {"community_converged", communities.converged}};
  }

  auto seg = segmentation_stage(cfg, portal, cat ? &*cat : nullptr, use ? &*use : nullptr, period);
  if (seg.trend) out.trend = seg.trend;
  if (seg.relative_sizes.count(portal)) out.relative_size = seg.relative_sizes.at(portal);
  out.segment = seg.label;
  out.flags.insert(out.flags.end(), seg.flags.begin(), seg.flags.end());
  if (period) {
    json buckets = json::array();
    for (std::size_t i = 0; i < seg.demand.buckets.size(); ++i)
      buckets.push_back({{"start", format_instant(period->bucket_start(i))}, {"visits", seg.demand.buckets[i]}});
    diag["demand"] = {{"buckets", buckets}, {"total_visits", seg.demand.total}};
    if (seg.trend) diag["demand"]["slope_visits_per_bucket"] = seg.trend->slope;
  }
  if (!seg.relative_sizes.empty()) diag["relative_sizes"] = seg.relative_sizes;
  return run;
}

}  // namespace edumetrics::pipeline
