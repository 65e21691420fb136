// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "edumetrics/catalog.hpp"
#include "edumetrics/error.hpp"
#include "edumetrics/json_schema.hpp"
#include "edumetrics/position.hpp"
#include "edumetrics/segmentation.hpp"
#include "edumetrics/structure.hpp"
#include "edumetrics/time.hpp"
#include "edumetrics/usage.hpp"
#include "edumetrics/version.hpp"

namespace edumetrics::report {

using nlohmann::json;

inline constexpr const char* kSchemaVersion = "1.0";

/// Every tunable that changes a metric. Two reports are comparable only when
/// these are identical.
struct Thresholds {
  std::int64_t session_timeout_seconds = 1800;
  std::int64_t bucket_seconds = 86400;
  double gap_threshold = 0.10;
  double growth_threshold = 0.05;
  double bridge_score = 0.5;
  std::uint64_t bridge_min_communities = 2;
  double bridge_degree_quantile = 0.5;
  double authority_percentile = 0.75;
  double hub_percentile = 0.75;
  std::optional<std::uint64_t> conversion_constant;  ///< absent: K = page count
  double linearity_band = 0.75;
  std::string visitor_key = "auth_user_else_client_agent_hash";
  std::uint64_t seed = 0;

  friend bool operator==(const Thresholds&, const Thresholds&) = default;
};

/// Named method choices, echoed so alternate definitions stay distinguishable.
struct Algorithms {
  std::string diversity = "shannon_natural_log";
  std::string navigability = "botafogo_compactness";
  std::string linearity = "botafogo_stratum";
  std::string navigation = "path_graph_compactness_stratum";
  std::string community = position::kLabelPropagation;
  std::string adjacent_communities = "neighbor_labels_only";
  std::string demand_trend = "ols_relative_slope";
  std::string size_split = "median_ties_large";
  std::string relative_size = "distinct_identifiers_network_dedup";

  friend bool operator==(const Algorithms&, const Algorithms&) = default;
};

struct Metadata {
  std::string schema_version = kSchemaVersion;
  std::string tool_version = kVersion;
  std::optional<std::string> reference_date;
  Thresholds thresholds;
  Algorithms algorithms;
  std::vector<std::string> flags;  ///< sorted, unique

  friend bool operator==(const Metadata&, const Metadata&) = default;
};

struct Period {
  std::string start;  ///< ISO-8601 UTC
  std::string end;
  std::int64_t bucket_seconds = 86400;

  friend bool operator==(const Period&, const Period&) = default;
};

struct GapItem {
  std::string topic;
  double offer_share = 0.0;
  double demand_share = 0.0;
  double gap = 0.0;
  std::string flag;

  friend bool operator==(const GapItem&, const GapItem&) = default;
};

struct Provision {
  std::optional<double> diversity_offered;
  std::optional<double> evenness_offered;
  std::optional<double> diversity_accessed_by_use;       ///< weighted by page views
  std::optional<double> diversity_accessed_by_audience;  ///< weighted by distinct visitors
  std::optional<double> evenness_accessed_by_use;
  std::optional<double> richness;
  std::optional<double> average_age_days;
  std::map<std::string, double> average_age_by_topic;
  std::vector<GapItem> gaps;
  std::vector<std::string> unknown_topics;

  friend bool operator==(const Provision&, const Provision&) = default;
};

struct NavigationProfile {
  std::optional<double> mean_complexity;
  std::optional<double> median_complexity;
  std::optional<double> mean_linearity;
  std::optional<double> median_linearity;
  std::optional<double> share_linearity_above_band;

  friend bool operator==(const NavigationProfile&, const NavigationProfile&) = default;
};

struct Organization {
  std::optional<double> depth;
  std::optional<double> density;
  std::optional<double> navigability;
  std::optional<double> linearity;
  std::uint64_t pages = 0;
  std::uint64_t unreachable_pages = 0;
  std::optional<NavigationProfile> navigation;

  friend bool operator==(const Organization&, const Organization&) = default;
};

struct Position {
  std::string site;
  std::uint64_t in_degree = 0;
  std::uint64_t out_degree = 0;
  std::uint64_t weighted_in_degree = 0;
  std::uint64_t weighted_out_degree = 0;
  std::uint64_t degree = 0;
  std::optional<std::uint64_t> adjacent_communities;
  std::optional<double> bridge_score;
  std::uint64_t communities_detected = 0;
  bool authority = false;
  bool hub = false;
  bool bridge = false;

  friend bool operator==(const Position&, const Position&) = default;
};

/// Dimensionless inputs to segmentation; no raw traffic volumes.
struct SegmentationInputs {
  std::optional<double> relative_slope;
  std::optional<double> relative_size;
  std::optional<double> recency_days;
  std::optional<double> activity_level;

  friend bool operator==(const SegmentationInputs&, const SegmentationInputs&) = default;
};

struct Segment {
  std::string dynamics;  ///< Growing | Stable | Indeterminate
  bool declining = false;
  std::optional<std::string> size;  ///< Large | Small
  std::optional<std::string> code;  ///< a..d, absent when unsegmented
  std::optional<std::string> name;

  friend bool operator==(const Segment&, const Segment&) = default;
};

struct PortalReport {
  std::string portal_id;
  std::optional<Period> period;
  std::optional<Provision> provision;
  std::optional<Organization> organization;
  std::optional<Position> position;
  SegmentationInputs segmentation;
  std::optional<Segment> segment;
  Metadata metadata;

  friend bool operator==(const PortalReport&, const PortalReport&) = default;
};

/// Everything the per-module computations produced for one portal. Absent
/// members mark modules that did not run.
struct ModuleOutputs {
  std::string portal_id;
  std::optional<usage::AnalysisPeriod> period;
  std::optional<Date> reference_date;
  Thresholds thresholds;
  Algorithms algorithms;

  std::optional<catalog::Diversity> offered;
  std::optional<catalog::Richness> richness;
  std::optional<catalog::AgeProfile> age;
  std::optional<catalog::GapReport> gaps;
  std::optional<catalog::Diversity> accessed_by_use;
  std::optional<catalog::Diversity> accessed_by_audience;

  std::optional<structure::OrganizationProfile> organization;
  std::optional<usage::NavigationSummary> navigation;

  std::optional<position::PositionProfile> position;
  std::optional<std::size_t> communities_detected;

  std::optional<segmentation::Trend> trend;
  std::optional<double> relative_size;
  std::optional<usage::RecencyResult> recency;
  std::optional<double> activity_level;
  std::optional<segmentation::SegmentLabel> segment;

  std::vector<std::string> flags;
};

namespace detail {

template <typename T>
void add_flag(std::vector<T>& flags, std::string f) {
  flags.push_back(std::move(f));
}

inline std::vector<std::string> sorted_unique(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace detail

/// Builds the shareable report. Missing modules leave their section null and
/// add a "missing_section:<name>" flag; at least one module must be present.
inline PortalReport assemble_report(const ModuleOutputs& in) {
  const bool has_provision = in.offered || in.richness || in.age || in.accessed_by_use;
  const bool has_organization = in.organization || in.navigation;
  const bool has_position = in.position.has_value();
  const bool has_segmentation = in.trend || in.relative_size || in.recency || in.activity_level ||
                                in.segment;
  if (!has_provision && !has_organization && !has_position && !has_segmentation)
    throw DomainError("no module produced output for portal '" + in.portal_id + "'");

  PortalReport r;
  r.portal_id = in.portal_id;
  r.metadata.thresholds = in.thresholds;
  r.metadata.algorithms = in.algorithms;
  std::vector<std::string> flags = in.flags;
  if (in.reference_date) r.metadata.reference_date = format_date(*in.reference_date);
  if (in.period) r.period = Period{format_instant(in.period->start), format_instant(in.period->end),
                                   in.period->bucket.count()};

  if (has_provision) {
    Provision p;
    if (in.offered) {
      p.diversity_offered = in.offered->shannon;
      p.evenness_offered = in.offered->evenness;
    } else {
      flags.push_back("provision:no_catalog");
    }
    if (in.accessed_by_use) {
      p.diversity_accessed_by_use = in.accessed_by_use->shannon;
      p.evenness_accessed_by_use = in.accessed_by_use->evenness;
    } else {
      flags.push_back("provision:no_accessed_distribution");
    }
    if (in.accessed_by_audience) p.diversity_accessed_by_audience = in.accessed_by_audience->shannon;
    if (in.richness) {
      p.richness = in.richness->value;
      p.unknown_topics = in.richness->unknown_topics;
      if (!p.unknown_topics.empty()) flags.push_back("provision:topics_outside_taxonomy");
    }
    if (in.age) {
      p.average_age_days = in.age->mean_days;
      p.average_age_by_topic = in.age->by_topic;
    }
    if (in.gaps) {
      for (const auto& e : in.gaps->entries)
        p.gaps.push_back({e.label, e.offer_share, e.demand_share, e.gap, catalog::to_string(e.flag)});
    }
    r.provision = std::move(p);
  } else {
    flags.push_back("missing_section:provision");
  }

  if (has_organization) {
    Organization o;
    if (in.organization) {
      const auto& op = *in.organization;
      o.depth = op.depth;
      o.density = op.density;
      o.navigability = op.navigability;
      o.linearity = op.linearity;
      o.pages = op.pages;
      o.unreachable_pages = op.unreachable_pages;
      for (const auto& f : op.flags) flags.push_back("organization:" + f);
    } else {
      flags.push_back("organization:no_site_graph");
    }
    if (in.navigation) {
      const auto& n = *in.navigation;
      o.navigation = NavigationProfile{n.mean_complexity, n.median_complexity, n.mean_linearity,
                                       n.median_linearity, n.share_linearity_above_band};
      if (n.measured_sessions == 0) flags.push_back("organization:no_measurable_navigation");
    }
    r.organization = std::move(o);
  } else {
    flags.push_back("missing_section:organization");
  }

  if (has_position) {
    const auto& pp = *in.position;
    Position p;
    p.site = pp.site;
    p.in_degree = pp.in.distinct;
    p.out_degree = pp.out.distinct;
    p.weighted_in_degree = pp.in.weighted;
    p.weighted_out_degree = pp.out.weighted;
    p.degree = pp.degree();
    if (pp.bridging.adjacent_communities) p.adjacent_communities = *pp.bridging.adjacent_communities;
    p.bridge_score = pp.bridging.bridge_score;
    p.communities_detected = in.communities_detected.value_or(0);
    p.authority = pp.authority;
    p.hub = pp.hub;
    p.bridge = pp.bridging.bridge;
    for (const auto& f : pp.flags) flags.push_back("position:" + f);
    r.position = std::move(p);
  } else {
    flags.push_back("missing_section:position");
  }

  if (in.trend) {
    r.segmentation.relative_slope = in.trend->relative_slope;
    if (in.trend->indeterminate) flags.push_back("segmentation:dynamics_indeterminate");
  }
  r.segmentation.relative_size = in.relative_size;
  if (in.recency) {
    r.segmentation.recency_days = in.recency->days();
    if (!in.recency->seconds) flags.push_back("segmentation:recency_no_returning_visitor");
  }
  r.segmentation.activity_level = in.activity_level;
  if (in.segment) {
    Segment s;
    s.dynamics = segmentation::to_string(in.segment->dynamics);
    s.declining = in.segment->declining;
    s.size = segmentation::to_string(in.segment->size);
    if (in.segment->quadrant) {
      s.code = segmentation::quadrant_code(*in.segment->quadrant);
      s.name = segmentation::quadrant_name(*in.segment->quadrant);
    } else {
      flags.push_back("segment:unsegmented");
    }
    r.segment = std::move(s);
  } else {
    flags.push_back("missing_section:segment");
  }
  r.metadata.flags = detail::sorted_unique(std::move(flags));
  return r;
}

// ---------------------------------------------------------------------------
// Schema

namespace schema {

inline json nullable(json type) { return json::array({std::move(type), "null"}); }

inline json number(double min, double max, bool allow_null = true) {
  json s = {{"type", allow_null ? nullable("number") : json("number")}, {"minimum", min}};
  if (std::isfinite(max)) s["maximum"] = max;
  return s;
}
inline json unbounded(bool allow_null = true) {
  return {{"type", allow_null ? nullable("number") : json("number")}};
}
inline json count(bool allow_null = false) {
  return {{"type", allow_null ? nullable("integer") : json("integer")}, {"minimum", 0}};
}
inline json string(bool allow_null = false) {
  return {{"type", allow_null ? nullable("string") : json("string")}};
}
inline json boolean() { return {{"type", "boolean"}}; }

/// Closed object: every listed member required, nothing else allowed.
inline json object(json properties, bool allow_null = false) {
  json required = json::array();
  for (const auto& [k, v] : properties.items()) required.push_back(k);
  return {{"type", allow_null ? nullable("object") : json("object")},
          {"properties", std::move(properties)},
          {"required", std::move(required)},
          {"additionalProperties", false}};
}

}  // namespace schema

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// JSON Schema of the shareable report.
inline const json& portal_report_schema() {
  using namespace schema;
  static const json s = [] {
    json unit = number(0.0, 1.0);
    json thresholds = object({{"session_timeout_seconds", count()},
                              {"bucket_seconds", count()},
                              {"gap_threshold", number(0.0, 1.0, false)},
                              {"growth_threshold", number(0.0, kInf, false)},
                              {"bridge_score", number(0.0, 1.0, false)},
                              {"bridge_min_communities", count()},
                              {"bridge_degree_quantile", number(0.0, 1.0, false)},
                              {"authority_percentile", number(0.0, 1.0, false)},
                              {"hub_percentile", number(0.0, 1.0, false)},
                              {"conversion_constant", count(true)},
                              {"linearity_band", number(0.0, 1.0, false)},
                              {"visitor_key", string()},
                              {"seed", count()}});
    json algorithms = object({{"diversity", string()},
                              {"navigability", string()},
                              {"linearity", string()},
                              {"navigation", string()},
                              {"community", string()},
                              {"adjacent_communities", string()},
                              {"demand_trend", string()},
                              {"size_split", string()},
                              {"relative_size", string()}});
    json metadata = object({{"schema_version", {{"type", "string"}, {"const", kSchemaVersion}}},
                            {"tool_version", string()},
                            {"reference_date", string(true)},
                            {"thresholds", thresholds},
                            {"algorithms", algorithms},
                            {"flags", {{"type", "array"}, {"items", string()}}}});
    json gap = object({{"topic", string()},
                       {"offer_share", number(0.0, 1.0, false)},
                       {"demand_share", number(0.0, 1.0, false)},
                       {"gap", number(-1.0, 1.0, false)},
                       {"flag", {{"type", "string"},
                                 {"enum", {"none", "high_demand_low_offer", "high_offer_low_demand"}}}}});
    json provision = object({{"diversity_offered", number(0.0, kInf)},
                             {"evenness_offered", unit},
                             {"diversity_accessed_by_use", number(0.0, kInf)},
                             {"diversity_accessed_by_audience", number(0.0, kInf)},
                             {"evenness_accessed_by_use", unit},
                             {"richness", unit},
                             {"average_age_days", number(0.0, kInf)},
                             {"average_age_by_topic",
                              {{"type", "object"}, {"additionalProperties", number(0.0, kInf, false)}}},
                             {"gaps", {{"type", "array"}, {"items", gap}}},
                             {"unknown_topics", {{"type", "array"}, {"items", string()}}}},
                            true);
    json navigation = object({{"mean_complexity", unit},
                              {"median_complexity", unit},
                              {"mean_linearity", unit},
                              {"median_linearity", unit},
                              {"share_linearity_above_band", unit}},
                             true);
    json organization = object({{"depth", number(0.0, kInf)},
                                {"density", unit},
                                {"navigability", unit},
                                {"linearity", unit},
                                {"pages", count()},
                                {"unreachable_pages", count()},
                                {"navigation", navigation}},
                               true);
    json position = object({{"site", string()},
                            {"in_degree", count()},
                            {"out_degree", count()},
                            {"weighted_in_degree", count()},
                            {"weighted_out_degree", count()},
                            {"degree", count()},
                            {"adjacent_communities", count(true)},
                            {"bridge_score", number(0.0, 1.0)},
                            {"communities_detected", count()},
                            {"authority", boolean()},
                            {"hub", boolean()},
                            {"bridge", boolean()}},
                           true);
    json inputs = object({{"relative_slope", unbounded()},
                          {"relative_size", number(0.0, 1.0)},
                          {"recency_days", number(0.0, kInf)},
                          {"activity_level", number(1.0, kInf)}});
    json quadrant_names = json::array();
    for (auto q : {segmentation::Quadrant::growing_large, segmentation::Quadrant::growing_small,
                   segmentation::Quadrant::stable_large, segmentation::Quadrant::stable_small})
      quadrant_names.push_back(segmentation::quadrant_name(q));
    json segment = object({{"dynamics", {{"type", "string"}, {"enum", {"Growing", "Stable", "Indeterminate"}}}},
                           {"declining", boolean()},
                           {"size", {{"type", nullable("string")}, {"enum", {"Large", "Small", nullptr}}}},
                           {"code", {{"type", nullable("string")}, {"enum", {"a", "b", "c", "d", nullptr}}}},
                           {"name", {{"type", nullable("string")}, {"enum", [&] {
                                       auto e = quadrant_names;
                                       e.push_back(nullptr);
                                       return e;
                                     }()}}}},
                          true);
    json period = object({{"start", string()}, {"end", string()}, {"bucket_seconds", count()}}, true);
    json root = object({{"portal_id", {{"type", "string"}, {"minLength", 1}}},
                        {"period", period},
                        {"provision", provision},
                        {"organization", organization},
                        {"position", position},
                        {"segmentation", inputs},
                        {"segment", segment},
                        {"metadata", metadata}});
    root["$schema"] = "https://json-schema.org/draft/2020-12/schema";
    root["title"] = "Portal report";
    return root;
  }();
  return s;
}

/// Schema validation failure carrying every violation found.
class ValidationError : public FormatError {
public:
  explicit ValidationError(std::vector<std::string> violations)
      : FormatError(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "report failed schema validation:";
    for (const auto& x : v) s += "\n  " + x;
    return s;
  }
  std::vector<std::string> violations_;
};

// ---------------------------------------------------------------------------
// JSON mapping

namespace detail {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

}  // namespace detail

inline json to_json(const PortalReport& r) {
  using detail::opt;
  const auto& t = r.metadata.thresholds;
  const auto& a = r.metadata.algorithms;
  json j;
  j["portal_id"] = r.portal_id;
  j["period"] = r.period ? json{{"start", r.period->start},
                               {"end", r.period->end},
                               {"bucket_seconds", r.period->bucket_seconds}}
                         : json(nullptr);
  if (r.provision) {
    const auto& p = *r.provision;
    json gaps = json::array();
    for (const auto& g : p.gaps)
      gaps.push_back({{"topic", g.topic},
                      {"offer_share", g.offer_share},
                      {"demand_share", g.demand_share},
                      {"gap", g.gap},
                      {"flag", g.flag}});
    j["provision"] = {{"diversity_offered", opt(p.diversity_offered)},
                      {"evenness_offered", opt(p.evenness_offered)},
                      {"diversity_accessed_by_use", opt(p.diversity_accessed_by_use)},
                      {"diversity_accessed_by_audience", opt(p.diversity_accessed_by_audience)},
                      {"evenness_accessed_by_use", opt(p.evenness_accessed_by_use)},
                      {"richness", opt(p.richness)},
                      {"average_age_days", opt(p.average_age_days)},
                      {"average_age_by_topic", p.average_age_by_topic},
                      {"gaps", gaps},
                      {"unknown_topics", p.unknown_topics}};
  } else {
    j["provision"] = nullptr;
  }
  if (r.organization) {
    const auto& o = *r.organization;
    json nav = nullptr;
    if (o.navigation) {
      const auto& n = *o.navigation;
      nav = {{"mean_complexity", opt(n.mean_complexity)},
             {"median_complexity", opt(n.median_complexity)},
             {"mean_linearity", opt(n.mean_linearity)},
             {"median_linearity", opt(n.median_linearity)},
             {"share_linearity_above_band", opt(n.share_linearity_above_band)}};
    }
    j["organization"] = {{"depth", opt(o.depth)},
                         {"density", opt(o.density)},
                         {"navigability", opt(o.navigability)},
                         {"linearity", opt(o.linearity)},
                         {"pages", o.pages},
                         {"unreachable_pages", o.unreachable_pages},
                         {"navigation", nav}};
  } else {
    j["organization"] = nullptr;
  }
  if (r.position) {
    const auto& p = *r.position;
    j["position"] = {{"site", p.site},
                     {"in_degree", p.in_degree},
                     {"out_degree", p.out_degree},
                     {"weighted_in_degree", p.weighted_in_degree},
                     {"weighted_out_degree", p.weighted_out_degree},
                     {"degree", p.degree},
                     {"adjacent_communities", opt(p.adjacent_communities)},
                     {"bridge_score", opt(p.bridge_score)},
                     {"communities_detected", p.communities_detected},
                     {"authority", p.authority},
                     {"hub", p.hub},
                     {"bridge", p.bridge}};
  } else {
    j["position"] = nullptr;
  }
  j["segmentation"] = {{"relative_slope", opt(r.segmentation.relative_slope)},
                       {"relative_size", opt(r.segmentation.relative_size)},
                       {"recency_days", opt(r.segmentation.recency_days)},
                       {"activity_level", opt(r.segmentation.activity_level)}};
  if (r.segment) {
    const auto& s = *r.segment;
    j["segment"] = {{"dynamics", s.dynamics},
                    {"declining", s.declining},
                    {"size", opt(s.size)},
                    {"code", opt(s.code)},
                    {"name", opt(s.name)}};
  } else {
    j["segment"] = nullptr;
  }
  j["metadata"] = {
      {"schema_version", r.metadata.schema_version},
      {"tool_version", r.metadata.tool_version},
      {"reference_date", opt(r.metadata.reference_date)},
      {"thresholds",
       {{"session_timeout_seconds", t.session_timeout_seconds},
        {"bucket_seconds", t.bucket_seconds},
        {"gap_threshold", t.gap_threshold},
        {"growth_threshold", t.growth_threshold},
        {"bridge_score", t.bridge_score},
        {"bridge_min_communities", t.bridge_min_communities},
        {"bridge_degree_quantile", t.bridge_degree_quantile},
        {"authority_percentile", t.authority_percentile},
        {"hub_percentile", t.hub_percentile},
        {"conversion_constant", opt(t.conversion_constant)},
        {"linearity_band", t.linearity_band},
        {"visitor_key", t.visitor_key},
        {"seed", t.seed}}},
      {"algorithms",
       {{"diversity", a.diversity},
        {"navigability", a.navigability},
        {"linearity", a.linearity},
        {"navigation", a.navigation},
        {"community", a.community},
        {"adjacent_communities", a.adjacent_communities},
        {"demand_trend", a.demand_trend},
        {"size_split", a.size_split},
        {"relative_size", a.relative_size}}},
      {"flags", r.metadata.flags}};
  return j;
}

inline Thresholds thresholds_from_json(const json& t) {
  Thresholds x;
  x.session_timeout_seconds = t.at("session_timeout_seconds").get<std::int64_t>();
  x.bucket_seconds = t.at("bucket_seconds").get<std::int64_t>();
  x.gap_threshold = t.at("gap_threshold").get<double>();
  x.growth_threshold = t.at("growth_threshold").get<double>();
  x.bridge_score = t.at("bridge_score").get<double>();
  x.bridge_min_communities = t.at("bridge_min_communities").get<std::uint64_t>();
  x.bridge_degree_quantile = t.at("bridge_degree_quantile").get<double>();
  x.authority_percentile = t.at("authority_percentile").get<double>();
  x.hub_percentile = t.at("hub_percentile").get<double>();
  x.conversion_constant = detail::get_opt<std::uint64_t>(t, "conversion_constant");
  x.linearity_band = t.at("linearity_band").get<double>();
  x.visitor_key = t.at("visitor_key").get<std::string>();
  x.seed = t.at("seed").get<std::uint64_t>();
  return x;
}

/// Validates against portal_report_schema() first; throws ValidationError
/// listing every violation.
inline PortalReport from_json(const json& j) {
  auto violations = json_schema::validate(portal_report_schema(), j);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  using detail::get_opt;
  PortalReport r;
  r.portal_id = j.at("portal_id").get<std::string>();
  if (const auto& p = j.at("period"); !p.is_null())
    r.period = Period{p.at("start").get<std::string>(), p.at("end").get<std::string>(),
                      p.at("bucket_seconds").get<std::int64_t>()};
  if (const auto& p = j.at("provision"); !p.is_null()) {
    Provision x;
    x.diversity_offered = get_opt<double>(p, "diversity_offered");
    x.evenness_offered = get_opt<double>(p, "evenness_offered");
    x.diversity_accessed_by_use = get_opt<double>(p, "diversity_accessed_by_use");
    x.diversity_accessed_by_audience = get_opt<double>(p, "diversity_accessed_by_audience");
    x.evenness_accessed_by_use = get_opt<double>(p, "evenness_accessed_by_use");
    x.richness = get_opt<double>(p, "richness");
    x.average_age_days = get_opt<double>(p, "average_age_days");
    x.average_age_by_topic = p.at("average_age_by_topic").get<std::map<std::string, double>>();
    for (const auto& g : p.at("gaps"))
      x.gaps.push_back({g.at("topic").get<std::string>(), g.at("offer_share").get<double>(),
                        g.at("demand_share").get<double>(), g.at("gap").get<double>(),
                        g.at("flag").get<std::string>()});
    x.unknown_topics = p.at("unknown_topics").get<std::vector<std::string>>();
    r.provision = std::move(x);
  }
  if (const auto& o = j.at("organization"); !o.is_null()) {
    Organization x;
    x.depth = get_opt<double>(o, "depth");
    x.density = get_opt<double>(o, "density");
    x.navigability = get_opt<double>(o, "navigability");
    x.linearity = get_opt<double>(o, "linearity");
    x.pages = o.at("pages").get<std::uint64_t>();
    x.unreachable_pages = o.at("unreachable_pages").get<std::uint64_t>();
    if (const auto& n = o.at("navigation"); !n.is_null())
      x.navigation = NavigationProfile{get_opt<double>(n, "mean_complexity"),
                                       get_opt<double>(n, "median_complexity"),
                                       get_opt<double>(n, "mean_linearity"),
                                       get_opt<double>(n, "median_linearity"),
                                       get_opt<double>(n, "share_linearity_above_band")};
    r.organization = std::move(x);
  }
  if (const auto& p = j.at("position"); !p.is_null()) {
    Position x;
    x.site = p.at("site").get<std::string>();
    x.in_degree = p.at("in_degree").get<std::uint64_t>();
    x.out_degree = p.at("out_degree").get<std::uint64_t>();
    x.weighted_in_degree = p.at("weighted_in_degree").get<std::uint64_t>();
    x.weighted_out_degree = p.at("weighted_out_degree").get<std::uint64_t>();
    x.degree = p.at("degree").get<std::uint64_t>();
    x.adjacent_communities = get_opt<std::uint64_t>(p, "adjacent_communities");
    x.bridge_score = get_opt<double>(p, "bridge_score");
    x.communities_detected = p.at("communities_detected").get<std::uint64_t>();
    x.authority = p.at("authority").get<bool>();
    x.hub = p.at("hub").get<bool>();
    x.bridge = p.at("bridge").get<bool>();
    r.position = std::move(x);
  }
  const auto& s = j.at("segmentation");
  r.segmentation = {get_opt<double>(s, "relative_slope"), get_opt<double>(s, "relative_size"),
                    get_opt<double>(s, "recency_days"), get_opt<double>(s, "activity_level")};
  if (const auto& g = j.at("segment"); !g.is_null())
    r.segment = Segment{g.at("dynamics").get<std::string>(), g.at("declining").get<bool>(),
                        get_opt<std::string>(g, "size"), get_opt<std::string>(g, "code"),
                        get_opt<std::string>(g, "name")};
  const auto& m = j.at("metadata");
  r.metadata.schema_version = m.at("schema_version").get<std::string>();
  r.metadata.tool_version = m.at("tool_version").get<std::string>();
  r.metadata.reference_date = get_opt<std::string>(m, "reference_date");
  r.metadata.thresholds = thresholds_from_json(m.at("thresholds"));
  const auto& a = m.at("algorithms");
  r.metadata.algorithms = Algorithms{
      a.at("diversity").get<std::string>(),     a.at("navigability").get<std::string>(),
      a.at("linearity").get<std::string>(),     a.at("navigation").get<std::string>(),
      a.at("community").get<std::string>(),     a.at("adjacent_communities").get<std::string>(),
      a.at("demand_trend").get<std::string>(),  a.at("size_split").get<std::string>(),
      a.at("relative_size").get<std::string>()};
  r.metadata.flags = m.at("flags").get<std::vector<std::string>>();
  return r;
}

/// Canonical bytes: compact UTF-8 JSON, members sorted by key, explicit nulls,
/// shortest round-trip number formatting, trailing newline.
inline std::string serialize(const PortalReport& r) { return to_json(r).dump() + "\n"; }

inline PortalReport deserialize(std::string_view bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("report is not valid JSON: ") + e.what());
  }
  return from_json(j);
}

/// Member names that would carry raw traffic volumes: a volume noun ending
/// the name, possibly followed by a count-like suffix. Settings such as
/// session_timeout_seconds or visitor_key do not match.
inline bool is_traffic_volume_key(const std::string& key) {
  static const std::regex pattern(
      "(^|_)(visits?|sessions?|page_?views?|views|hits|requests|visitors?)(_(total|count|number|sum|per_[a-z]+))?$|"
      "(^|_)(visit|session|view|hit|request|visitor)s?_(count|total|number)(_|$)|"
      "(^|_)(overall_demand|demand_series|demand_buckets|demand_total)(_|$)|"
      "^(total|count|volume)$",
      std::regex::icase);
  return std::regex_search(key, pattern);
}

/// Every member name declared anywhere in a schema, as a JSON pointer path.
inline void collect_schema_keys(const json& schema, const std::string& path,
                                std::vector<std::pair<std::string, std::string>>& out) {
  if (!schema.is_object()) return;
  if (auto p = schema.find("properties"); p != schema.end()) {
    for (const auto& [k, sub] : p->items()) {
      out.emplace_back(path + "/" + k, k);
      collect_schema_keys(sub, path + "/" + k, out);
    }
  }
  for (const char* nested : {"items", "additionalProperties"})
    if (auto it = schema.find(nested); it != schema.end()) collect_schema_keys(*it, path + "/*", out);
}

/// Paths of schema members whose names denote traffic volumes; empty when
/// the sensitivity guard holds.
inline std::vector<std::string> sensitivity_violations(const json& schema = portal_report_schema()) {
  std::vector<std::pair<std::string, std::string>> keys;
  collect_schema_keys(schema, "", keys);
  std::vector<std::string> bad;
  for (const auto& [path, key] : keys)
    if (is_traffic_volume_key(key)) bad.push_back(path);
  return bad;
}

}  // namespace edumetrics::report
