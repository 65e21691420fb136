// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edumetrics/error.hpp"
#include "edumetrics/report.hpp"
#include "edumetrics/time.hpp"

namespace edumetrics::report {

/// Raised when reports do not share methodology or analysis periods.
class ComparabilityError : public DomainError {
public:
  using DomainError::DomainError;
};

enum class Better { higher, lower, middle };
enum class Scale { unit, relative };

struct ComparedMetric {
  const char* name;
  const char* aspect;
  Better better;
  Scale scale;
  std::function<std::optional<double>(const PortalReport&)> get;
};

/// Management metrics ranked within a segment. Linearity is best near 0.5;
/// unit-range metrics use an absolute margin, unbounded ones a relative one.
inline const std::vector<ComparedMetric>& compared_metrics() {
  auto prov = [](auto field) {
    return [field](const PortalReport& r) -> std::optional<double> {
      return r.provision ? (*r.provision).*field : std::nullopt;
    };
  };
  auto org = [](auto field) {
    return [field](const PortalReport& r) -> std::optional<double> {
      return r.organization ? (*r.organization).*field : std::nullopt;
    };
  };
  static const std::vector<ComparedMetric> metrics{
      {"diversity_offered", "provision", Better::higher, Scale::relative, prov(&Provision::diversity_offered)},
      {"evenness_offered", "provision", Better::higher, Scale::unit, prov(&Provision::evenness_offered)},
      {"richness", "provision", Better::higher, Scale::unit, prov(&Provision::richness)},
      {"average_age_days", "provision", Better::lower, Scale::relative, prov(&Provision::average_age_days)},
      {"depth", "organization", Better::lower, Scale::relative, org(&Organization::depth)},
      {"density", "organization", Better::higher, Scale::unit, org(&Organization::density)},
      {"navigability", "organization", Better::higher, Scale::unit, org(&Organization::navigability)},
      {"linearity", "organization", Better::middle, Scale::unit, org(&Organization::linearity)},
      {"in_degree", "position", Better::higher, Scale::relative,
       [](const PortalReport& r) -> std::optional<double> {
         if (!r.position) return std::nullopt;
         return static_cast<double>(r.position->in_degree);
       }},
      {"out_degree", "position", Better::higher, Scale::relative,
       [](const PortalReport& r) -> std::optional<double> {
         if (!r.position) return std::nullopt;
         return static_cast<double>(r.position->out_degree);
       }},
      {"bridge_score", "position", Better::higher, Scale::unit,
       [](const PortalReport& r) -> std::optional<double> {
         return r.position ? r.position->bridge_score : std::nullopt;
       }},
  };
  return metrics;
}

struct RankEntry {
  std::string portal;
  std::optional<double> value;
  std::optional<std::size_t> rank;  ///< 1 = best; ties share a rank
};

struct PairDelta {
  std::string first;
  std::string second;
  std::map<std::string, std::optional<double>> delta;  ///< second - first
};

/// Names the segment leader on a metric where `portal` trails by more than
/// the margin.
struct LearningPointer {
  std::string portal;
  std::string metric;
  std::string aspect;
  std::string leader;
  double value = 0.0;
  double leader_value = 0.0;
  double shortfall = 0.0;
};

struct SegmentComparison {
  std::string code;
  std::string name;
  std::vector<std::string> portals;
  std::map<std::string, std::vector<RankEntry>> rankings;
  std::vector<PairDelta> deltas;
  std::vector<LearningPointer> pointers;
};

struct NetworkComparison {
  double margin = 0.10;
  std::vector<SegmentComparison> segments;
  std::vector<std::string> unsegmented;
  Thresholds thresholds;
  Algorithms algorithms;
};

namespace detail {

inline double goodness(Better b, double v) {
  switch (b) {
    case Better::higher: return v;
    case Better::lower: return -v;
    default: return -std::abs(v - 0.5);
  }
}

inline double shortfall(const ComparedMetric& m, double leader, double value) {
  const double diff = goodness(m.better, leader) - goodness(m.better, value);
  if (m.scale == Scale::unit) return diff;
  if (leader == 0.0) return diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return diff / std::abs(leader);
}

inline Instant period_bound(const std::string& s, const std::string& portal) {
  auto t = parse_iso_instant(s);
  if (!t) throw FormatError("report '" + portal + "' has an unparseable period bound '" + s + "'");
  return *t;
}

}  // namespace detail

/// Ranks portals on each management metric inside every segment, with
/// pairwise deltas and learning pointers. Refuses (ComparabilityError) when
/// thresholds or algorithm choices differ between any two reports, or when
/// two reports in one segment have non-overlapping periods.
inline NetworkComparison compare_within_segment(std::span<const PortalReport> reports, double margin = 0.10) {
  if (reports.empty()) throw DomainError("no reports to compare");
  if (!(margin >= 0.0)) throw ConfigError("comparison margin must be non-negative");
  NetworkComparison out;
  out.margin = margin;
  out.thresholds = reports.front().metadata.thresholds;
  out.algorithms = reports.front().metadata.algorithms;
  std::set<std::string> ids;
  for (const auto& r : reports) {
    if (!ids.insert(r.portal_id).second)
      throw DomainError("duplicate report for portal '" + r.portal_id + "'");
    if (r.metadata.thresholds != out.thresholds)
      throw ComparabilityError("reports '" + reports.front().portal_id + "' and '" + r.portal_id +
                               "' were computed with different thresholds; comparison refused");
    if (r.metadata.algorithms != out.algorithms)
      throw ComparabilityError("reports '" + reports.front().portal_id + "' and '" + r.portal_id +
                               "' were computed with different algorithms; comparison refused");
  }

  std::map<std::string, std::vector<const PortalReport*>> by_segment;
  for (const auto& r : reports) {
    if (r.segment && r.segment->code)
      by_segment[*r.segment->code].push_back(&r);
    else
      out.unsegmented.push_back(r.portal_id);
  }

  for (auto& [code, members] : by_segment) {
    std::sort(members.begin(), members.end(),
              [](auto* a, auto* b) { return a->portal_id < b->portal_id; });
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        const auto* a = members[i];
        const auto* b = members[j];
        if (!a->period || !b->period)
          throw ComparabilityError("report without an analysis period in segment " + code);
        auto as = detail::period_bound(a->period->start, a->portal_id);
        auto ae = detail::period_bound(a->period->end, a->portal_id);
        auto bs = detail::period_bound(b->period->start, b->portal_id);
        auto be = detail::period_bound(b->period->end, b->portal_id);
        if (!(as < be && bs < ae))
          throw ComparabilityError("reports '" + a->portal_id + "' and '" + b->portal_id +
                                   "' cover non-overlapping periods; comparison refused");
      }
    }

    SegmentComparison seg;
    seg.code = code;
    seg.name = *members.front()->segment->name;
    for (const auto* r : members) seg.portals.push_back(r->portal_id);

    for (const auto& m : compared_metrics()) {
      std::vector<RankEntry> ranking;
      for (const auto* r : members) ranking.push_back({r->portal_id, m.get(*r), std::nullopt});
      std::stable_sort(ranking.begin(), ranking.end(), [&](const RankEntry& a, const RankEntry& b) {
        if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
        if (!a.value) return false;
        return detail::goodness(m.better, *a.value) > detail::goodness(m.better, *b.value);
      });
      for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (!ranking[i].value) break;
        if (i > 0 && ranking[i - 1].value &&
            detail::goodness(m.better, *ranking[i - 1].value) == detail::goodness(m.better, *ranking[i].value))
          ranking[i].rank = ranking[i - 1].rank;
        else
          ranking[i].rank = i + 1;
      }
      if (!ranking.empty() && ranking.front().value) {
        const auto& leader = ranking.front();
        for (std::size_t i = 1; i < ranking.size(); ++i) {
          if (!ranking[i].value) continue;
          double sf = detail::shortfall(m, *leader.value, *ranking[i].value);
          if (sf > margin)
            seg.pointers.push_back({ranking[i].portal, m.name, m.aspect, leader.portal,
                                    *ranking[i].value, *leader.value, sf});
        }
      }
      seg.rankings[m.name] = std::move(ranking);
    }

    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        PairDelta d;
        d.first = members[i]->portal_id;
        d.second = members[j]->portal_id;
        for (const auto& m : compared_metrics()) {
          auto a = m.get(*members[i]);
          auto b = m.get(*members[j]);
          d.delta[m.name] = a && b ? std::optional<double>(*b - *a) : std::nullopt;
        }
        seg.deltas.push_back(std::move(d));
      }
    }
    out.segments.push_back(std::move(seg));
  }
  std::sort(out.unsegmented.begin(), out.unsegmented.end());
  return out;
}

inline json to_json(const NetworkComparison& c) {
  json segs = json::array();
  for (const auto& s : c.segments) {
    json rankings = json::object();
    for (const auto& [metric, entries] : s.rankings) {
      json list = json::array();
      for (const auto& e : entries)
        list.push_back({{"portal", e.portal}, {"value", detail::opt(e.value)}, {"rank", detail::opt(e.rank)}});
      rankings[metric] = list;
    }
    json deltas = json::array();
    for (const auto& d : s.deltas) {
      json per = json::object();
      for (const auto& [m, v] : d.delta) per[m] = detail::opt(v);
      deltas.push_back({{"first", d.first}, {"second", d.second}, {"delta", per}});
    }
    json pointers = json::array();
    for (const auto& p : s.pointers)
      pointers.push_back({{"portal", p.portal},
                          {"metric", p.metric},
                          {"aspect", p.aspect},
                          {"leader", p.leader},
                          {"value", p.value},
                          {"leader_value", p.leader_value},
                          {"shortfall", std::isfinite(p.shortfall) ? json(p.shortfall) : json(nullptr)}});
    segs.push_back({{"code", s.code},
                    {"name", s.name},
                    {"portals", s.portals},
                    {"rankings", rankings},
                    {"deltas", deltas},
                    {"learning_pointers", pointers}});
  }
  PortalReport carrier;
  carrier.metadata.thresholds = c.thresholds;
  carrier.metadata.algorithms = c.algorithms;
  auto meta = to_json(carrier).at("metadata");
  return {{"margin", c.margin},
          {"segments", segs},
          {"unsegmented", c.unsegmented},
          {"thresholds", meta.at("thresholds")},
          {"algorithms", meta.at("algorithms")}};
}

namespace detail {

inline std::string fmt_value(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *v);
  return buf;
}

inline std::string pad(std::string s, std::size_t w) {
  if (s.size() < w) s.append(w - s.size(), ' ');
  return s;
}

}  // namespace detail

/// Plain-text table: one block per segment, one row per metric, one column
/// per portal, followed by the learning pointers.
inline std::string summary_table(const NetworkComparison& c) {
  std::string out;
  for (const auto& s : c.segments) {
    out += "Segment (" + s.code + ") " + s.name + "\n";
    std::vector<std::vector<std::string>> cells;
    std::size_t w = 12;
    for (const auto& p : s.portals) w = std::max(w, p.size() + 2);
    for (const auto& m : compared_metrics()) {
      const auto& ranking = s.rankings.at(m.name);
      auto& row = cells.emplace_back();
      for (const auto& p : s.portals) {
        auto it = std::find_if(ranking.begin(), ranking.end(), [&](const auto& e) { return e.portal == p; });
        std::string cell = detail::fmt_value(it->value);
        if (it->rank) cell += " (#" + std::to_string(*it->rank) + ")";
        w = std::max(w, cell.size() + 2);
        row.push_back(std::move(cell));
      }
    }
    out += detail::pad("metric", 26);
    for (const auto& p : s.portals) out += detail::pad(p, w);
    out += "\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      out += detail::pad(compared_metrics()[i].name, 26);
      for (const auto& cell : cells[i]) out += detail::pad(cell, w);
      out += "\n";
    }
    if (s.pointers.empty()) {
      out += "  no learning pointers\n";
    } else {
      for (const auto& p : s.pointers)
        out += "  " + p.portal + " -> " + p.leader + " on " + p.aspect + "/" + p.metric + " (" +
               detail::fmt_value(p.value) + " vs " + detail::fmt_value(p.leader_value) + ")\n";
    }
    out += "\n";
  }
  if (c.segments.empty()) out += "No segment holds comparable reports.\n";
  if (!c.unsegmented.empty()) {
    out += "Unsegmented (not compared):";
    for (const auto& p : c.unsegmented) out += " " + p;
    out += "\n";
  }
  return out;
}

/// segment,metric,portal,value,rank rows for external plotting.
inline std::string to_csv(const NetworkComparison& c) {
  std::string out = "segment,metric,portal,value,rank\n";
  for (const auto& s : c.segments)
    for (const auto& [metric, entries] : s.rankings)
      for (const auto& e : entries) {
        out += s.code + "," + metric + "," + e.portal + ",";
        if (e.value) out += json(*e.value).dump();
        out += ",";
        if (e.rank) out += std::to_string(*e.rank);
        out += "\n";
      }
  return out;
}

}  // namespace edumetrics::report
