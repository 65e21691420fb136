// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "edumetrics/error.hpp"
#include "edumetrics/text.hpp"
#include "edumetrics/time.hpp"

namespace edumetrics::catalog {

/// One catalogued educational resource. `identifier` carries the Dublin Core
/// identifier and is the deduplication key together with `portal_id`.
struct ContentRecord {
  std::string identifier;
  std::string resource_type;
  std::string topic;
  Date published;
  std::string portal_id;

  friend bool operator==(const ContentRecord&, const ContentRecord&) = default;
};

enum class Axis { topic, resource_type };

inline const std::string& label_of(const ContentRecord& r, Axis axis) {
  return axis == Axis::topic ? r.topic : r.resource_type;
}

/// Network-wide agreed topic labels, in file order.
class TopicTaxonomy {
public:
  TopicTaxonomy() = default;

  static TopicTaxonomy from_labels(std::vector<std::string> labels) {
    TopicTaxonomy t;
    for (auto& l : labels) {
      if (l.empty()) throw DomainError("taxonomy contains an empty topic label");
      if (!t.index_.insert(l).second) throw DomainError("duplicate taxonomy topic: " + l);
      t.topics_.push_back(std::move(l));
    }
    if (t.topics_.empty()) throw DomainError("taxonomy is empty");
    return t;
  }

  /// One label per line; blank lines and lines starting with '#' ignored.
  static TopicTaxonomy parse(std::istream& in) {
    std::vector<std::string> labels;
    std::string line;
    while (std::getline(in, line)) {
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      labels.emplace_back(t);
    }
    return from_labels(std::move(labels));
  }

  const std::vector<std::string>& topics() const { return topics_; }
  std::size_t size() const { return topics_.size(); }
  bool contains(const std::string& label) const { return index_.count(label) != 0; }

private:
  std::vector<std::string> topics_;
  std::set<std::string> index_;
};

/// Label -> count. `total` is maintained by add().
struct TopicDistribution {
  std::map<std::string, std::uint64_t> counts;
  std::uint64_t total = 0;

  void add(const std::string& label, std::uint64_t n = 1) {
    counts[label] += n;
    total += n;
  }
  std::uint64_t count(const std::string& label) const {
    auto it = counts.find(label);
    return it == counts.end() ? 0 : it->second;
  }
  std::size_t positive_labels() const {
    return static_cast<std::size_t>(
        std::count_if(counts.begin(), counts.end(), [](const auto& kv) { return kv.second > 0; }));
  }

  friend bool operator==(const TopicDistribution&, const TopicDistribution&) = default;
};

struct CatalogParseResult {
  std::vector<ContentRecord> records;
  std::size_t duplicates_dropped = 0;
  ParseDiagnostics diagnostics;
};

namespace detail {

inline std::optional<std::string> canonical_column(const std::string& raw) {
  static const std::unordered_map<std::string, std::string> aliases{
      {"identifier", "identifier"},       {"dc:identifier", "identifier"},
      {"dc.identifier", "identifier"},    {"resource_type", "resource_type"},
      {"dc:type", "resource_type"},       {"dc.type", "resource_type"},
      {"type", "resource_type"},          {"topic", "topic"},
      {"dc:subject", "topic"},            {"dc.subject", "topic"},
      {"subject", "topic"},               {"published", "published"},
      {"dc:date", "published"},           {"dc.date", "published"},
      {"date", "published"},              {"portal_id", "portal_id"},
      {"portal", "portal_id"}};
  auto it = aliases.find(text::lower(text::trim(raw)));
  if (it == aliases.end()) return std::nullopt;
  return it->second;
}

/// Accepts a bare date or the date prefix of an ISO date-time.
inline std::optional<Date> parse_published(std::string_view s) {
  s = text::trim(s);
  if (s.size() > 10 && s[10] == 'T') s = s.substr(0, 10);
  return parse_iso_date(s);
}

}  // namespace detail

/// Reads a delimited catalog (comma or tab, detected from the header row).
/// First occurrence of each (portal_id, identifier) wins.
inline CatalogParseResult parse_catalog(std::istream& in) {
  CatalogParseResult result;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::vector<std::string>> header;
  char delim = ',';
  while (!header && std::getline(in, line)) {
    ++line_no;
    line.resize(text::strip_cr(line).size());
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (text::trim(line).empty() || text::trim(line).front() == '#') continue;
    delim = text::detect_delimiter(line);
    header = text::split_record(line, delim);
    if (!header) throw FormatError("catalog header has an unterminated quote");
  }
  if (!header) throw FormatError("catalog is empty: no header row");

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if (auto name = detail::canonical_column((*header)[i]); name && !column.count(*name))
      column[*name] = i;
  }
  for (const char* required : {"identifier", "resource_type", "topic", "published", "portal_id"}) {
    if (!column.count(required))
      throw FormatError(std::string("catalog header is missing mandatory column '") + required + "'");
  }
  const std::size_t width = header->size();

  std::set<std::pair<std::string, std::string>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    line.resize(text::strip_cr(line).size());
    auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    ++result.diagnostics.lines_read;
    auto fields = text::split_record(line, delim);
    if (!fields) {
      result.diagnostics.add(line_no, "unterminated quote");
      continue;
    }
    if (fields->size() != width) {
      result.diagnostics.add(line_no, "expected " + std::to_string(width) + " fields, found " +
                                          std::to_string(fields->size()));
      continue;
    }
    ContentRecord r;
    r.identifier = (*fields)[column["identifier"]];
    r.resource_type = (*fields)[column["resource_type"]];
    r.topic = (*fields)[column["topic"]];
    r.portal_id = (*fields)[column["portal_id"]];
    if (r.identifier.empty() || r.topic.empty() || r.portal_id.empty()) {
      result.diagnostics.add(line_no, "empty identifier, topic or portal_id");
      continue;
    }
    auto date = detail::parse_published((*fields)[column["published"]]);
    if (!date) {
      result.diagnostics.add(line_no, "unparseable date '" + (*fields)[column["published"]] + "'");
      continue;
    }
    r.published = *date;
    if (!seen.emplace(r.portal_id, r.identifier).second) {
      ++result.duplicates_dropped;
      continue;
    }
    result.records.push_back(std::move(r));
  }
  return result;
}

inline std::vector<ContentRecord> records_of_portal(std::span<const ContentRecord> records,
                                                    const std::string& portal_id) {
  std::vector<ContentRecord> out;
  for (const auto& r : records)
    if (r.portal_id == portal_id) out.push_back(r);
  return out;
}

inline std::vector<std::string> portals_of(std::span<const ContentRecord> records) {
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.portal_id);
  return {ids.begin(), ids.end()};
}

struct Diversity {
  double shannon = 0.0;   ///< nats
  double evenness = 0.0;  ///< shannon / ln(S), 0 when S <= 1
};

/// Shannon entropy of the distribution in nats plus evenness. `taxonomy_size`
/// is S for the evenness denominator; when omitted, the number of labels in
/// `dist` is used. S never drops below the number of positive labels.
inline Diversity shannon_diversity(const TopicDistribution& dist,
                                   std::optional<std::size_t> taxonomy_size = std::nullopt) {
  if (dist.total == 0) throw DomainError("no content");
  const double total = static_cast<double>(dist.total);
  double h = 0.0;
  for (const auto& [label, c] : dist.counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  h = std::max(h, 0.0);
  std::size_t s = std::max(taxonomy_size.value_or(dist.counts.size()), dist.positive_labels());
  double evenness = s <= 1 ? 0.0 : std::clamp(h / std::log(static_cast<double>(s)), 0.0, 1.0);
  return {h, evenness};
}

struct Richness {
  double value = 0.0;
  std::size_t covered = 0;
  std::vector<std::string> unknown_topics;  ///< present in records, absent from taxonomy
};

inline Richness richness(std::span<const ContentRecord> records, const TopicTaxonomy& taxonomy) {
  if (taxonomy.size() == 0) throw DomainError("taxonomy is empty");
  std::set<std::string> present;
  std::set<std::string> unknown;
  for (const auto& r : records) {
    if (taxonomy.contains(r.topic))
      present.insert(r.topic);
    else
      unknown.insert(r.topic);
  }
  Richness out;
  out.covered = present.size();
  out.value = static_cast<double>(present.size()) / static_cast<double>(taxonomy.size());
  out.unknown_topics.assign(unknown.begin(), unknown.end());
  return out;
}

struct AgeProfile {
  double mean_days = 0.0;
  std::map<std::string, double> by_topic;  ///< mean age per topic, days
};

inline AgeProfile average_age(std::span<const ContentRecord> records, Date reference) {
  if (records.empty()) throw DomainError("average age of an empty catalog");
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> per_topic;  // sum, n
  std::int64_t sum = 0;
  for (const auto& r : records) {
    if (r.published > reference)
      throw DomainError("record '" + r.identifier + "' is published after the reference date " +
                        format_date(reference));
    const std::int64_t age = (reference - r.published).count();
    sum += age;
    auto& acc = per_topic[r.topic];
    acc.first += age;
    acc.second += 1;
  }
  AgeProfile out;
  out.mean_days = static_cast<double>(sum) / static_cast<double>(records.size());
  for (const auto& [topic, acc] : per_topic)
    out.by_topic[topic] = static_cast<double>(acc.first) / static_cast<double>(acc.second);
  return out;
}

inline TopicDistribution offer_distribution(std::span<const ContentRecord> records, Axis axis) {
  TopicDistribution d;
  for (const auto& r : records) d.add(label_of(r, axis));
  return d;
}

enum class GapFlag { none, high_demand_low_offer, high_offer_low_demand };

inline const char* to_string(GapFlag f) {
  switch (f) {
    case GapFlag::high_demand_low_offer: return "high_demand_low_offer";
    case GapFlag::high_offer_low_demand: return "high_offer_low_demand";
    default: return "none";
  }
}

struct GapEntry {
  std::string label;
  double offer_share = 0.0;
  double demand_share = 0.0;
  double gap = 0.0;  ///< demand_share - offer_share
  GapFlag flag = GapFlag::none;
};

struct GapReport {
  double threshold = 0.10;
  std::vector<GapEntry> entries;  ///< sorted by label
};

/// Per-label share comparison. Labels missing from one side count as 0; the
/// taxonomy, when given, adds its labels to the label space.
inline GapReport demand_offer_gap(const TopicDistribution& offer, const TopicDistribution& demand,
                                  double threshold = 0.10,
                                  const TopicTaxonomy* taxonomy = nullptr) {
  if (offer.total == 0) throw DomainError("demand/offer gap: offer distribution is empty");
  if (demand.total == 0) throw DomainError("demand/offer gap: demand distribution is empty");
  if (!(threshold >= 0.0)) throw DomainError("gap threshold must be non-negative");
  std::set<std::string> labels;
  for (const auto& [l, c] : offer.counts) labels.insert(l);
  for (const auto& [l, c] : demand.counts) labels.insert(l);
  if (taxonomy)
    for (const auto& l : taxonomy->topics()) labels.insert(l);

  GapReport out;
  out.threshold = threshold;
  for (const auto& l : labels) {
    GapEntry e;
    e.label = l;
    e.offer_share = static_cast<double>(offer.count(l)) / static_cast<double>(offer.total);
    e.demand_share = static_cast<double>(demand.count(l)) / static_cast<double>(demand.total);
    e.gap = e.demand_share - e.offer_share;
    if (e.gap > threshold)
      e.flag = GapFlag::high_demand_low_offer;
    else if (e.gap < -threshold)
      e.flag = GapFlag::high_offer_low_demand;
    out.entries.push_back(std::move(e));
  }
  return out;
}

/// Distinct identifiers per portal and across the whole network.
struct IdentifierCounts {
  std::map<std::string, std::set<std::string>> per_portal;
  std::size_t network_distinct = 0;
};

inline IdentifierCounts identifier_counts(std::span<const ContentRecord> records) {
  IdentifierCounts out;
  std::unordered_set<std::string> all;
  for (const auto& r : records) {
    out.per_portal[r.portal_id].insert(r.identifier);
    all.insert(r.identifier);
  }
  out.network_distinct = all.size();
  return out;
}

inline std::optional<Date> latest_publication(std::span<const ContentRecord> records) {
  std::optional<Date> latest;
  for (const auto& r : records)
    if (!latest || r.published > *latest) latest = r.published;
  return latest;
}

}  // namespace edumetrics::catalog
