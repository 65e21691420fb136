// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "edumetrics/error.hpp"
#include "edumetrics/graph.hpp"
#include "edumetrics/text.hpp"
#include "edumetrics/url.hpp"

namespace edumetrics::position {

/// Site-level link graph. The Digraph holds one edge per linked site pair;
/// `multiplicity` keeps the number of page-level links behind each edge.
struct CrossSiteGraph {
  Digraph graph;
  std::map<std::pair<Digraph::Index, Digraph::Index>, std::uint64_t> multiplicity;

  std::optional<Digraph::Index> find(const std::string& site) const { return graph.find(site); }

  /// Adds `count` page-level links from one site to another. Self links are
  /// ignored and reported as false.
  bool add_link(const std::string& from, const std::string& to, std::uint64_t count = 1) {
    auto f = graph.add_node(from);
    auto t = graph.add_node(to);
    if (f == t || count == 0) return false;
    graph.add_edge(f, t);
    multiplicity[{f, t}] += count;
    return true;
  }
};

/// URL prefix -> site id, longest prefix wins. Prefixes and URLs are compared
/// scheme-less after normalization.
class SiteMap {
public:
  void add(const std::string& prefix, std::string site_id) {
    entries_.emplace_back(key(prefix), std::move(site_id));
    std::sort(entries_.begin(), entries_.end(),
              [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
  }

  static SiteMap parse(std::istream& in, ParseDiagnostics* diag = nullptr) {
    SiteMap m;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = text::trim(text::strip_cr(line));
      if (t.empty() || t.front() == '#') continue;
      auto f = text::split_record(t, text::detect_delimiter(t));
      if (!f || f->size() != 2 || (*f)[0].empty() || (*f)[1].empty()) {
        if (diag) diag->add(line_no, "expected (url_prefix, site_id)");
        continue;
      }
      m.add((*f)[0], (*f)[1]);
    }
    return m;
  }

  std::optional<std::string> lookup(const std::string& u) const {
    auto k = key(u);
    for (const auto& [prefix, site] : entries_)
      if (k.rfind(prefix, 0) == 0) return site;
    return std::nullopt;
  }

  std::vector<std::string> sites() const {
    std::set<std::string> s;
    for (const auto& e : entries_) s.insert(e.second);
    return {s.begin(), s.end()};
  }

  bool empty() const { return entries_.empty(); }

private:
  static std::string key(const std::string& u) {
    auto p = url::split(u.find("://") == std::string::npos && !u.empty() && u.front() != '/'
                            ? "//" + u
                            : u);
    std::string k = p.host;
    if (!p.port.empty()) k += ":" + p.port;
    return k + p.path;
  }

  std::vector<std::pair<std::string, std::string>> entries_;
};

struct CrossSiteBuild {
  CrossSiteGraph graph;
  std::size_t intra_site_links_dropped = 0;
  std::size_t unmapped_urls = 0;  ///< distinct URLs grouped by registrable domain
  ParseDiagnostics diagnostics;
};

/// Aggregates (from_url, to_url) page links to site level. URLs the site map
/// does not cover fall back to their registrable domain.
inline CrossSiteBuild build_cross_site_graph(std::istream& page_links, const SiteMap& site_map) {
  CrossSiteBuild b;
  for (const auto& s : site_map.sites()) b.graph.graph.add_node(s);
  std::set<std::string> unmapped;
  auto site_of = [&](const std::string& u) -> std::optional<std::string> {
    if (auto s = site_map.lookup(u)) return s;
    auto h = url::host(u.find("://") == std::string::npos ? "//" + u : u);
    if (h.empty()) return std::nullopt;
    unmapped.insert(url::normalize(u));
    return url::registrable_domain(h);
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(page_links, line)) {
    ++line_no;
    auto t = text::trim(text::strip_cr(line));
    if (t.empty() || t.front() == '#') continue;
    ++b.diagnostics.lines_read;
    auto f = text::split_record(t, text::detect_delimiter(t));
    if (!f || f->size() != 2 || (*f)[0].empty() || (*f)[1].empty()) {
      b.diagnostics.add(line_no, "expected (from_url, to_url)");
      continue;
    }
    auto from = site_of((*f)[0]);
    auto to = site_of((*f)[1]);
    if (!from || !to) {
      b.diagnostics.add(line_no, "URL without a host and not covered by the site map");
      continue;
    }
    if (*from == *to) {
      b.graph.graph.add_node(*from);
      ++b.intra_site_links_dropped;
      continue;
    }
    b.graph.add_link(*from, *to);
  }
  b.unmapped_urls = unmapped.size();
  if (b.graph.graph.edge_count() == 0 && b.graph.graph.size() == 0)
    throw DomainError("cross-site graph is empty");
  if (b.graph.graph.edge_count() == 0) throw DomainError("cross-site graph has no inter-site links");
  return b;
}

struct Degree {
  std::uint64_t distinct = 0;  ///< distinct neighbor sites
  std::uint64_t weighted = 0;  ///< page-level links
};

namespace detail {

inline Digraph::Index require_site(const CrossSiteGraph& g, const std::string& site) {
  auto i = g.find(site);
  if (!i) throw DomainError("unknown site '" + site + "'");
  return *i;
}

/// Distinct undirected neighbors of every node, sorted.
inline std::vector<std::vector<Digraph::Index>> undirected_neighbors(const Digraph& g) {
  std::vector<std::vector<Digraph::Index>> nb(g.size());
  for (Digraph::Index v = 0; v < g.size(); ++v) {
    auto& list = nb[v];
    list.insert(list.end(), g.out(v).begin(), g.out(v).end());
    list.insert(list.end(), g.in(v).begin(), g.in(v).end());
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  return nb;
}

/// Linear-interpolation quantile (the "type 7" definition) of unsorted values.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

}  // namespace detail

/// In-degree over distinct linking sites, with the page-level weight.
inline Degree authoritativeness(const CrossSiteGraph& g, const std::string& site) {
  auto v = detail::require_site(g, site);
  Degree d;
  d.distinct = g.graph.in(v).size();
  for (auto u : g.graph.in(v)) d.weighted += g.multiplicity.at({u, v});
  return d;
}

/// Out-degree over distinct linked sites, with the page-level weight.
inline Degree hubness(const CrossSiteGraph& g, const std::string& site) {
  auto v = detail::require_site(g, site);
  Degree d;
  d.distinct = g.graph.out(v).size();
  for (auto w : g.graph.out(v)) d.weighted += g.multiplicity.at({v, w});
  return d;
}

struct CommunityAssignment {
  std::vector<std::uint32_t> label;  ///< per node index, renumbered 0..k-1
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  bool converged = false;
  std::string algorithm;

  std::size_t community_count() const {
    return std::set<std::uint32_t>(label.begin(), label.end()).size();
  }
};

inline constexpr const char* kLabelPropagation = "label_propagation_synchronous_min_label";

/// Synchronous label propagation on the undirected projection. Initial labels
/// come from a seeded permutation of the nodes in name order; each round every
/// node adopts the label with the most votes among itself and its neighbors,
/// ties going to the smallest label. A neighbor votes once per arc joining it
/// to the node. Stops at a fixed point or after
/// `max_iterations` rounds.
inline CommunityAssignment detect_communities(const CrossSiteGraph& g, std::uint64_t seed,
                                              std::size_t max_iterations = 100) {
  const auto n = g.graph.size();
  if (n == 0) throw DomainError("community detection on an empty graph");
  std::vector<Digraph::Index> by_name(n);
  for (Digraph::Index i = 0; i < n; ++i) by_name[i] = i;
  std::sort(by_name.begin(), by_name.end(),
            [&](auto a, auto b) { return g.graph.name(a) < g.graph.name(b); });
  // Fisher-Yates with a raw mt19937_64 stream: the engine is bit-specified by
  // the standard, the library distributions are not.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(by_name[i], by_name[rng() % (i + 1)]);

  std::vector<std::uint32_t> label(n);
  for (std::uint32_t pos = 0; pos < n; ++pos) label[by_name[pos]] = pos;

  const auto nb = detail::undirected_neighbors(g.graph);
  CommunityAssignment out;
  out.seed = seed;
  out.algorithm = kLabelPropagation;
  // a reciprocated pair is two arcs of the projection and votes twice
  auto weight = [&](Digraph::Index u, Digraph::Index v) -> std::size_t {
    return (g.graph.has_edge(u, v) ? 1u : 0u) + (g.graph.has_edge(v, u) ? 1u : 0u);
  };
  std::vector<std::uint32_t> next(n);
  std::map<std::uint32_t, std::size_t> votes;
  while (out.iterations < max_iterations) {
    ++out.iterations;
    for (Digraph::Index v = 0; v < n; ++v) {
      votes.clear();
      ++votes[label[v]];
      for (auto u : nb[v]) votes[label[u]] += weight(u, v);
      std::uint32_t best = label[v];
      std::size_t best_count = 0;
      for (const auto& [l, c] : votes) {  // ascending label order
        if (c > best_count) {
          best = l;
          best_count = c;
        }
      }
      next[v] = best;
    }
    if (next == label) {
      out.converged = true;
      break;
    }
    label.swap(next);
  }
  std::map<std::uint32_t, std::uint32_t> renumber;
  out.label.resize(n);
  std::vector<Digraph::Index> name_order(n);
  for (Digraph::Index i = 0; i < n; ++i) name_order[i] = i;
  std::sort(name_order.begin(), name_order.end(),
            [&](auto a, auto b) { return g.graph.name(a) < g.graph.name(b); });
  for (auto v : name_order) {
    auto [it, fresh] = renumber.emplace(label[v], static_cast<std::uint32_t>(renumber.size()));
    out.label[v] = it->second;
  }
  return out;
}

using CommunityStrategy = std::function<CommunityAssignment(const CrossSiteGraph&, std::uint64_t)>;

inline CommunityStrategy default_community_strategy() {
  return [](const CrossSiteGraph& g, std::uint64_t seed) { return detect_communities(g, seed); };
}

struct PositionThresholds {
  double authority_percentile = 0.75;
  double hub_percentile = 0.75;
  double bridge_score = 0.5;
  std::size_t bridge_min_communities = 2;
  double bridge_degree_quantile = 0.5;  ///< median

  friend bool operator==(const PositionThresholds&, const PositionThresholds&) = default;
};

struct BridgingResult {
  std::uint64_t degree = 0;  ///< distinct in + distinct out
  std::size_t distinct_neighbors = 0;
  std::optional<std::size_t> adjacent_communities;
  std::optional<double> bridge_score;
  bool bridge = false;
  bool isolated = false;
};

/// Communities adjacent to a site are the distinct labels among its neighbor
/// sites; its own label counts only through a neighbor that shares it.
inline BridgingResult bridging(const CrossSiteGraph& g, const std::string& site,
                               const CommunityAssignment& communities,
                               const PositionThresholds& thresholds = {}) {
  auto v = detail::require_site(g, site);
  if (communities.label.size() != g.graph.size())
    throw DomainError("community assignment was computed on a different graph");
  BridgingResult r;
  r.degree = g.graph.in(v).size() + g.graph.out(v).size();
  const auto nb = detail::undirected_neighbors(g.graph);
  r.distinct_neighbors = nb[v].size();
  if (nb[v].empty()) {
    r.isolated = true;
    return r;
  }
  std::set<std::uint32_t> labels;
  for (auto u : nb[v]) labels.insert(communities.label[u]);
  r.adjacent_communities = labels.size();
  r.bridge_score = static_cast<double>(labels.size()) / static_cast<double>(nb[v].size());
  std::vector<double> degrees;
  for (Digraph::Index u = 0; u < g.graph.size(); ++u)
    degrees.push_back(static_cast<double>(g.graph.in(u).size() + g.graph.out(u).size()));
  const double degree_cutoff = detail::quantile(degrees, thresholds.bridge_degree_quantile);
  r.bridge = labels.size() >= thresholds.bridge_min_communities &&
             *r.bridge_score >= thresholds.bridge_score &&
             static_cast<double>(r.degree) <= degree_cutoff;
  return r;
}

struct PositionProfile {
  std::string site;
  Degree in;   ///< authoritativeness
  Degree out;  ///< hubness
  BridgingResult bridging;
  bool authority = false;
  bool hub = false;
  std::vector<std::string> flags;

  std::uint64_t degree() const { return in.distinct + out.distinct; }
};

/// Degrees, bridging, and role flags for one site. Authority (hub) requires a
/// positive in-degree (out-degree) at or above the configured percentile of
/// all sites.
inline PositionProfile position_profile(const CrossSiteGraph& g, const std::string& site,
                                        const CommunityAssignment& communities,
                                        const PositionThresholds& thresholds = {}) {
  PositionProfile p;
  p.site = site;
  p.in = authoritativeness(g, site);
  p.out = hubness(g, site);
  p.bridging = bridging(g, site, communities, thresholds);
  std::vector<double> ins;
  std::vector<double> outs;
  for (Digraph::Index u = 0; u < g.graph.size(); ++u) {
    ins.push_back(static_cast<double>(g.graph.in(u).size()));
    outs.push_back(static_cast<double>(g.graph.out(u).size()));
  }
  p.authority = p.in.distinct > 0 &&
                static_cast<double>(p.in.distinct) >= detail::quantile(ins, thresholds.authority_percentile);
  p.hub = p.out.distinct > 0 &&
          static_cast<double>(p.out.distinct) >= detail::quantile(outs, thresholds.hub_percentile);
  if (p.bridging.isolated) p.flags.push_back("isolated_site");
  return p;
}

}  // namespace edumetrics::position
