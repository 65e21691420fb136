// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <cstdlib>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "edumetrics/error.hpp"
#include "edumetrics/graph.hpp"
#include "edumetrics/text.hpp"
#include "edumetrics/url.hpp"

namespace edumetrics::structure {

/// Intra-portal page graph with a designated homepage.
struct SiteGraph {
  Digraph graph;
  Digraph::Index root = 0;
};

struct SiteGraphBuild {
  SiteGraph site;
  std::size_t self_loops_dropped = 0;
  std::size_t parallel_edges_collapsed = 0;
  std::size_t external_links_dropped = 0;  ///< crawler adapter only
  ParseDiagnostics diagnostics;
};

namespace detail {

inline void resolve_root(SiteGraphBuild& b, const std::optional<std::string>& root,
                         const std::optional<std::string>& first_seen) {
  if (b.site.graph.size() == 0) throw DomainError("site graph is empty");
  if (root) {
    auto r = b.site.graph.find(*root);
    if (!r) throw FormatError("root node '" + *root + "' is not in the site graph");
    b.site.root = *r;
  } else {
    b.site.root = *b.site.graph.find(*first_seen);
  }
}

}  // namespace detail

/// Reads (from, to) rows, comma or tab separated. Lines of the form
/// "# node: <id>" declare isolated nodes; other '#' lines are comments.
/// The root defaults to the first node seen.
inline SiteGraphBuild build_site_graph(std::istream& in, const std::optional<std::string>& root = {}) {
  SiteGraphBuild b;
  std::optional<std::string> first;
  std::string line;
  std::size_t line_no = 0;
  auto note = [&](const std::string& id) {
    if (!first) first = id;
  };
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(text::strip_cr(line));
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto body = text::trim(t.substr(1));
      if (text::starts_with_icase(body, "node:")) {
        auto id = std::string(text::trim(body.substr(5)));
        if (id.empty()) {
          b.diagnostics.add(line_no, "node declaration without an id");
          continue;
        }
        note(id);
        b.site.graph.add_node(id);
      }
      continue;
    }
    ++b.diagnostics.lines_read;
    auto fields = text::split_record(t, text::detect_delimiter(t));
    if (!fields || fields->size() != 2 || (*fields)[0].empty() || (*fields)[1].empty()) {
      b.diagnostics.add(line_no, "expected a (from, to) pair");
      continue;
    }
    const auto& from = (*fields)[0];
    const auto& to = (*fields)[1];
    note(from);
    auto f = b.site.graph.add_node(from);
    auto to_id = b.site.graph.add_node(to);
    if (f == to_id) {
      ++b.self_loops_dropped;
    } else if (!b.site.graph.add_edge(f, to_id)) {
      ++b.parallel_edges_collapsed;
    }
  }
  detail::resolve_root(b, root, first);
  return b;
}

/// Crawler-output adapter: each row is a page URL followed by its outlinks,
/// comma or tab separated. URLs are normalized; outlinks leaving the root's
/// host are dropped and tallied.
inline SiteGraphBuild build_site_graph_from_outlinks(std::istream& in,
                                                     const std::optional<std::string>& root = {}) {
  SiteGraphBuild b;
  std::optional<std::string> first;
  std::optional<std::string> site_host;
  if (root) site_host = url::host(*root);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(text::strip_cr(line));
    if (t.empty() || t.front() == '#') continue;
    ++b.diagnostics.lines_read;
    auto fields = text::split_record(t, text::detect_delimiter(t));
    if (!fields || fields->empty() || (*fields)[0].empty()) {
      b.diagnostics.add(line_no, "expected a page URL followed by outlinks");
      continue;
    }
    auto page = url::normalize((*fields)[0]);
    if (!first) first = page;
    if (!site_host) site_host = url::host(page);
    auto from = b.site.graph.add_node(page);
    for (std::size_t i = 1; i < fields->size(); ++i) {
      if ((*fields)[i].empty()) continue;
      auto target = url::normalize((*fields)[i]);
      auto target_host = url::host(target);
      if (!target_host.empty() && target_host != *site_host) {
        ++b.external_links_dropped;
        continue;
      }
      auto to = b.site.graph.add_node(target);
      if (to == from)
        ++b.self_loops_dropped;
      else if (!b.site.graph.add_edge(from, to))
        ++b.parallel_edges_collapsed;
    }
  }
  std::optional<std::string> normalized_root;
  if (root) normalized_root = url::normalize(*root);
  detail::resolve_root(b, normalized_root, first);
  return b;
}

/// All-pairs hop distances with unreachable pairs (and pairs farther than K)
/// set to K.
struct ConvertedDistanceMatrix {
  std::size_t n = 0;
  std::uint64_t k = 0;
  std::vector<std::uint64_t> d;  ///< row-major n x n

  std::uint64_t at(std::size_t i, std::size_t j) const { return d[i * n + j]; }
};

inline ConvertedDistanceMatrix converted_distances(const Digraph& g, std::optional<std::uint64_t> k = {}) {
  ConvertedDistanceMatrix m;
  m.n = g.size();
  m.k = k.value_or(m.n);
  if (m.k == 0) throw DomainError("conversion constant K must be positive");
  m.d.assign(m.n * m.n, m.k);
  std::vector<std::int64_t> dist;
  std::vector<Digraph::Index> queue;
  for (Digraph::Index s = 0; s < m.n; ++s) {
    bfs_distances(g, s, dist, queue);
    for (std::size_t t = 0; t < m.n; ++t) {
      if (t == s)
        m.d[s * m.n + t] = 0;
      else if (dist[t] != kUnreachable)
        m.d[s * m.n + t] = std::min<std::uint64_t>(static_cast<std::uint64_t>(dist[t]), m.k);
    }
  }
  return m;
}

/// Aggregates needed by compactness and stratum, accumulated source by source
/// so the n x n matrix is never materialized.
struct DistanceSums {
  std::uint64_t converted_total = 0;       ///< sum over i != j of converted distance
  std::vector<std::int64_t> status;        ///< sum of finite distances into v
  std::vector<std::int64_t> contrastatus;  ///< sum of finite distances out of v
};

inline DistanceSums distance_sums(const Digraph& g, std::uint64_t k) {
  const std::size_t n = g.size();
  DistanceSums s;
  s.status.assign(n, 0);
  s.contrastatus.assign(n, 0);
  std::vector<std::int64_t> dist;
  std::vector<Digraph::Index> queue;
  for (Digraph::Index src = 0; src < n; ++src) {
    bfs_distances(g, src, dist, queue);
    const std::uint64_t reached = queue.size() - 1;
    s.converted_total += (n - 1 - reached) * k;
    for (auto v : queue) {
      if (v == src) continue;
      s.converted_total += std::min<std::uint64_t>(static_cast<std::uint64_t>(dist[v]), k);
      s.status[v] += dist[v];
      s.contrastatus[src] += dist[v];
    }
  }
  return s;
}

/// A metric value plus the degeneracy marker for graphs too small to measure.
struct Metric {
  std::optional<double> value;
  bool degenerate = false;
};

struct DepthResult {
  std::optional<double> value;  ///< absent when no page is reachable from the root
  std::size_t reachable = 0;    ///< excluding the root
  std::size_t unreachable = 0;
  bool degenerate = false;  ///< n == 1; value reported as 0
};

/// Mean shortest click distance from the homepage over the pages reachable
/// from it. Unreachable pages are excluded and counted.
inline DepthResult depth(const SiteGraph& site) {
  DepthResult r;
  const auto& g = site.graph;
  if (g.size() <= 1) {
    r.value = 0.0;
    r.degenerate = true;
    return r;
  }
  std::vector<std::int64_t> dist;
  std::vector<Digraph::Index> queue;
  bfs_distances(g, site.root, dist, queue);
  std::int64_t sum = 0;
  for (auto v : queue) sum += dist[v];
  r.reachable = queue.size() - 1;
  r.unreachable = g.size() - queue.size();
  if (r.reachable > 0) r.value = static_cast<double>(sum) / static_cast<double>(r.reachable);
  return r;
}

/// |E| / (n (n - 1)).
inline Metric density(const Digraph& g) {
  if (g.size() <= 1) return {0.0, true};
  const double n = static_cast<double>(g.size());
  return {static_cast<double>(g.edge_count()) / (n * (n - 1.0)), false};
}

/// Compactness of the converted distance matrix:
/// (Max - sum) / (Max - Min) with Max = (n^2 - n) K and Min = n^2 - n.
inline Metric navigability(const Digraph& g, std::optional<std::uint64_t> k = {}) {
  const std::uint64_t n = g.size();
  if (n < 2) return {std::nullopt, true};
  const std::uint64_t kk = k.value_or(n);
  if (kk < 2) throw DomainError("conversion constant K must be at least 2 for navigability");
  const auto sums = distance_sums(g, kk);
  const std::uint64_t pairs = n * n - n;
  const std::uint64_t max = pairs * kk;
  return {static_cast<double>(max - sums.converted_total) / static_cast<double>(max - pairs), false};
}

/// Largest absolute prestige, attained by a directed chain on n nodes.
inline std::int64_t linear_absolute_prestige(std::int64_t n) {
  return n % 2 == 0 ? n * n * n / 4 : (n * n * n - n) / 4;
}

/// Stratum: sum over nodes of |status - contrastatus| divided by the
/// absolute prestige of a chain of the same size.
inline Metric linearity(const Digraph& g) {
  const auto n = static_cast<std::int64_t>(g.size());
  if (n < 2) return {std::nullopt, true};
  const auto sums = distance_sums(g, static_cast<std::uint64_t>(n));
  std::int64_t prestige = 0;
  for (std::int64_t v = 0; v < n; ++v)
    prestige += std::llabs(sums.status[static_cast<std::size_t>(v)] -
                           sums.contrastatus[static_cast<std::size_t>(v)]);
  return {static_cast<double>(prestige) / static_cast<double>(linear_absolute_prestige(n)), false};
}

struct OrganizationProfile {
  std::optional<double> depth;
  std::optional<double> density;
  std::optional<double> navigability;
  std::optional<double> linearity;
  std::size_t unreachable_pages = 0;
  std::size_t pages = 0;
  std::uint64_t k = 0;
  std::vector<std::string> flags;
};

/// All four organization metrics. Single-page graphs report every metric as
/// absent with a "degenerate_graph" flag.
inline OrganizationProfile organization_profile(const SiteGraph& site,
                                                std::optional<std::uint64_t> k = {}) {
  OrganizationProfile p;
  p.pages = site.graph.size();
  p.k = k.value_or(p.pages);
  if (site.graph.size() < 2) {
    p.flags.push_back("degenerate_graph");
    return p;
  }
  auto d = depth(site);
  p.depth = d.value;
  p.unreachable_pages = d.unreachable;
  if (!d.value) p.flags.push_back("root_reaches_no_page");
  if (d.unreachable > 0) p.flags.push_back("unreachable_pages");
  p.density = density(site.graph).value;
  p.navigability = navigability(site.graph, p.k).value;
  p.linearity = linearity(site.graph).value;
  return p;
}

}  // namespace edumetrics::structure
