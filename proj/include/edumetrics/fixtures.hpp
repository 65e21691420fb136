// SPDX-License-Identifier: Apache-2.0
#pragma once

// Deterministic generators with planted ground truth. Every generator emits
// the same text formats the parsers consume, and identical (spec, seed)
// produce identical bytes on every platform: only the bit-specified
// mt19937_64 engine is used, never the library distributions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "edumetrics/catalog.hpp"
#include "edumetrics/error.hpp"
#include "edumetrics/graph.hpp"
#include "edumetrics/io.hpp"
#include "edumetrics/time.hpp"
#include "edumetrics/usage.hpp"

namespace edumetrics::fixtures {

class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }
  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

private:
  std::mt19937_64 engine_;
};

enum class GraphKind { chain, cycle, complete, star, two_community, random_digraph, edgeless };

inline const char* to_string(GraphKind k) {
  switch (k) {
    case GraphKind::chain: return "chain";
    case GraphKind::cycle: return "cycle";
    case GraphKind::complete: return "complete";
    case GraphKind::star: return "star";
    case GraphKind::two_community: return "two-community";
    case GraphKind::random_digraph: return "random-digraph";
    default: return "edgeless";
  }
}

inline GraphKind graph_kind(const std::string& name) {
  for (auto k : {GraphKind::chain, GraphKind::cycle, GraphKind::complete, GraphKind::star,
                 GraphKind::two_community, GraphKind::random_digraph, GraphKind::edgeless})
    if (name == to_string(k)) return k;
  throw ConfigError("unknown generator kind '" + name + "'");
}

struct GraphSpec {
  GraphKind kind = GraphKind::chain;
  std::size_t size = 1;
  std::uint64_t seed = 0;
  double edge_probability = 0.3;  ///< random-digraph only
  std::string prefix = "p";       ///< node names are prefix + index
};

/// Shapes:
///  chain          p0 -> p1 -> ... -> p(n-1)
///  cycle          chain plus p(n-1) -> p0
///  complete       every ordered pair
///  star           p0 -> every other node
///  two-community  two complete blocks of sizes floor((n-1)/2) and
///                 ceil((n-1)/2); the last node links to the first node
///                 of each block
///  random-digraph each ordered pair independently with edge_probability
inline Digraph gen_graph(const GraphSpec& spec) {
  if (spec.size < 1) throw DomainError("generator size must be at least 1");
  const auto n = spec.size;
  Digraph g;
  for (std::size_t i = 0; i < n; ++i) g.add_node(spec.prefix + std::to_string(i));
  auto edge = [&](std::size_t a, std::size_t b) {
    g.add_edge(static_cast<Digraph::Index>(a), static_cast<Digraph::Index>(b));
  };
  switch (spec.kind) {
    case GraphKind::chain:
      for (std::size_t i = 0; i + 1 < n; ++i) edge(i, i + 1);
      break;
    case GraphKind::cycle:
      for (std::size_t i = 0; i + 1 < n; ++i) edge(i, i + 1);
      if (n > 1) edge(n - 1, 0);
      break;
    case GraphKind::complete:
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j) edge(i, j);
      break;
    case GraphKind::star:
      for (std::size_t i = 1; i < n; ++i) edge(0, i);
      break;
    case GraphKind::two_community: {
      if (n < 5) throw DomainError("two-community generator needs at least 5 nodes");
      const std::size_t a = (n - 1) / 2;
      const std::size_t bridge = n - 1;
      auto clique = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          for (std::size_t j = lo; j < hi; ++j)
            if (i != j) edge(i, j);
      };
      clique(0, a);
      clique(a, bridge);
      edge(bridge, 0);
      edge(bridge, a);
      break;
    }
    case GraphKind::random_digraph: {
      Rng rng(spec.seed);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (i != j && rng.chance(spec.edge_probability)) edge(i, j);
      break;
    }
    case GraphKind::edgeless:
      break;
  }
  return g;
}

/// Edge-list text: "# node:" lines for nodes without edges, then one
/// "from,to" row per edge. The root is emitted first so it is the default.
inline std::string edge_list_text(const Digraph& g, Digraph::Index root = 0) {
  std::string out = "# node: " + g.name(root) + "\n";
  for (Digraph::Index v = 0; v < g.size(); ++v)
    if (v != root && g.out(v).empty() && g.in(v).empty()) out += "# node: " + g.name(v) + "\n";
  for (const auto& [a, b] : g.edges()) out += g.name(a) + "," + g.name(b) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Catalogs

struct CatalogSpec {
  std::string portal_id = "portal";
  std::map<std::string, std::uint64_t> topic_counts;  ///< planted distribution
  std::vector<std::int64_t> ages_days{0};              ///< assigned cyclically
  Date reference = Date{std::chrono::year{2008} / 1 / 1};
  std::vector<std::string> resource_types{"activity", "teaching guide", "presentation"};
  std::string id_prefix;  ///< defaults to portal_id + ":"
  std::uint64_t seed = 0;
};

/// Records realizing the planted topic counts, with ages cycling through
/// `ages_days` so the mean age equals the mean of that list exactly.
inline std::vector<catalog::ContentRecord> gen_catalog(const CatalogSpec& spec) {
  if (spec.ages_days.empty()) throw DomainError("catalog generator needs at least one age");
  if (spec.resource_types.empty()) throw DomainError("catalog generator needs a resource type");
  std::uint64_t total = 0;
  for (const auto& [t, c] : spec.topic_counts) total += c;
  if (total % spec.ages_days.size() != 0)
    throw DomainError("infeasible catalog: record count is not a multiple of the planted age list");
  for (auto a : spec.ages_days)
    if (a < 0) throw DomainError("infeasible catalog: negative age");
  const std::string prefix = spec.id_prefix.empty() ? spec.portal_id + ":" : spec.id_prefix;
  std::vector<catalog::ContentRecord> out;
  std::size_t i = 0;
  for (const auto& [topic, count] : spec.topic_counts) {
    for (std::uint64_t k = 0; k < count; ++k, ++i) {
      catalog::ContentRecord r;
      r.identifier = prefix + std::to_string(i);
      r.resource_type = spec.resource_types[i % spec.resource_types.size()];
      r.topic = topic;
      r.published = spec.reference - std::chrono::days{spec.ages_days[i % spec.ages_days.size()]};
      r.portal_id = spec.portal_id;
      out.push_back(std::move(r));
    }
  }
  Rng rng(spec.seed);
  rng.shuffle(out);
  return out;
}

inline std::string catalog_csv(const std::vector<catalog::ContentRecord>& records) {
  std::string out = "identifier,resource_type,topic,published,portal_id\n";
  auto field = [](const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  for (const auto& r : records)
    out += field(r.identifier) + "," + field(r.resource_type) + "," + field(r.topic) + "," +
           format_date(r.published) + "," + field(r.portal_id) + "\n";
  return out;
}

inline std::string resource_path(const std::string& identifier) { return "/resource/" + identifier; }

/// path,identifier rows mapping resource_path() back to each record.
inline std::string join_map_text(const std::vector<catalog::ContentRecord>& records) {
  std::string out;
  for (const auto& r : records) out += resource_path(r.identifier) + "," + r.identifier + "\n";
  return out;
}

inline std::string taxonomy_text(const std::vector<std::string>& topics) {
  std::string out = "# topic taxonomy\n";
  for (const auto& t : topics) out += t + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Logs

struct LogSpec {
  Instant start = to_instant(Date{std::chrono::year{2008} / 3 / 1});
  Seconds bucket{86400};
  std::vector<std::uint64_t> visits_per_bucket;  ///< planted demand
  std::size_t visitors = 1;
  double bot_fraction = 0.0;  ///< share of all lines that are automated
  std::size_t max_views_per_visit = 4;
  std::vector<std::string> paths{"/"};
  Seconds view_spacing{60};
  Seconds session_timeout = usage::kDefaultSessionTimeout;
  std::uint64_t seed = 0;
};

struct GeneratedLog {
  std::vector<std::string> lines;  ///< chronological
  std::uint64_t human_lines = 0;
  std::uint64_t bot_lines = 0;
  std::uint64_t visits = 0;
};

inline const std::vector<std::string>& browser_agents() {
  static const std::vector<std::string> agents{
      "Mozilla/5.0 (Windows NT 6.1; rv:2.0) Gecko/20100101 Firefox/4.0",
      "Mozilla/5.0 (X11; Linux x86_64) AppleWebKit/537.36 (KHTML, like Gecko) Chrome/90.0 Safari/537.36",
      "Mozilla/4.0 (compatible; MSIE 7.0; Windows NT 5.1)",
      "Opera/9.80 (Windows NT 6.0; U; es) Presto/2.2.15 Version/10.10"};
  return agents;
}

inline const std::vector<std::string>& crawler_agents() {
  static const std::vector<std::string> agents{
      "Mozilla/5.0 (compatible; Googlebot/2.1; +http://www.google.com/bot.html)",
      "msnbot/1.1 (+http://search.msn.com/msnbot.htm)",
      "Mozilla/5.0 (compatible; Yahoo! Slurp; http://help.yahoo.com/help/us/ysearch/slurp)",
      "Baiduspider+(+http://www.baidu.com/search/spider.htm)"};
  return agents;
}

/// Visits are spread evenly inside their bucket and dealt to visitors round
/// robin; each visit is 1..max_views_per_visit views `view_spacing` apart.
/// Throws DomainError when a visitor's consecutive visits would fall within
/// the session timeout (they would merge into one session).
inline GeneratedLog gen_log(const LogSpec& spec) {
  if (spec.bucket.count() <= 0) throw DomainError("bucket length must be positive");
  if (!(spec.bot_fraction >= 0.0 && spec.bot_fraction < 1.0))
    throw DomainError("bot fraction must lie in [0, 1)");
  if (spec.paths.empty() || spec.max_views_per_visit == 0)
    throw DomainError("log generator needs paths and at least one view per visit");
  std::uint64_t planned = 0;
  for (auto v : spec.visits_per_bucket) planned += v;
  if (planned > 0 && spec.visitors == 0) throw DomainError("infeasible log: visits planted without visitors");

  Rng rng(spec.seed);
  struct Line {
    Instant t;
    std::size_t order;
    std::string text;
  };
  std::vector<Line> lines;
  GeneratedLog out;

  std::vector<std::optional<Instant>> last_end(spec.visitors);
  std::uint64_t global = 0;
  const auto& agents = browser_agents();
  for (std::size_t b = 0; b < spec.visits_per_bucket.size(); ++b) {
    const auto v = spec.visits_per_bucket[b];
    const Instant bucket_start = spec.start + Seconds{spec.bucket.count() * static_cast<std::int64_t>(b)};
    for (std::uint64_t i = 0; i < v; ++i, ++global) {
      const auto offset = static_cast<std::int64_t>((2 * i + 1) * static_cast<std::uint64_t>(spec.bucket.count()) / (2 * v));
      const Instant start = bucket_start + Seconds{offset};
      const auto visitor = static_cast<std::size_t>(global % spec.visitors);
      const auto views = 1 + rng.below(spec.max_views_per_visit);
      if (last_end[visitor] && start - *last_end[visitor] <= spec.session_timeout)
        throw DomainError("infeasible log: visits of one visitor closer than the session timeout");
      usage::LogEntry e;
      e.client = "10." + std::to_string(visitor / 65536 % 256) + "." + std::to_string(visitor / 256 % 256) +
                 "." + std::to_string(visitor % 256);
      e.auth_user = "-";
      e.method = "GET";
      e.protocol = "HTTP/1.1";
      e.status = 200;
      e.user_agent = agents[visitor % agents.size()];
      Instant t = start;
      for (std::uint64_t k = 0; k < views; ++k, t += spec.view_spacing) {
        e.timestamp = t;
        e.referrer = k == 0 ? std::string{} : "http://portal.example" + e.path;
        e.path = spec.paths[rng.below(spec.paths.size())];
        e.bytes = std::to_string(1000 + rng.below(9000));
        lines.push_back({t, lines.size(), usage::format_log_line(e)});
        ++out.human_lines;
      }
      last_end[visitor] = t - spec.view_spacing;
      ++out.visits;
    }
  }

  const auto bots = static_cast<std::uint64_t>(
      std::llround(static_cast<double>(out.human_lines) * spec.bot_fraction / (1.0 - spec.bot_fraction)));
  const auto span = spec.bucket.count() * static_cast<std::int64_t>(std::max<std::size_t>(1, spec.visits_per_bucket.size()));
  const auto& crawlers = crawler_agents();
  for (std::uint64_t i = 0; i < bots; ++i) {
    usage::LogEntry e;
    e.client = "192.0.2." + std::to_string(1 + i % 200);
    e.auth_user = "-";
    e.method = "GET";
    e.protocol = "HTTP/1.0";
    e.status = 200;
    e.timestamp = spec.start + Seconds{static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(span)))};
    if (i % 5 == 4) {
      e.path = "/robots.txt";
      e.user_agent = "Mozilla/5.0 (compatible)";
    } else {
      e.path = spec.paths[rng.below(spec.paths.size())];
      e.user_agent = crawlers[i % crawlers.size()];
    }
    e.bytes = "512";
    lines.push_back({e.timestamp, lines.size(), usage::format_log_line(e)});
  }
  out.bot_lines = bots;
  std::stable_sort(lines.begin(), lines.end(), [](const Line& a, const Line& b) { return a.t < b.t; });
  out.lines.reserve(lines.size());
  for (auto& l : lines) out.lines.push_back(std::move(l.text));
  return out;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Cross-site links

/// Page-level links realizing a site graph: edge u -> v becomes
/// `links_per_edge` links from distinct pages of u to v's home page.
inline std::string page_links_text(const Digraph& sites, std::size_t links_per_edge = 1) {
  std::string out;
  for (const auto& [a, b] : sites.edges())
    for (std::size_t k = 0; k < links_per_edge; ++k)
      out += "http://" + sites.name(a) + ".example/page" + std::to_string(k) + ",http://" +
             sites.name(b) + ".example/\n";
  return out;
}

inline std::string site_map_text(const Digraph& sites) {
  std::string out;
  for (const auto& n : sites.names()) out += "http://" + n + ".example/," + n + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Portal sets

/// A small network of synthetic portals sharing one catalog. Portals share
/// a segment (equal catalog sizes, growing demand) but differ in site
/// organization: the first gets a well-linked site, the others plain chains.
struct PortalSetSpec {
  std::vector<std::string> portals{"portal-a", "portal-b"};
  std::size_t pages = 200;       ///< site graph size per portal
  std::size_t log_lines = 2000;  ///< approximate human lines per portal
  std::size_t records = 60;      ///< catalog records per portal
  double bot_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct PortalSetFiles {
  std::map<std::string, std::filesystem::path> configs;  ///< portal -> config file
};

namespace detail {

inline Digraph well_linked_site(std::size_t pages, Rng& rng) {
  Digraph g;
  for (std::size_t i = 0; i < pages; ++i) g.add_node("/page" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < pages; ++i) {
    g.add_edge(static_cast<Digraph::Index>(i), static_cast<Digraph::Index>(i + 1));
    g.add_edge(static_cast<Digraph::Index>(i + 1), static_cast<Digraph::Index>(0));
  }
  if (pages > 1)
    for (std::size_t i = 0; i < pages; ++i)
      for (int k = 0; k < 6; ++k)
        g.add_edge(static_cast<Digraph::Index>(i), static_cast<Digraph::Index>(rng.below(pages)));
  return g;
}

inline Digraph chain_site(std::size_t pages) {
  Digraph g;
  for (std::size_t i = 0; i < pages; ++i) g.add_node("/page" + std::to_string(i));
  for (std::size_t i = 0; i + 1 < pages; ++i)
    g.add_edge(static_cast<Digraph::Index>(i), static_cast<Digraph::Index>(i + 1));
  return g;
}

}  // namespace detail

/// Writes catalog, taxonomy, join map, cross-site links, and per-portal site
/// graphs, logs, and config files under `dir`. Config paths are relative to
/// `dir`.
inline PortalSetFiles write_portal_set(const std::filesystem::path& dir, const PortalSetSpec& spec) {
  if (spec.portals.empty()) throw DomainError("portal set needs at least one portal");
  if (spec.pages < 2) throw DomainError("portal set needs at least two pages per site");
  if (spec.records < 4) throw DomainError("portal set needs at least four records per portal");
  const std::vector<std::string> topics{"arts", "history", "languages", "mathematics", "science"};
  PortalSetFiles files;
  Rng rng(spec.seed);

  std::vector<catalog::ContentRecord> all;
  for (std::size_t p = 0; p < spec.portals.size(); ++p) {
    CatalogSpec cs;
    cs.portal_id = spec.portals[p];
    // each portal leans on a different favourite topic, more heavily the later it comes
    for (std::size_t i = 0; i < spec.records; ++i)
      ++cs.topic_counts[topics[i % (p + 2) == 0 ? i % topics.size() : p % topics.size()]];
    cs.ages_days = {30, 90, 365, 730};
    cs.ages_days.resize(spec.records % 4 == 0 ? 4 : 1);
    cs.seed = spec.seed + p;
    auto recs = gen_catalog(cs);
    all.insert(all.end(), recs.begin(), recs.end());
  }
  io::write_file(dir / "catalog.csv", catalog_csv(all));
  io::write_file(dir / "taxonomy.txt", taxonomy_text(topics));
  io::write_file(dir / "join_map.csv", join_map_text(all));

  Digraph sites;
  for (const auto& p : spec.portals) sites.add_node(p);
  for (int i = 0; i < 4; ++i) sites.add_node("site-" + std::to_string(i));
  const auto n_sites = sites.size();
  for (std::size_t i = 0; i < n_sites; ++i) {
    sites.add_edge(static_cast<Digraph::Index>(i), static_cast<Digraph::Index>((i + 1) % n_sites));
    sites.add_edge(static_cast<Digraph::Index>(rng.below(n_sites)), static_cast<Digraph::Index>(i));
  }
  io::write_file(dir / "page_links.csv", page_links_text(sites, 2));
  io::write_file(dir / "site_map.csv", site_map_text(sites));

  for (std::size_t p = 0; p < spec.portals.size(); ++p) {
    const auto& portal = spec.portals[p];
    const Digraph site = p == 0 ? detail::well_linked_site(spec.pages, rng) : detail::chain_site(spec.pages);
    io::write_file(dir / portal / "edges.txt", edge_list_text(site));

    LogSpec ls;
    ls.bot_fraction = spec.bot_fraction;
    ls.seed = spec.seed + 100 + p;
    // growing demand n, 2n, 3n; about 2.5 views per visit on average
    const auto n = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(spec.log_lines) / 15);
    ls.visits_per_bucket = {n, 2 * n, 3 * n};
    ls.visitors = static_cast<std::size_t>(std::max<std::uint64_t>(1, 6 * n / 10));
    ls.paths.clear();
    for (const auto& r : all)
      if (r.portal_id == portal) ls.paths.push_back(resource_path(r.identifier));
    io::write_file(dir / portal / "access.log", join_lines(gen_log(ls).lines));

    std::string conf = "# synthetic portal " + portal + "\n";
    conf += "portal_id = " + portal + "\n";
    conf += "catalog = catalog.csv\n";
    conf += "taxonomy = taxonomy.txt\n";
    conf += "join_map = join_map.csv\n";
    conf += "edges = " + portal + "/edges.txt\n";
    conf += "logs = " + portal + "/access.log\n";
    conf += "page_links = page_links.csv\n";
    conf += "site_map = site_map.csv\n";
    conf += "seed = " + std::to_string(spec.seed) + "\n";
    const auto path = dir / (portal + ".conf");
    io::write_file(path, conf);
    files.configs[portal] = path;
  }
  return files;
}

}  // namespace edumetrics::fixtures
