// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edumetrics/error.hpp"
#include "edumetrics/report.hpp"
#include "edumetrics/text.hpp"
#include "edumetrics/time.hpp"

namespace edumetrics::config {

using KeyValues = std::map<std::string, std::string>;

struct KeyInfo {
  const char* key;
  const char* help;
};

/// Every recognised configuration key. Command-line flags use the same names
/// with '-' for '_'.
inline const std::vector<KeyInfo>& known_keys() {
  static const std::vector<KeyInfo> keys{
      {"portal_id", "portal whose metrics are computed"},
      {"catalog", "catalog file (CSV/TSV with header)"},
      {"taxonomy", "topic taxonomy file, one label per line"},
      {"edges", "site edge list or crawler outlink map"},
      {"edges_format", "edge_list | outlinks"},
      {"root", "homepage node id (default: first node seen)"},
      {"logs", "comma-separated Combined Log Format files (gzip allowed)"},
      {"join_map", "path,identifier file joining log paths to catalog records"},
      {"bots", "bot signature file, one substring per line (extends the defaults)"},
      {"page_links", "cross-site page link file (from_url,to_url)"},
      {"site_map", "url_prefix,site_id file"},
      {"site_id", "site id of the portal in the cross-site graph (default: portal_id)"},
      {"period_start", "analysis period start, ISO-8601 (default: first day in the logs)"},
      {"period_end", "analysis period end, exclusive (default: day after the last log day)"},
      {"bucket", "bucket length, e.g. 1d, 12h (default 1d)"},
      {"reference_date", "YYYY-MM-DD for content age (default: latest date in the inputs)"},
      {"session_timeout", "session inactivity timeout (default 30m)"},
      {"gap_threshold", "demand/offer share gap flag threshold (default 0.10)"},
      {"growth_threshold", "relative slope above which a portal is Growing (default 0.05)"},
      {"bridge_score", "minimum bridge score for the bridge flag (default 0.5)"},
      {"bridge_min_communities", "minimum adjacent communities for the bridge flag (default 2)"},
      {"bridge_degree_quantile", "degree quantile a bridge may not exceed (default 0.5)"},
      {"authority_percentile", "in-degree percentile for the authority flag (default 0.75)"},
      {"hub_percentile", "out-degree percentile for the hub flag (default 0.75)"},
      {"k", "conversion constant for unreachable pairs (default: page count)"},
      {"linearity_band", "navigation linearity above which a session counts as tedious (default 0.75)"},
      {"use_auth_user", "key visitors by authenticated user when present (default true)"},
      {"seed", "seed for community detection and generators (default 0)"},
      {"compare_margin", "shortfall beyond which a learning pointer is emitted (default 0.10)"},
      {"reports", "comma-separated report files for compare"},
      {"output_dir", "output directory (default .)"},
      {"kind", "gen: chain|cycle|complete|star|two-community|random-digraph|edgeless|synthetic-log|synthetic-catalog|portal-set"},
      {"size", "gen: node count"},
      {"edge_probability", "gen: random-digraph edge probability (default 0.3)"},
      {"visits", "gen: planted visits per bucket, comma-separated"},
      {"visitors", "gen: number of distinct visitors"},
      {"bot_fraction", "gen: share of log lines from automated agents"},
      {"max_views", "gen: maximum views per visit (default 4)"},
      {"topics", "gen: planted topic counts, topic:count,..."},
      {"ages", "gen: planted ages in days, assigned cyclically"},
      {"log_lines", "gen portal-set: approximate human log lines per portal"},
      {"pages", "gen portal-set: site graph size per portal"},
  };
  return keys;
}

inline bool is_known_key(const std::string& k) {
  for (const auto& info : known_keys())
    if (k == info.key) return true;
  return false;
}

/// "key = value" lines; '#' starts a comment line. Unknown keys are errors.
inline KeyValues parse(std::istream& in, const std::string& source = "config") {
  KeyValues kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(text::strip_cr(line));
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    std::string key(text::trim(t.substr(0, eq)));
    std::string value(text::trim(t.substr(eq + 1)));
    if (!is_known_key(key)) throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    kv[key] = value;
  }
  return kv;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (text::trim(s).empty()) return out;
  auto fields = text::split_record(s, ',');
  if (!fields) throw ConfigError("unterminated quote in list '" + s + "'");
  for (auto& f : *fields)
    if (!f.empty()) out.push_back(f);
  return out;
}

/// Makes relative input paths in `kv` relative to `base` instead of the
/// working directory. List-valued keys are rewritten element by element.
inline void rebase_paths(KeyValues& kv, const std::filesystem::path& base) {
  auto rebase = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() || base.empty() ? v : (base / p).lexically_normal().string();
  };
  for (const char* key : {"catalog", "taxonomy", "edges", "join_map", "bots", "page_links", "site_map", "output_dir"})
    if (auto it = kv.find(key); it != kv.end() && !it->second.empty()) it->second = rebase(it->second);
  for (const char* key : {"logs", "reports"}) {
    auto it = kv.find(key);
    if (it == kv.end()) continue;
    std::string joined;
    for (const auto& item : split_list(it->second)) joined += (joined.empty() ? "" : ",") + rebase(item);
    it->second = joined;
  }
}

/// Reads a config file; relative paths inside it resolve against its directory.
inline KeyValues parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  auto kv = parse(in, path.string());
  rebase_paths(kv, path.parent_path());
  return kv;
}

/// Parsed and range-checked run configuration.
struct RunConfig {
  std::string portal_id;
  std::optional<std::string> catalog;
  std::optional<std::string> taxonomy;
  std::optional<std::string> edges;
  std::string edges_format = "edge_list";
  std::optional<std::string> root;
  std::vector<std::string> logs;
  std::optional<std::string> join_map;
  std::optional<std::string> bots;
  std::optional<std::string> page_links;
  std::optional<std::string> site_map;
  std::optional<std::string> site_id;
  std::optional<Instant> period_start;
  std::optional<Instant> period_end;
  std::optional<Date> reference_date;
  report::Thresholds thresholds;
  bool use_auth_user = true;
  double compare_margin = 0.10;
  std::vector<std::string> reports;
  std::string output_dir = ".";
  KeyValues raw;  ///< merged key/values this config was built from

  Seconds bucket() const { return Seconds{thresholds.bucket_seconds}; }
  Seconds session_timeout() const { return Seconds{thresholds.session_timeout_seconds}; }
};

namespace detail {

inline double number(const KeyValues& kv, const char* key, double def, double lo, double hi,
                     bool lo_open = false) {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &used);
  } catch (...) {
    used = 0;
  }
  if (used == 0 || used != it->second.size())
    throw ConfigError(std::string("'") + key + "' must be a number, got '" + it->second + "'");
  if ((lo_open ? !(v > lo) : !(v >= lo)) || !(v <= hi))
    throw ConfigError(std::string("'") + key + "' = " + it->second + " is out of range");
  return v;
}

inline std::uint64_t integer(const KeyValues& kv, const char* key, std::uint64_t def, std::uint64_t lo = 0) {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  auto v = time_detail::parse_int<std::uint64_t>(it->second);
  if (!v) throw ConfigError(std::string("'") + key + "' must be a non-negative integer, got '" + it->second + "'");
  if (*v < lo) throw ConfigError(std::string("'") + key + "' must be at least " + std::to_string(lo));
  return *v;
}

inline Seconds duration(const KeyValues& kv, const char* key, Seconds def) {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  auto d = parse_duration(it->second);
  if (!d || d->count() <= 0)
    throw ConfigError(std::string("'") + key + "' must be a positive duration like 30m or 1d, got '" + it->second + "'");
  return *d;
}

inline std::optional<std::string> path(const KeyValues& kv, const char* key) {
  auto it = kv.find(key);
  if (it == kv.end() || it->second.empty()) return std::nullopt;
  return it->second;
}

inline bool boolean(const KeyValues& kv, const char* key, bool def) {
  auto it = kv.find(key);
  if (it == kv.end()) return def;
  auto v = text::lower(it->second);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(std::string("'") + key + "' must be true or false");
}

}  // namespace detail

inline RunConfig from_key_values(const KeyValues& kv) {
  for (const auto& [k, v] : kv)
    if (!is_known_key(k)) throw ConfigError("unknown configuration key '" + k + "'");
  RunConfig c;
  c.raw = kv;
  if (auto it = kv.find("portal_id"); it != kv.end()) c.portal_id = it->second;
  c.catalog = detail::path(kv, "catalog");
  c.taxonomy = detail::path(kv, "taxonomy");
  c.edges = detail::path(kv, "edges");
  if (auto f = detail::path(kv, "edges_format")) {
    if (*f != "edge_list" && *f != "outlinks") throw ConfigError("'edges_format' must be edge_list or outlinks");
    c.edges_format = *f;
  }
  c.root = detail::path(kv, "root");
  if (auto it = kv.find("logs"); it != kv.end()) c.logs = split_list(it->second);
  c.join_map = detail::path(kv, "join_map");
  c.bots = detail::path(kv, "bots");
  c.page_links = detail::path(kv, "page_links");
  c.site_map = detail::path(kv, "site_map");
  c.site_id = detail::path(kv, "site_id");
  if (auto s = detail::path(kv, "period_start")) {
    c.period_start = parse_iso_instant(*s);
    if (!c.period_start) throw ConfigError("'period_start' is not an ISO-8601 date/time: " + *s);
  }
  if (auto s = detail::path(kv, "period_end")) {
    c.period_end = parse_iso_instant(*s);
    if (!c.period_end) throw ConfigError("'period_end' is not an ISO-8601 date/time: " + *s);
  }
  if (c.period_start && c.period_end && !(*c.period_start < *c.period_end))
    throw ConfigError("'period_start' must precede 'period_end'");
  if (auto s = detail::path(kv, "reference_date")) {
    c.reference_date = parse_iso_date(*s);
    if (!c.reference_date) throw ConfigError("'reference_date' must be YYYY-MM-DD: " + *s);
  }
  auto& t = c.thresholds;
  t.bucket_seconds = detail::duration(kv, "bucket", Seconds{86400}).count();
  t.session_timeout_seconds = detail::duration(kv, "session_timeout", Seconds{1800}).count();
  t.gap_threshold = detail::number(kv, "gap_threshold", 0.10, 0.0, 1.0);
  t.growth_threshold = detail::number(kv, "growth_threshold", 0.05, 0.0, 1e9, true);
  t.bridge_score = detail::number(kv, "bridge_score", 0.5, 0.0, 1.0);
  t.bridge_min_communities = detail::integer(kv, "bridge_min_communities", 2, 1);
  t.bridge_degree_quantile = detail::number(kv, "bridge_degree_quantile", 0.5, 0.0, 1.0);
  t.authority_percentile = detail::number(kv, "authority_percentile", 0.75, 0.0, 1.0);
  t.hub_percentile = detail::number(kv, "hub_percentile", 0.75, 0.0, 1.0);
  t.linearity_band = detail::number(kv, "linearity_band", 0.75, 0.0, 1.0);
  if (kv.count("k")) t.conversion_constant = detail::integer(kv, "k", 0, 2);
  c.use_auth_user = detail::boolean(kv, "use_auth_user", true);
  t.visitor_key = c.use_auth_user ? "auth_user_else_client_agent_hash" : "client_agent_hash";
  t.seed = detail::integer(kv, "seed", 0);
  c.compare_margin = detail::number(kv, "compare_margin", 0.10, 0.0, 1e9);
  if (auto it = kv.find("reports"); it != kv.end()) c.reports = split_list(it->second);
  if (auto o = detail::path(kv, "output_dir")) c.output_dir = *o;
  return c;
}

}  // namespace edumetrics::config
