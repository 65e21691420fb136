// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "edumetrics/catalog.hpp"
#include "edumetrics/error.hpp"
#include "edumetrics/graph.hpp"
#include "edumetrics/structure.hpp"
#include "edumetrics/text.hpp"
#include "edumetrics/time.hpp"

namespace edumetrics::usage {

struct LogEntry {
  std::string visitor_key;
  std::string client;
  std::string auth_user;  ///< "-" when anonymous
  Instant timestamp;
  std::string method;
  std::string path;
  std::string protocol;
  int status = 0;
  std::string bytes;
  std::string referrer;  ///< empty when "-"
  std::string user_agent;

  /// Only 2xx and 3xx responses count as page views.
  bool is_view() const { return status >= 200 && status < 400; }
};

/// How visitor keys are derived: the authenticated user when present (and
/// enabled), otherwise a hash of client address and user agent.
struct VisitorKeyPolicy {
  bool use_auth_user = true;
};

inline std::string visitor_key(std::string_view client, std::string_view auth_user,
                               std::string_view user_agent, const VisitorKeyPolicy& policy) {
  if (policy.use_auth_user && !auth_user.empty() && auth_user != "-")
    return "u:" + std::string(auth_user);
  auto h = text::fnv1a64(client);
  h = text::fnv1a64("\x1f", h);
  h = text::fnv1a64(user_agent, h);
  return "h:" + text::hex64(h);
}

namespace detail {

/// Cursor over one log line.
class Scanner {
public:
  explicit Scanner(std::string_view s) : s_(s) {}

  bool at_end() const { return pos_ >= s_.size(); }

  void skip_spaces() {
    while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
  }

  std::optional<std::string_view> token() {
    skip_spaces();
    auto start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ' ') ++pos_;
    if (pos_ == start) return std::nullopt;
    return s_.substr(start, pos_ - start);
  }

  std::optional<std::string_view> bracketed() {
    skip_spaces();
    if (pos_ >= s_.size() || s_[pos_] != '[') return std::nullopt;
    auto close = s_.find(']', pos_);
    if (close == std::string_view::npos) return std::nullopt;
    auto v = s_.substr(pos_ + 1, close - pos_ - 1);
    pos_ = close + 1;
    return v;
  }

  /// Double-quoted field; backslash escapes the next character.
  std::optional<std::string> quoted() {
    skip_spaces();
    if (pos_ >= s_.size() || s_[pos_] != '"') return std::nullopt;
    std::string out;
    for (++pos_; pos_ < s_.size(); ++pos_) {
      char c = s_[pos_];
      if (c == '\\' && pos_ + 1 < s_.size()) {
        out.push_back(s_[++pos_]);
      } else if (c == '"') {
        ++pos_;
        return out;
      } else {
        out.push_back(c);
      }
    }
    return std::nullopt;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one NCSA Combined Log Format line.
inline std::optional<LogEntry> parse_log_line(std::string_view line,
                                              const VisitorKeyPolicy& policy = {}) {
  detail::Scanner sc(line);
  LogEntry e;
  auto host = sc.token();
  auto ident = sc.token();
  auto user = sc.token();
  auto ts = sc.bracketed();
  if (!host || !ident || !user || !ts) return std::nullopt;
  auto when = parse_clf_timestamp(*ts);
  if (!when) return std::nullopt;
  auto request = sc.quoted();
  auto status = sc.token();
  auto bytes = sc.token();
  auto referrer = sc.quoted();
  auto agent = sc.quoted();
  if (!request || !status || !bytes || !referrer || !agent) return std::nullopt;
  sc.skip_spaces();
  if (!sc.at_end()) return std::nullopt;

  auto req = text::trim(*request);
  auto sp1 = req.find(' ');
  if (sp1 == std::string_view::npos) return std::nullopt;
  auto rest = req.substr(sp1 + 1);
  auto sp2 = rest.rfind(' ');
  e.method = std::string(req.substr(0, sp1));
  if (sp2 == std::string_view::npos) {
    e.path = std::string(rest);
  } else {
    e.path = std::string(rest.substr(0, sp2));
    e.protocol = std::string(rest.substr(sp2 + 1));
  }
  if (e.path.empty()) return std::nullopt;
  if (auto hash = e.path.find('#'); hash != std::string::npos) e.path.erase(hash);

  int code = 0;
  if (status->size() != 3 ||
      std::from_chars(status->data(), status->data() + status->size(), code).ec != std::errc{})
    return std::nullopt;
  e.status = code;
  e.client = std::string(*host);
  e.auth_user = std::string(*user);
  e.timestamp = *when;
  e.bytes = std::string(*bytes);
  e.referrer = *referrer == "-" ? std::string{} : std::move(*referrer);
  e.user_agent = std::move(*agent);
  e.visitor_key = visitor_key(e.client, e.auth_user, e.user_agent, policy);
  return e;
}

/// Inverse of parse_log_line for entries with a UTC timestamp.
inline std::string format_log_line(const LogEntry& e) {
  auto esc = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    return out;
  };
  std::string out = e.client + " - " + (e.auth_user.empty() ? "-" : e.auth_user) + " [" +
                    format_clf_timestamp(e.timestamp) + "] \"" + esc(e.method) + " " + esc(e.path);
  if (!e.protocol.empty()) out += " " + esc(e.protocol);
  out += "\" " + std::to_string(e.status) + " " + (e.bytes.empty() ? "-" : e.bytes) + " \"" +
         (e.referrer.empty() ? "-" : esc(e.referrer)) + "\" \"" + esc(e.user_agent) + "\"";
  return out;
}

struct LogParseResult {
  std::vector<LogEntry> entries;
  ParseDiagnostics diagnostics;
  std::size_t non_view_entries = 0;  ///< parsed, but not 2xx/3xx
};

/// Appends the entries of one stream to `result`. Every line, empty lines
/// included, counts toward the malformed tally when it does not parse.
inline void parse_log_into(std::istream& in, LogParseResult& result, const VisitorKeyPolicy& policy = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++result.diagnostics.lines_read;
    line.resize(text::strip_cr(line).size());
    auto e = parse_log_line(line, policy);
    if (!e) {
      result.diagnostics.add(line_no, line.empty() ? "empty line" : "not a Combined Log Format line");
      continue;
    }
    if (!e->is_view()) ++result.non_view_entries;
    result.entries.push_back(std::move(*e));
  }
}

/// Throws FormatError when more than half of the lines were malformed.
inline void check_log_quality(const LogParseResult& result) {
  const auto& d = result.diagnostics;
  if (d.lines_read > 0 && d.error_count() * 2 > d.lines_read)
    throw FormatError("log is not in Combined Log Format: " + std::to_string(d.error_count()) +
                      " of " + std::to_string(d.lines_read) + " lines malformed");
}

inline LogParseResult parse_log(std::istream& in, const VisitorKeyPolicy& policy = {}) {
  LogParseResult r;
  parse_log_into(in, r, policy);
  check_log_quality(r);
  return r;
}

inline const std::vector<std::string>& default_bot_signatures() {
  static const std::vector<std::string> sigs{
      "bot",         "crawler",  "spider",      "slurp",           "crawl",
      "archiver",    "wget",     "curl/",       "python-requests", "httpclient",
      "libwww-perl", "scrapy",   "headlesschrome", "facebookexternalhit", "feedfetcher",
      "mediapartners", "ia_archiver", "yandex",  "baiduspider",     "monitor"};
  return sigs;
}

/// One case-insensitive substring per line; '#' comments and blank lines ignored.
inline std::vector<std::string> parse_signatures(std::istream& in) {
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(text::strip_cr(line));
    if (t.empty() || t.front() == '#') continue;
    out.push_back(text::lower(t));
  }
  return out;
}

struct AgentPartition {
  std::vector<LogEntry> human;
  std::vector<LogEntry> bots;
};

inline bool is_robots_request(std::string_view path) {
  auto q = path.find('?');
  return path.substr(0, q) == "/robots.txt";
}

inline bool is_automated(const LogEntry& e, std::span<const std::string> signatures) {
  if (is_robots_request(e.path)) return true;
  auto ua = text::lower(e.user_agent);
  for (const auto& s : signatures)
    if (!s.empty() && ua.find(text::lower(s)) != std::string::npos) return true;
  return false;
}

/// Routes each entry to exactly one side: bots (signature match or robots
/// exclusion file request) or human.
inline AgentPartition filter_agents(std::span<const LogEntry> entries,
                                    std::span<const std::string> signatures) {
  std::vector<std::string> lowered;
  lowered.reserve(signatures.size());
  for (const auto& s : signatures) lowered.push_back(text::lower(s));
  AgentPartition p;
  for (const auto& e : entries) {
    if (is_automated(e, lowered))
      p.bots.push_back(e);
    else
      p.human.push_back(e);
  }
  return p;
}

inline std::vector<LogEntry> views_only(std::span<const LogEntry> entries) {
  std::vector<LogEntry> out;
  for (const auto& e : entries)
    if (e.is_view()) out.push_back(e);
  return out;
}

struct PageView {
  Instant timestamp;
  std::string path;

  friend bool operator==(const PageView&, const PageView&) = default;
};

struct Session {
  std::string visitor_key;
  Instant start;
  Instant end;
  std::vector<PageView> views;

  friend bool operator==(const Session&, const Session&) = default;
};

inline constexpr Seconds kDefaultSessionTimeout{30 * 60};

/// Groups entries per visitor, orders them by time, and starts a new session
/// whenever the gap to the previous view exceeds `timeout`. Output is sorted
/// by (visitor_key, start) and independent of input order.
inline std::vector<Session> sessionize(std::span<const LogEntry> entries,
                                       Seconds timeout = kDefaultSessionTimeout) {
  std::vector<const LogEntry*> order;
  order.reserve(entries.size());
  for (const auto& e : entries) order.push_back(&e);
  std::sort(order.begin(), order.end(), [](const LogEntry* a, const LogEntry* b) {
    return std::tie(a->visitor_key, a->timestamp, a->path) <
           std::tie(b->visitor_key, b->timestamp, b->path);
  });
  std::vector<Session> sessions;
  for (const LogEntry* e : order) {
    bool extend = !sessions.empty() && sessions.back().visitor_key == e->visitor_key &&
                  e->timestamp - sessions.back().end <= timeout;
    if (!extend) {
      Session s;
      s.visitor_key = e->visitor_key;
      s.start = e->timestamp;
      sessions.push_back(std::move(s));
    }
    auto& s = sessions.back();
    s.end = e->timestamp;
    s.views.push_back({e->timestamp, e->path});
  }
  return sessions;
}

/// Half-open [start, end) split into buckets of `bucket`; the last bucket may
/// be partial.
struct AnalysisPeriod {
  Instant start;
  Instant end;
  Seconds bucket{86400};

  void validate() const {
    if (!(start < end)) throw ConfigError("analysis period must have start < end");
    if (bucket.count() <= 0) throw ConfigError("bucket length must be positive");
  }
  std::size_t bucket_count() const {
    auto span = (end - start).count();
    return static_cast<std::size_t>((span + bucket.count() - 1) / bucket.count());
  }
  bool contains(Instant t) const { return t >= start && t < end; }
  std::optional<std::size_t> bucket_of(Instant t) const {
    if (!contains(t)) return std::nullopt;
    return static_cast<std::size_t>((t - start).count() / bucket.count());
  }
  Instant bucket_start(std::size_t i) const {
    return start + Seconds{bucket.count() * static_cast<std::int64_t>(i)};
  }
  bool overlaps(const AnalysisPeriod& o) const { return start < o.end && o.start < end; }

  friend bool operator==(const AnalysisPeriod&, const AnalysisPeriod&) = default;
};

struct DemandCounts {
  std::vector<std::uint64_t> buckets;
  std::uint64_t total = 0;
};

/// Visits per bucket, each session counted in the bucket holding its start.
inline DemandCounts overall_demand(std::span<const Session> sessions, const AnalysisPeriod& period) {
  period.validate();
  DemandCounts d;
  d.buckets.assign(period.bucket_count(), 0);
  for (const auto& s : sessions) {
    if (auto b = period.bucket_of(s.start)) {
      ++d.buckets[*b];
      ++d.total;
    }
  }
  return d;
}

struct RecencyResult {
  std::optional<double> seconds;  ///< absent when no visitor has two visits
  std::size_t eligible_visitors = 0;
  std::size_t single_visit_visitors = 0;

  std::optional<double> days() const {
    if (!seconds) return std::nullopt;
    return *seconds / 86400.0;
  }
};

/// Mean over visitors with at least two in-period visits of their mean gap
/// between consecutive visit starts.
inline RecencyResult recency(std::span<const Session> sessions, const AnalysisPeriod& period) {
  std::map<std::string, std::vector<Instant>> starts;
  for (const auto& s : sessions)
    if (period.contains(s.start)) starts[s.visitor_key].push_back(s.start);
  RecencyResult r;
  double sum_of_means = 0.0;
  for (auto& [visitor, ts] : starts) {
    if (ts.size() < 2) {
      ++r.single_visit_visitors;
      continue;
    }
    std::sort(ts.begin(), ts.end());
    // mean of consecutive gaps telescopes to (last - first) / (k - 1)
    sum_of_means += static_cast<double>((ts.back() - ts.front()).count()) /
                    static_cast<double>(ts.size() - 1);
    ++r.eligible_visitors;
  }
  if (r.eligible_visitors > 0) r.seconds = sum_of_means / static_cast<double>(r.eligible_visitors);
  return r;
}

/// Total page views over total visits.
inline double activity_level(std::span<const Session> sessions) {
  if (sessions.empty()) throw DomainError("activity level of an empty session set");
  std::uint64_t views = 0;
  for (const auto& s : sessions) views += s.views.size();
  return static_cast<double>(views) / static_cast<double>(sessions.size());
}

/// Log path -> catalog identifier. Lookups fall back to the path without its
/// query string.
class PathJoin {
public:
  void add(std::string path, std::string identifier) { map_.emplace(std::move(path), std::move(identifier)); }

  /// Two-column delimited file (path, identifier).
  static PathJoin parse(std::istream& in, ParseDiagnostics* diag = nullptr) {
    PathJoin j;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto t = text::trim(text::strip_cr(line));
      if (t.empty() || t.front() == '#') continue;
      auto f = text::split_record(t, text::detect_delimiter(t));
      if (!f || f->size() != 2 || (*f)[0].empty() || (*f)[1].empty()) {
        if (diag) diag->add(line_no, "expected (path, identifier)");
        continue;
      }
      j.add((*f)[0], (*f)[1]);
    }
    return j;
  }

  const std::string* find(const std::string& path) const {
    if (auto it = map_.find(path); it != map_.end()) return &it->second;
    if (auto q = path.find('?'); q != std::string::npos) {
      if (auto it = map_.find(path.substr(0, q)); it != map_.end()) return &it->second;
    }
    return nullptr;
  }

  std::size_t size() const { return map_.size(); }

private:
  std::unordered_map<std::string, std::string> map_;
};

struct AccessedDistribution {
  std::vector<catalog::TopicDistribution> by_views;     ///< per bucket
  std::vector<catalog::TopicDistribution> by_visitors;  ///< per bucket, distinct visitors
  catalog::TopicDistribution total_by_views;
  catalog::TopicDistribution total_by_visitors;  ///< distinct visitors over the whole period
  std::uint64_t uncatalogued_views = 0;
};

/// Joins in-period page views to catalog records and tallies them per label,
/// both by views and by distinct visitors.
inline AccessedDistribution accessed_distribution(std::span<const Session> sessions, const PathJoin& join,
                                                  std::span<const catalog::ContentRecord> records,
                                                  catalog::Axis axis, const AnalysisPeriod& period) {
  period.validate();
  std::unordered_map<std::string, const catalog::ContentRecord*> by_id;
  for (const auto& r : records) by_id.emplace(r.identifier, &r);

  AccessedDistribution out;
  const auto nb = period.bucket_count();
  out.by_views.resize(nb);
  out.by_visitors.resize(nb);
  std::vector<std::set<std::pair<std::string, std::string>>> seen(nb);
  std::set<std::pair<std::string, std::string>> seen_total;
  for (const auto& s : sessions) {
    for (const auto& v : s.views) {
      auto b = period.bucket_of(v.timestamp);
      if (!b) continue;
      const std::string* id = join.find(v.path);
      auto it = id ? by_id.find(*id) : by_id.end();
      if (it == by_id.end()) {
        ++out.uncatalogued_views;
        continue;
      }
      const auto& label = catalog::label_of(*it->second, axis);
      out.by_views[*b].add(label);
      out.total_by_views.add(label);
      if (seen[*b].emplace(label, s.visitor_key).second) out.by_visitors[*b].add(label);
      if (seen_total.emplace(label, s.visitor_key).second) out.total_by_visitors.add(label);
    }
  }
  if (out.total_by_views.total == 0)
    throw DomainError("no page view could be joined to the catalog (" +
                      std::to_string(out.uncatalogued_views) + " uncatalogued views)");
  return out;
}

/// Distinct pages of one session with an edge for every consecutive pair of
/// views; reloads (same page twice in a row) add no edge.
inline Digraph navigation_path_graph(const Session& s) {
  Digraph g;
  for (std::size_t i = 0; i < s.views.size(); ++i) {
    auto cur = g.add_node(s.views[i].path);
    if (i > 0) g.add_edge(*g.find(s.views[i - 1].path), cur);
  }
  return g;
}

struct NavigationMetrics {
  std::optional<double> complexity;  ///< compactness of the path graph
  std::optional<double> linearity;   ///< stratum of the path graph
  std::size_t distinct_pages = 0;
  bool degenerate = false;  ///< fewer than two distinct pages
};

inline NavigationMetrics navigation_metrics(const Session& s) {
  auto g = navigation_path_graph(s);
  NavigationMetrics m;
  m.distinct_pages = g.size();
  if (g.size() < 2) {
    m.degenerate = true;
    return m;
  }
  m.complexity = structure::navigability(g).value;
  m.linearity = structure::linearity(g).value;
  return m;
}

struct NavigationSummary {
  std::size_t measured_sessions = 0;
  std::size_t degenerate_sessions = 0;
  std::optional<double> mean_complexity;
  std::optional<double> median_complexity;
  std::optional<double> mean_linearity;
  std::optional<double> median_linearity;
  std::optional<double> share_linearity_above_band;
  double linearity_band = 0.75;
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  auto n = v.size();
  return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace detail

inline NavigationSummary navigation_summary(std::span<const Session> sessions, double linearity_band = 0.75) {
  NavigationSummary out;
  out.linearity_band = linearity_band;
  std::vector<double> complexity;
  std::vector<double> linearity;
  std::size_t above = 0;
  for (const auto& s : sessions) {
    auto m = navigation_metrics(s);
    if (m.degenerate) {
      ++out.degenerate_sessions;
      continue;
    }
    complexity.push_back(*m.complexity);
    linearity.push_back(*m.linearity);
    if (*m.linearity > linearity_band) ++above;
  }
  out.measured_sessions = complexity.size();
  if (!complexity.empty()) {
    out.mean_complexity = detail::mean(complexity);
    out.median_complexity = detail::median(complexity);
    out.mean_linearity = detail::mean(linearity);
    out.median_linearity = detail::median(linearity);
    out.share_linearity_above_band =
        static_cast<double>(above) / static_cast<double>(complexity.size());
  }
  return out;
}

inline std::optional<Instant> latest_timestamp(std::span<const LogEntry> entries) {
  std::optional<Instant> t;
  for (const auto& e : entries)
    if (!t || e.timestamp > *t) t = e.timestamp;
  return t;
}

inline std::optional<Instant> earliest_timestamp(std::span<const LogEntry> entries) {
  std::optional<Instant> t;
  for (const auto& e : entries)
    if (!t || e.timestamp < *t) t = e.timestamp;
  return t;
}

}  // namespace edumetrics::usage
