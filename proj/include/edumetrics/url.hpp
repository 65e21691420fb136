// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edumetrics/text.hpp"

namespace edumetrics::url {

struct Parts {
  std::string scheme;  // lowercased, may be empty
  std::string host;    // lowercased, without port
  std::string port;    // empty when default or absent
  std::string path;    // "/" when empty; query kept, fragment dropped
};

inline Parts split(std::string_view u) {
  Parts p;
  u = text::trim(u);
  if (auto hash = u.find('#'); hash != std::string_view::npos) u = u.substr(0, hash);
  if (auto sep = u.find("://"); sep != std::string_view::npos) {
    p.scheme = text::lower(u.substr(0, sep));
    u.remove_prefix(sep + 3);
  } else if (u.rfind("//", 0) == 0) {
    u.remove_prefix(2);
  } else if (!u.empty() && u.front() == '/') {
    p.path = std::string(u);
    return p;
  }
  auto slash = u.find_first_of("/?");
  std::string_view authority = u.substr(0, slash);
  if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
  std::string_view rest = slash == std::string_view::npos ? std::string_view{} : u.substr(slash);
  if (auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    p.port = std::string(authority.substr(colon + 1));
    authority = authority.substr(0, colon);
  }
  p.host = text::lower(authority);
  while (!p.host.empty() && p.host.back() == '.') p.host.pop_back();
  if ((p.scheme == "http" && p.port == "80") || (p.scheme == "https" && p.port == "443"))
    p.port.clear();
  p.path = rest.empty() ? "/" : (rest.front() == '?' ? "/" + std::string(rest) : std::string(rest));
  return p;
}

/// Lowercases scheme and host, drops default ports and fragments, and gives
/// an empty path as "/".
inline std::string normalize(std::string_view u) {
  auto p = split(u);
  if (p.host.empty()) return p.path;
  std::string out;
  if (!p.scheme.empty()) out = p.scheme + "://";
  out += p.host;
  if (!p.port.empty()) out += ":" + p.port;
  out += p.path;
  return out;
}

inline std::string host(std::string_view u) { return split(u).host; }

/// Heuristic registrable domain: last two labels, or last three when the
/// second-level label is a generic one under a two-letter country code
/// (e.g. educ.ar -> portal.educ.ar).
inline std::string registrable_domain(std::string_view host_name) {
  static const std::set<std::string, std::less<>> second_level{
      "ac", "co", "com", "edu", "educ", "gob", "gov", "mil", "net", "org", "int", "nom"};
  std::string h = text::lower(host_name);
  if (h.rfind("www.", 0) == 0) h.erase(0, 4);
  std::vector<std::string_view> labels;
  std::string_view rest = h;
  while (!rest.empty()) {
    auto dot = rest.find('.');
    labels.push_back(rest.substr(0, dot));
    if (dot == std::string_view::npos) break;
    rest.remove_prefix(dot + 1);
  }
  std::size_t keep = 2;
  if (labels.size() >= 3 && labels.back().size() == 2 &&
      second_level.count(labels[labels.size() - 2]))
    keep = 3;
  if (labels.size() <= keep) return h;
  std::string out;
  for (std::size_t i = labels.size() - keep; i < labels.size(); ++i) {
    if (!out.empty()) out += '.';
    out += labels[i];
  }
  return out;
}

}  // namespace edumetrics::url
