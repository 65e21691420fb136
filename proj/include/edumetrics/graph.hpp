// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace edumetrics {

/// Simple directed graph over string-named nodes. Parallel edges are
/// collapsed on insertion; self-loops are rejected.
class Digraph {
public:
  using Index = std::uint32_t;

  Digraph() = default;

  /// Anonymous graph with nodes named "0".."n-1".
  explicit Digraph(std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) add_node(std::to_string(i));
  }

  Index add_node(std::string_view name) {
    auto key = std::string(name);
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    auto id = static_cast<Index>(names_.size());
    names_.push_back(key);
    index_.emplace(std::move(key), id);
    out_.emplace_back();
    in_.emplace_back();
    return id;
  }

  /// Returns false when the edge is a self-loop or already present.
  bool add_edge(Index from, Index to) {
    if (from == to) return false;
    if (!edges_.insert(key(from, to)).second) return false;
    out_[from].push_back(to);
    in_[to].push_back(from);
    return true;
  }

  bool add_edge(std::string_view from, std::string_view to) {
    auto f = add_node(from);
    auto t = add_node(to);
    return add_edge(f, t);
  }

  bool has_edge(Index from, Index to) const { return edges_.count(key(from, to)) != 0; }

  std::optional<Index> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::string& name(Index i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<Index>& out(Index i) const { return out_[i]; }
  const std::vector<Index>& in(Index i) const { return in_[i]; }

  std::vector<std::pair<Index, Index>> edges() const {
    std::vector<std::pair<Index, Index>> e;
    e.reserve(edges_.size());
    for (Index u = 0; u < out_.size(); ++u)
      for (Index v : out_[u]) e.emplace_back(u, v);
    return e;
  }

private:
  static std::uint64_t key(Index a, Index b) { return (std::uint64_t{a} << 32) | b; }

  std::vector<std::string> names_;
  std::unordered_map<std::string, Index> index_;
  std::vector<std::vector<Index>> out_;
  std::vector<std::vector<Index>> in_;
  std::unordered_set<std::uint64_t> edges_;
};

inline constexpr std::int64_t kUnreachable = -1;

/// Breadth-first hop distances from `source`; kUnreachable where no path.
/// `dist` and `queue` are caller-owned scratch buffers.
inline void bfs_distances(const Digraph& g, Digraph::Index source, std::vector<std::int64_t>& dist,
                          std::vector<Digraph::Index>& queue) {
  dist.assign(g.size(), kUnreachable);
  queue.clear();
  queue.push_back(source);
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    auto u = queue[head];
    for (auto v : g.out(u)) {
      if (dist[v] == kUnreachable) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
}

}  // namespace edumetrics
