// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "edumetrics/error.hpp"

namespace edumetrics::segmentation {

struct Trend {
  double slope = 0.0;                    ///< visits per bucket
  std::optional<double> relative_slope;  ///< slope / mean; absent for an all-zero series
  double mean = 0.0;
  bool indeterminate = false;
};

/// Least-squares slope of the counts against their bucket index.
inline Trend demand_trend(std::span<const double> counts) {
  const auto n = counts.size();
  if (n < 2) throw DomainError("demand trend needs at least two buckets");
  double sum = 0.0;
  for (double c : counts) {
    if (c < 0.0) throw DomainError("negative visit count in demand series");
    sum += c;
  }
  const double xbar = static_cast<double>(n - 1) / 2.0;
  const double ybar = sum / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - xbar;
    sxy += dx * (counts[i] - ybar);
    sxx += dx * dx;
  }
  Trend t;
  t.slope = sxy / sxx;
  t.mean = ybar;
  if (ybar > 0.0)
    t.relative_slope = t.slope / ybar;
  else
    t.indeterminate = true;
  return t;
}

inline Trend demand_trend(std::span<const std::uint64_t> counts) {
  std::vector<double> d(counts.begin(), counts.end());
  return demand_trend(std::span<const double>(d));
}

enum class Dynamics { growing, stable, indeterminate };

struct DynamicsClass {
  Dynamics value = Dynamics::indeterminate;
  bool declining = false;  ///< stable because the relative slope is negative
};

inline const char* to_string(Dynamics d) {
  switch (d) {
    case Dynamics::growing: return "Growing";
    case Dynamics::stable: return "Stable";
    default: return "Indeterminate";
  }
}

inline constexpr double kDefaultGrowthThreshold = 0.05;

/// Growing iff the relative slope exceeds the threshold.
inline DynamicsClass dynamics_class(std::optional<double> relative_slope,
                                    double threshold = kDefaultGrowthThreshold) {
  if (!(threshold > 0.0)) throw ConfigError("growth threshold must be positive");
  if (!relative_slope) return {Dynamics::indeterminate, false};
  if (*relative_slope > threshold) return {Dynamics::growing, false};
  return {Dynamics::stable, *relative_slope < 0.0};
}

/// Distinct identifiers of each portal over the distinct identifiers of the
/// whole network. An identifier shared by several portals counts once in the
/// denominator and once in each sharing portal's numerator.
inline std::map<std::string, double> relative_size(
    const std::map<std::string, std::set<std::string>>& identifiers) {
  std::set<std::string> all;
  for (const auto& [portal, ids] : identifiers) all.insert(ids.begin(), ids.end());
  if (all.empty()) throw DomainError("network content total is zero");
  std::map<std::string, double> out;
  for (const auto& [portal, ids] : identifiers)
    out[portal] = static_cast<double>(ids.size()) / static_cast<double>(all.size());
  return out;
}

/// Count-based variant for portals known to have disjoint identifiers.
inline std::map<std::string, double> relative_size(const std::map<std::string, std::uint64_t>& counts) {
  std::uint64_t total = 0;
  for (const auto& [portal, c] : counts) total += c;
  if (total == 0) throw DomainError("network content total is zero");
  std::map<std::string, double> out;
  for (const auto& [portal, c] : counts)
    out[portal] = static_cast<double>(c) / static_cast<double>(total);
  return out;
}

enum class Size { large, small };

inline const char* to_string(Size s) { return s == Size::large ? "Large" : "Small"; }

struct SizeClassification {
  std::map<std::string, Size> classes;
  double median = 0.0;
  bool single_portal = false;
};

/// Large iff the ratio is at least the network median (ties go to Large).
inline SizeClassification size_class(const std::map<std::string, double>& ratios) {
  if (ratios.empty()) throw DomainError("size classification needs at least one portal");
  SizeClassification out;
  std::vector<double> v;
  for (const auto& [p, r] : ratios) v.push_back(r);
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  out.median = n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
  out.single_portal = n == 1;
  for (const auto& [p, r] : ratios) out.classes[p] = r >= out.median ? Size::large : Size::small;
  return out;
}

enum class Quadrant { growing_large, growing_small, stable_large, stable_small };

inline const char* quadrant_name(Quadrant q) {
  switch (q) {
    case Quadrant::growing_large: return "Growing portals with large relative size";
    case Quadrant::growing_small: return "Growing portals with low relative size";
    case Quadrant::stable_large: return "Stable portals with large relative size";
    default: return "Stable portals with small relative size";
  }
}

inline const char* quadrant_code(Quadrant q) {
  switch (q) {
    case Quadrant::growing_large: return "a";
    case Quadrant::growing_small: return "b";
    case Quadrant::stable_large: return "c";
    default: return "d";
  }
}

inline std::optional<Quadrant> quadrant_from_code(const std::string& code) {
  for (auto q : {Quadrant::growing_large, Quadrant::growing_small, Quadrant::stable_large,
                 Quadrant::stable_small})
    if (code == quadrant_code(q)) return q;
  return std::nullopt;
}

struct SegmentLabel {
  Dynamics dynamics = Dynamics::indeterminate;
  bool declining = false;
  Size size = Size::small;
  std::optional<Quadrant> quadrant;  ///< absent when unsegmented

  bool segmented() const { return quadrant.has_value(); }
};

inline SegmentLabel segment(const DynamicsClass& dynamics, Size size) {
  SegmentLabel s;
  s.dynamics = dynamics.value;
  s.declining = dynamics.declining;
  s.size = size;
  if (dynamics.value == Dynamics::growing)
    s.quadrant = size == Size::large ? Quadrant::growing_large : Quadrant::growing_small;
  else if (dynamics.value == Dynamics::stable)
    s.quadrant = size == Size::large ? Quadrant::stable_large : Quadrant::stable_small;
  return s;
}

}  // namespace edumetrics::segmentation
