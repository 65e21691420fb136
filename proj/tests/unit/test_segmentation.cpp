// SPDX-License-Identifier: Apache-2.0
#include <catch_amalgamated.hpp>

#include <random>

#include "edumetrics/segmentation.hpp"

using namespace edumetrics;
using namespace edumetrics::segmentation;
using Catch::Approx;

namespace {

Trend trend(std::vector<double> v) { return demand_trend(std::span<const double>(v)); }

/// Closed-form OLS slope with x = 0..n-1, written out independently.
double ols_slope(const std::vector<double>& y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("demand_trend examples", "[segmentation][trend]") {
  auto flat = trend({10, 10, 10});
  CHECK(flat.slope == 0.0);
  CHECK(flat.relative_slope == 0.0);

  auto line = trend({10, 20, 30});
  CHECK(line.slope == Approx(10.0).margin(1e-12));
  CHECK(line.relative_slope.value() == Approx(0.5).margin(1e-12));

  // by hand: xbar 2, ybar 8.4, sxy = (-2)(-3.4)+(-1)(0.6)+0+(1)(3.6)+(2)(1.6) = 13, sxx = 10
  auto noisy = trend({5, 9, 6, 12, 10});
  CHECK(noisy.slope == Approx(1.3).margin(1e-12));
  CHECK(noisy.relative_slope.value() == Approx(1.3 / 8.4).margin(1e-12));
  CHECK(noisy.slope == Approx(ols_slope({5, 9, 6, 12, 10})).margin(1e-12));

  auto zero = trend({0, 0, 0});
  CHECK(zero.indeterminate);
  CHECK_FALSE(zero.relative_slope);

  CHECK_THROWS_AS(trend({4}), DomainError);
  std::vector<std::uint64_t> counts{10, 20, 30};
  CHECK(demand_trend(std::span<const std::uint64_t>(counts)).relative_slope.value() == Approx(0.5));
}

TEST_CASE("demand_trend matches closed-form OLS and is scale invariant", "[segmentation][trend][property]") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> y(2 + rng() % 30);
    for (auto& v : y) v = static_cast<double>(rng() % 1000);
    auto t = trend(y);
    REQUIRE(t.slope == Approx(ols_slope(y)).margin(1e-9));
    if (!t.relative_slope) continue;
    const double k = 1 + static_cast<double>(rng() % 50);
    auto scaled = y;
    for (auto& v : scaled) v *= k;
    auto s = trend(scaled);
    REQUIRE(s.relative_slope.value() == Approx(*t.relative_slope).margin(1e-12));
    REQUIRE(dynamics_class(s.relative_slope).value == dynamics_class(t.relative_slope).value);
  }
}

TEST_CASE("dynamics_class examples", "[segmentation][dynamics]") {
  CHECK(dynamics_class(0.0).value == Dynamics::stable);
  CHECK(dynamics_class(0.5, 0.05).value == Dynamics::growing);
  auto down = dynamics_class(-0.2);
  CHECK(down.value == Dynamics::stable);
  CHECK(down.declining);
  CHECK(dynamics_class(0.05).value == Dynamics::stable);
  CHECK(dynamics_class(std::nullopt).value == Dynamics::indeterminate);
  CHECK_THROWS_AS(dynamics_class(0.1, 0.0), ConfigError);
  CHECK(std::string(to_string(Dynamics::growing)) == "Growing");
}

TEST_CASE("relative_size examples", "[segmentation][size]") {
  CHECK(relative_size(std::map<std::string, std::uint64_t>{{"A", 40}}).at("A") == 1.0);

  auto r = relative_size(std::map<std::string, std::uint64_t>{{"A", 250}, {"B", 750}});
  CHECK(r.at("A") == 0.25);
  CHECK(r.at("B") == 0.75);

  std::map<std::string, std::set<std::string>> shared{{"A", {"x", "y"}}, {"B", {"y", "z", "w"}}};
  auto s = relative_size(shared);
  CHECK(s.at("A") == Approx(2.0 / 4.0));
  CHECK(s.at("B") == Approx(3.0 / 4.0));

  CHECK_THROWS_AS(relative_size(std::map<std::string, std::uint64_t>{{"A", 0}}), DomainError);
  CHECK_THROWS_AS(relative_size(std::map<std::string, std::set<std::string>>{{"A", {}}}), DomainError);
}

TEST_CASE("relative_size sums to one for disjoint catalogs", "[segmentation][size][property]") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, std::set<std::string>> disjoint, overlapping;
    const int portals = 1 + static_cast<int>(rng() % 6);
    for (int p = 0; p < portals; ++p) {
      const int items = 1 + static_cast<int>(rng() % 20);
      for (int i = 0; i < items; ++i) {
        disjoint["P" + std::to_string(p)].insert(std::to_string(p) + ":" + std::to_string(i));
        overlapping["P" + std::to_string(p)].insert(std::to_string(rng() % 30));
      }
    }
    double sum = 0.0;
    for (const auto& [p, v] : relative_size(disjoint)) {
      REQUIRE(v > 0.0);
      REQUIRE(v <= 1.0);
      sum += v;
    }
    REQUIRE(sum == Approx(1.0).margin(1e-12));
    double osum = 0.0;
    for (const auto& [p, v] : relative_size(overlapping)) {
      REQUIRE(v > 0.0);
      REQUIRE(v <= 1.0);
      osum += v;
    }
    REQUIRE(osum >= 1.0 - 1e-12);
  }
}

TEST_CASE("size_class examples", "[segmentation][size]") {
  auto two = size_class({{"A", 0.25}, {"B", 0.75}});
  CHECK(two.classes.at("A") == Size::small);
  CHECK(two.classes.at("B") == Size::large);

  auto eq = size_class({{"A", 0.5}, {"B", 0.5}});
  CHECK(eq.classes.at("A") == Size::large);
  CHECK(eq.classes.at("B") == Size::large);

  auto three = size_class({{"A", 0.1}, {"B", 0.2}, {"C", 0.7}});
  CHECK(three.median == 0.2);
  CHECK(three.classes.at("A") == Size::small);
  CHECK(three.classes.at("B") == Size::large);
  CHECK(three.classes.at("C") == Size::large);

  auto one = size_class({{"A", 1.0}});
  CHECK(one.single_portal);
  CHECK(one.classes.at("A") == Size::large);

  CHECK_THROWS_AS(size_class({}), DomainError);
}

TEST_CASE("size_class is invariant under scaling counts", "[segmentation][size][property]") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, std::uint64_t> counts, scaled;
    const std::uint64_t k = 2 + rng() % 40;
    for (int p = 0, n = 1 + static_cast<int>(rng() % 8); p < n; ++p) {
      auto c = 1 + rng() % 500;
      counts["P" + std::to_string(p)] = c;
      scaled["P" + std::to_string(p)] = c * k;
    }
    REQUIRE(size_class(relative_size(counts)).classes == size_class(relative_size(scaled)).classes);
  }
}

TEST_CASE("segment names the four quadrants", "[segmentation][segment]") {
  const DynamicsClass growing{Dynamics::growing, false};
  const DynamicsClass stable{Dynamics::stable, false};
  CHECK(segment(growing, Size::large).quadrant == Quadrant::growing_large);
  CHECK(std::string(quadrant_name(Quadrant::growing_large)) == "Growing portals with large relative size");
  CHECK(std::string(quadrant_name(Quadrant::growing_small)) == "Growing portals with low relative size");
  CHECK(std::string(quadrant_name(Quadrant::stable_large)) == "Stable portals with large relative size");
  CHECK(segment(stable, Size::small).quadrant == Quadrant::stable_small);
  CHECK(std::string(quadrant_name(Quadrant::stable_small)) == "Stable portals with small relative size");

  auto none = segment(DynamicsClass{Dynamics::indeterminate, false}, Size::large);
  CHECK_FALSE(none.segmented());

  std::set<Quadrant> reached;
  for (auto d : {growing, stable, DynamicsClass{Dynamics::stable, true}})
    for (auto s : {Size::large, Size::small}) reached.insert(*segment(d, s).quadrant);
  CHECK(reached.size() == 4);

  for (auto q : reached) CHECK(quadrant_from_code(quadrant_code(q)) == q);
  CHECK_FALSE(quadrant_from_code("e"));
}
