#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "snm/model.hpp"

using namespace snm;

TEST_CASE("mu_min") {
  CHECK(mu_min(16, 1, 0.0) == 0.0);
  CHECK(mu_min(16, 1, 0.5) == doctest::Approx(1.6456154475156734).epsilon(1e-14));
  CHECK(mu_min(1 << 15, 1, 1.0) == doctest::Approx(4.560082716432978).epsilon(1e-14));
  CHECK_THROWS_AS(mu_min(2, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mu_min(3, 3, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(mu_min(16, 1, -0.1), std::invalid_argument);
}

TEST_CASE("make_problem with a fixed support") {
  const auto p = make_problem(8, 1, 0.5, MinimalProfile{}, std::vector<Index>{2});
  REQUIRE(p.d() == 8);
  REQUIRE(p.support() == std::vector<Index>{2});
  for (Index j = 0; j < 8; ++j) {
    CHECK(p.mu()[static_cast<std::size_t>(j)] == (j == 2 ? std::sqrt(std::log(7.0)) : 0.0));
  }
  CHECK_THROWS_AS(make_problem(8, 2, 0.5, MinimalProfile{}, std::vector<Index>{1, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(8, 1, 0.5, MinimalProfile{}, std::vector<Index>{8}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(8, 1, 0.5, MinimalProfile{}, std::vector<Index>{-1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(8, 4, 0.5, MinimalProfile{}, std::vector<Index>{0, 1, 2, 3}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_problem(8, 1, 0.0, MinimalProfile{}, std::vector<Index>{0}),
                  std::invalid_argument);
}

TEST_CASE("degenerate uniform profile equals the minimal one") {
  const double floor_value = mu_min(8, 1, 0.5);
  const auto a = make_problem(8, 1, 0.5, UniformProfile{floor_value}, std::vector<Index>{3});
  const auto b = make_problem(8, 1, 0.5, MinimalProfile{}, std::vector<Index>{3});
  CHECK(std::vector<double>(a.mu().begin(), a.mu().end()) ==
        std::vector<double>(b.mu().begin(), b.mu().end()));
  CHECK_THROWS_AS(make_problem(8, 1, 0.5, UniformProfile{floor_value - 0.01}, std::vector<Index>{3}),
                  std::invalid_argument);
}

TEST_CASE("seeded placement") {
  const auto p = make_problem(1 << 15, 5, 0.4, MinimalProfile{}, SeedSpec{11, 0, 0});
  REQUIRE(p.support().size() == 5);
  CHECK(std::set<Index>(p.support().begin(), p.support().end()).size() == 5);
  const double v = p.mu()[static_cast<std::size_t>(p.support()[0])];
  for (Index j : p.support()) CHECK(p.mu()[static_cast<std::size_t>(j)] == v);
  CHECK(v == mu_min(1 << 15, 5, 0.4));

  const auto again = make_problem(1 << 15, 5, 0.4, MinimalProfile{}, SeedSpec{11, 0, 0});
  CHECK(again.support() == p.support());
}

TEST_CASE("seeded placement is uniform over indices") {
  // d=10, K=2: each index is in the support with probability 1/5.
  std::vector<int> hits(10, 0);
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const auto p = make_problem(10, 2, 0.5, MinimalProfile{}, SeedSpec{5, static_cast<std::uint32_t>(t), 0});
    for (Index j : p.support()) ++hits[static_cast<std::size_t>(j)];
  }
  const double sd = std::sqrt(n * 0.2 * 0.8);
  for (int h : hits) CHECK(std::abs(h - 0.2 * n) < 5 * sd);
}

TEST_CASE("uniform profile draws inside the interval") {
  const double lo = mu_min(64, 3, 0.5);
  const auto p = make_problem(64, 3, 0.5, UniformProfile{lo + 1.0}, SeedSpec{3, 1, 0});
  for (Index j : p.support()) {
    const double v = p.mu()[static_cast<std::size_t>(j)];
    CHECK(v >= lo);
    CHECK(v <= lo + 1.0);
  }
  CHECK(to_string(parse_mu_profile("uniform:2.5")) == "uniform:2.5");
  CHECK(std::holds_alternative<MinimalProfile>(parse_mu_profile("minimal")));
  CHECK_THROWS_AS(parse_mu_profile("uniform:x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_mu_profile("gaussian"), std::invalid_argument);
}

TEST_CASE("observations") {
  const auto p = make_problem(512, 2, 0.5, MinimalProfile{}, std::vector<Index>{10, 20});
  const auto s1 = sample_machine(p, SeedSpec{9, 4, 1});
  const auto s2 = sample_machine(p, SeedSpec{9, 4, 1});
  const auto s3 = sample_machine(p, SeedSpec{9, 4, 2});
  CHECK(s1.machine_id == 1);
  CHECK(s1.values.size() == 512);
  CHECK(s1.values == s2.values);
  CHECK(s1.values != s3.values);

  std::vector<double> exact(512);
  fill_observation(p, SeedSpec{9, 4, 1}, exact, true);
  CHECK(exact == std::vector<double>(p.mu().begin(), p.mu().end()));
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(fill_observation(p, SeedSpec{}, wrong), std::invalid_argument);
}

TEST_CASE("noise is standard normal") {
  const auto p = SparseProblem::from_mean(std::vector<double>(1000, 0.0), 0.0);
  double sum = 0.0;
  double sq = 0.0;
  long above = 0;
  const int machines = 200;
  for (int i = 1; i <= machines; ++i) {
    const auto s = sample_machine(p, SeedSpec{1, 0, static_cast<std::uint32_t>(i)});
    for (double x : s.values) {
      sum += x;
      sq += x * x;
      above += x > 1.0;
    }
  }
  const double n = 1000.0 * machines;
  CHECK(std::abs(sum / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(sq / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  // Q(1) = 0.15865525393145705
  const double q1 = 0.15865525393145705;
  CHECK(std::abs(above / n - q1) < 5.0 * std::sqrt(q1 * (1 - q1) / n));
}
