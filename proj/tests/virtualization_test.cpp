#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "m2m/errors.hpp"
#include "m2m/virtualization.hpp"
#include "oracles.hpp"

using namespace m2m;

namespace {

std::vector<VirtualNetwork> split(int access, int data, std::vector<double> w, std::vector<int> n,
                                  std::uint64_t seed = 1) {
  PhysicalCell cell;
  cell.access_rbs = access;
  cell.data_rbs = data;
  std::vector<double> bw(w.size(), 1.0);
  Rng rng(seed);
  return slice_network(cell, w, n, bw, rng);
}

}  // namespace

TEST_CASE("slice_network: homogeneous and heterogeneous device splits") {
  const std::vector<double> w = {12, 1, 1, 1, 1};
  const auto hom = split(25, 0, w, {10, 10, 10, 10, 10});
  int id = 0;
  for (const auto& s : hom) {
    CHECK(s.devices.size() == 10);
    CHECK(s.access_rbs.size() == 5);
    for (const auto& d : s.devices) {
      CHECK(d.id == id++);
      CHECK(d.slice_id == s.slice_id);
    }
  }
  const auto het = split(25, 0, w, {30, 5, 5, 5, 5});
  CHECK(het[0].devices.size() == 30);
  CHECK(het[4].devices.size() == 5);
}

TEST_CASE("slice_network: remainder RBs go to the lowest slices and nothing is lost") {
  const auto s = split(7, 5, {3, 2, 1}, {1, 2, 3});
  CHECK(s[0].access_rbs == std::vector<int>{0, 1, 2});
  CHECK(s[1].access_rbs == std::vector<int>{3, 4});
  CHECK(s[2].access_rbs == std::vector<int>{5, 6});
  CHECK(s[0].data_rb_share == 2);
  CHECK(s[2].data_rb_share == 1);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    const int l = 1 + static_cast<int>(rng() % 6);
    const int r = l + static_cast<int>(rng() % 20);
    std::vector<double> w(static_cast<std::size_t>(l));
    std::vector<int> n(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
      w[i] = 10.0 - i;
      n[i] = 1 + static_cast<int>(rng() % 7);
    }
    const auto out = split(r, 0, w, n, t);
    int rbs = 0;
    std::size_t devs = 0;
    for (const auto& v : out) {
      rbs += static_cast<int>(v.access_rbs.size());
      devs += v.devices.size();
      CHECK(v.access_rbs.size() >= 1);
    }
    CHECK(rbs == r);
    CHECK(devs == static_cast<std::size_t>(std::accumulate(n.begin(), n.end(), 0)));
  }
}

TEST_CASE("slice_network: device placement") {
  const auto s = split(5, 0, {1}, {500});
  for (const auto& d : s[0].devices) {
    CHECK(d.distance_m >= 1.0);
    CHECK(d.distance_m <= 1000.0);
    CHECK(d.channel_gain == doctest::Approx(std::pow(10.0, -(8 + 37.6 * std::log10(d.distance_m)) / 10)));
  }
}

TEST_CASE("slice_network: infeasible partitions") {
  CHECK_THROWS_AS(split(3, 0, {1, 1, 1, 1}, {1, 1, 1, 1}), DomainError);
  CHECK_THROWS_AS(split(5, 0, {1, 1}, {1, 0}), DomainError);
  CHECK_THROWS_AS(split(5, 0, {1, 2}, {1, 1}), DomainError);
  CHECK_THROWS_AS(split(5, 0, {1, 1}, {1}), DomainError);
  CHECK_THROWS_AS(split(5, 0, {}, {}), DomainError);
}

TEST_CASE("period obtained rate") {
  CHECK(period_obtained_rate(Eigen::MatrixXd::Constant(1, 7, 2.5)) == 2.5);
  CHECK(period_obtained_rate(Eigen::MatrixXd::Zero(3, 4)) == 0.0);
  Eigen::MatrixXd two(2, 3);
  two << 1, 0, 2, 0.5, 1.5, 1;  // sums to 6
  CHECK(period_obtained_rate(two) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(period_obtained_rate(3.0 * two) == doctest::Approx(3.0));
  CHECK_THROWS_AS(period_obtained_rate(Eigen::MatrixXd(0, 0)), DomainError);
}

TEST_CASE("compute_ratios examples") {
  auto m = compute_ratios(std::vector<double>{3, 1}, std::vector<double>{3, 1});
  CHECK(m[0].obtained_ratio == 0.75);
  CHECK(m[1].desired_ratio == 0.25);
  CHECK(m[0].gap == 0.0);
  m = compute_ratios(std::vector<double>{1, 1}, std::vector<double>{3, 1});
  CHECK(m[0].gap == doctest::Approx(0.25));
  CHECK(m[1].gap == doctest::Approx(-0.25));
  // Top and bottom slices weighted 12:1:1:1:1 share the 75 % target of the 3:1 pair.
  m = compute_ratios(std::vector<double>{1, 1, 1, 1, 1}, std::vector<double>{12, 1, 1, 1, 1});
  CHECK(m[0].desired_ratio == 0.75);
  CHECK_THROWS_AS(compute_ratios(std::vector<double>{0, 0}, std::vector<double>{1, 1}), AllRatesZero);
  CHECK_THROWS_AS(compute_ratios(std::vector<double>{1, 0}, std::vector<double>{1, 0}), DomainError);
  CHECK_THROWS_AS(compute_ratios(std::vector<double>{1}, std::vector<double>{1, 1}), DomainError);
}

TEST_CASE("compute_ratios sums and ordering on random inputs") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 500; ++t) {
    const int l = 1 + static_cast<int>(rng() % 8);
    std::vector<double> c(static_cast<std::size_t>(l));
    std::vector<double> x(static_cast<std::size_t>(l));
    for (int i = 0; i < l; ++i) {
      c[i] = 5 * oracle::uniform(rng);
      x[i] = 0.01 + oracle::uniform(rng);
    }
    const auto m = compute_ratios(c, x);
    double sx = 0, sd = 0, se = 0;
    for (int i = 0; i < l; ++i) {
      sx += m[i].obtained_ratio;
      sd += m[i].desired_ratio;
      se += m[i].gap;
      CHECK(m[i].gap == doctest::Approx(m[i].desired_ratio - m[i].obtained_ratio));
      for (int j = 0; j < l; ++j)
        if (x[i] >= x[j]) CHECK(m[i].desired_ratio >= m[j].desired_ratio);
    }
    CHECK(std::abs(sx - 1) < 1e-12);
    CHECK(std::abs(sd - 1) < 1e-12);
    CHECK(std::abs(se) < 1e-12);
  }
}

TEST_CASE("ratio bound") {
  const std::vector<double> targets = {0.75, 0.0625, 0.0625, 0.0625, 0.0625};
  const auto rep = ratio_bound_check(25, 5, 0.2, targets);
  CHECK(rep.xi_max == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(rep.flagged == std::vector<int>{0});
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("0.75") != std::string::npos);
  CHECK(ratio_bound_check(25, 1, 0.3, {}).xi_max == doctest::Approx(0.3));
  CHECK_THROWS_AS(ratio_bound_check(5, 5, 0.2, {}), DomainError);
  CHECK_THROWS_AS(ratio_bound_check(25, 5, 0.0, {}), DomainError);
}
