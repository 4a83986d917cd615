#include <cmath>
#include <random>

#include "doctest.h"
#include "fairrec/allocation.hpp"
#include "fairrec/baselines.hpp"
#include "fairrec/metrics.hpp"
#include "oracles.hpp"

using namespace fairrec;
using doctest::Approx;

namespace {

Instance make(const oracle::Matrix& v, std::size_t k) {
  return validate_instance(oracle::to_matrix(v), k);
}

}  // namespace

TEST_CASE("customer_utility") {
  const auto rel = oracle::to_matrix({{4, 3, 2, 1}, {0, 0, 0, 0}});
  CHECK(customer_utility(rel, 0, {0, 1}, 2) == 1.0);
  CHECK(customer_utility(rel, 0, {1, 0}, 2) == 1.0);
  CHECK(customer_utility(rel, 0, {2, 3}, 2) == Approx(3.0 / 7.0).epsilon(1e-15));
  CHECK(customer_utility(rel, 1, {2, 3}, 2) == 1.0);
  CHECK_THROWS_AS(customer_utility(rel, 0, {2}, 2), BadBundleSize);
  CHECK_THROWS_AS(customer_utility(rel, 0, {2, 7}, 2), IdOutOfRange);
}

TEST_CASE("mms_threshold") {
  CHECK(mms_threshold(1892, 17632, 20, 1.0) == 2);
  CHECK(mms_threshold(1892, 17632, 20, 0.0) == 0);
  const std::uint64_t expected = oracle::share_floor(1, 1, 11172, 855, 20);
  CHECK(expected == 261);
  CHECK(mms_threshold(11172, 855, 20, 1.0) == expected);
  for (std::size_t k = 1; k <= 9; ++k) CHECK(mms_threshold(1892, 17632, k, 1.0) == 0);
  for (std::size_t k = 10; k <= 18; ++k) CHECK(mms_threshold(1892, 17632, k, 1.0) == 1);
  for (std::size_t k = 19; k <= 27; ++k) CHECK(mms_threshold(1892, 17632, k, 1.0) == 2);
  // 1892 * 28 = 52976 >= 3 * 17632 = 52896
  for (std::size_t k = 28; k <= 35; ++k) CHECK(mms_threshold(1892, 17632, k, 1.0) == 3);
  for (std::size_t k = 1; k <= 40; ++k) {
    CHECK(mms_threshold(1892, 17632, k, 1.0) == oracle::share_floor(1, 1, 1892, 17632, k));
  }
}

TEST_CASE("metric_h") {
  CHECK(metric_h({2, 1, 0}, {1, 1, 1}) == Approx(2.0 / 3.0));
  CHECK(metric_h({0, 0, 0}, {0, 0, 0}) == 1.0);
  CHECK(metric_h({3, 1}, {3, 2}) == 0.5);
  CHECK_THROWS_AS(metric_h({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("metric_z") {
  // m=4, k=3, n=6: uniform exposure of 2 each.
  CHECK(metric_z({2, 2, 2, 2, 2, 2}, 4, 6, 3) == Approx(1.0).epsilon(1e-12));
  CHECK(metric_z({12, 0, 0, 0, 0, 0}, 4, 6, 3) == 0.0);
  const double expected = -(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25));
  CHECK(metric_z({3, 1}, 2, 2, 2) == Approx(expected).epsilon(1e-12));
  CHECK(expected == Approx(0.8113).epsilon(1e-4));
  CHECK_THROWS_AS(metric_z({4}, 2, 1, 2), DegenerateBase);
}

TEST_CASE("metric_l") {
  CHECK(metric_l({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(metric_l({5, 5, 5}, {1, 2, 3}) == 0.0);
  CHECK(metric_l({2, 5, 2}, {4, 0, 2}) == Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("metric_y") {
  CHECK(metric_y(oracle::to_matrix({{4, 1}, {4, 1}}), Allocation({{1}, {0}}), 1) ==
        Approx(0.375).epsilon(1e-15));
  CHECK(metric_y(oracle::to_matrix({{3, 3, 1}, {3, 3, 1}}), Allocation({{0}, {1}}), 1) == 0.0);

  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Instance inst = make(oracle::random_matrix(rng, 5, 8, trial % 2 == 1), 3);
    CHECK(metric_y(inst.relevance(), top_k(inst), 3) == 0.0);
  }
  CHECK_THROWS_AS(metric_y(oracle::to_matrix({{4, 1}, {4, 1}}), Allocation({{1}, {}}), 1),
                  BadBundleSize);
}

TEST_CASE("utility_stats") {
  std::mt19937_64 rng(2);
  const Instance inst = make(oracle::random_matrix(rng, 5, 8, false), 3);
  const UtilityStats top = utility_stats(inst.relevance(), top_k(inst), 3);
  CHECK(top.mean == 1.0);
  CHECK(top.stddev == 0.0);

  const auto two = oracle::to_matrix({{1, 0}, {1, 0}});
  const UtilityStats s = utility_stats(two, Allocation({{0}, {1}}), 1);
  CHECK(s.mean == 0.5);
  CHECK(s.stddev == 0.5);

  // Welford moments against the two-pass result.
  const Allocation a = random_k(inst, Seed{7});
  double mean = 0.0, m2 = 0.0;
  for (unsigned u = 0; u < 5; ++u) {
    const double phi = customer_utility(inst.relevance(), u, a.bundles[u], 3);
    const double delta = phi - mean;
    mean += delta / (u + 1);
    m2 += delta * (phi - mean);
  }
  const UtilityStats got = utility_stats(inst.relevance(), a, 3);
  CHECK(got.mean == Approx(mean).epsilon(1e-12));
  CHECK(got.stddev == Approx(std::sqrt(m2 / 5)).epsilon(1e-12));
}

TEST_CASE("is_ef1") {
  std::mt19937_64 rng(3);
  const Instance inst = make(oracle::random_matrix(rng, 4, 6, false), 2);
  CHECK(is_ef1(inst.relevance(), top_k(inst)));
  CHECK(is_ef1(oracle::to_matrix({{10, 1}, {10, 1}}), Allocation({{0}, {1}})));
  CHECK_FALSE(is_ef1(oracle::to_matrix({{5, 5, 1, 1}, {5, 5, 1, 1}}), Allocation({{0, 1}, {2, 3}})));

  for (int trial = 0; trial < 200; ++trial) {
    const auto v = oracle::random_int_matrix(rng, 3, 5, 4);
    Allocation a(3);
    for (auto& b : a.bundles)
      for (ProductId p = 0; p < 5; ++p)
        if (rng() % 2) b.push_back(p);
    CHECK(is_ef1(oracle::to_matrix(v), a) == oracle::ef1(v, oracle::to_sets(a)));
  }
}

TEST_CASE("alpha-MMS bound helpers") {
  CHECK(alpha_mms_fraction({0, 0}, {0, 0}) == 1.0);
  CHECK(alpha_mms_lower_bound(3, 2) == 0.5);
  // 2 of 4 satisfied against 1 - 2/4.
  CHECK(meets_alpha_mms_bound(2, 4, 3, 2));
  CHECK_FALSE(meets_alpha_mms_bound(1, 4, 3, 2));
  CHECK(meets_alpha_mms_bound(0, 5, 3, 4));
  CHECK(count_at_threshold({3, 0, 2}, {2, 2, 2}) == 2);
}

TEST_CASE("fairrec meets the producer bound on random instances") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t m = 2 + rng() % 9;
    const std::size_t n = 3 + rng() % 13;
    const std::size_t k = 1 + rng() % (n - 1);
    if (n > m * k) continue;
    const Instance inst = make(oracle::random_matrix(rng, m, n, trial % 2 == 1), k);
    const Allocation a = fairrec::fairrec(inst, ExposurePolicy::global(1.0), identity_ordering(m));
    const std::size_t t = mms_threshold(m, n, k, 1.0);
    const ExposureVector e = exposures_of(a, n);
    CHECK(meets_alpha_mms_bound(count_at_threshold(e, std::vector<std::size_t>(n, t)), n, m, t));
    if (2 * k <= n) CHECK(2 * count_at_threshold(e, std::vector<std::size_t>(n, t)) >= n);
  }
}

TEST_CASE("lorenz_points") {
  const auto flat = lorenz_points({2, 2, 2, 2});
  for (auto [x, y] : flat) CHECK(y == Approx(x));

  const auto peak = lorenz_points({0, 0, 4});
  REQUIRE(peak.size() == 4);
  CHECK(peak[0] == std::pair<double, double>{0.0, 0.0});
  CHECK(peak[1].first == Approx(1.0 / 3.0));
  CHECK(peak[1].second == 0.0);
  CHECK(peak[2].first == Approx(2.0 / 3.0));
  CHECK(peak[2].second == 0.0);
  CHECK(peak[3] == std::pair<double, double>{1.0, 1.0});

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    ExposureVector e(2 + rng() % 10);
    for (auto& x : e) x = rng() % 7;
    const auto pts = lorenz_points(e);
    CHECK(pts.back().second == Approx(1.0));
    for (std::size_t i = 1; i < pts.size(); ++i) CHECK(pts[i].second >= pts[i - 1].second);
    for (std::size_t i = 2; i < pts.size(); ++i) {
      // Slopes never decrease.
      CHECK(pts[i].second - pts[i - 1].second >= pts[i - 1].second - pts[i - 2].second - 1e-12);
    }
  }
}

TEST_CASE("evaluate") {
  std::mt19937_64 rng(6);
  const Instance inst = make(oracle::random_matrix(rng, 6, 9, false), 3);
  const ExposureVector ref = exposures_of(top_k(inst), 9);
  const MetricsReport top = evaluate(inst, top_k(inst), ExposurePolicy::global(1.0), ref);
  CHECK(top.y == 0.0);
  CHECK(top.mu_phi == 1.0);
  CHECK(top.std_phi == 0.0);
  CHECK(top.l == 0.0);
  CHECK(top.ef1);

  const Allocation fr = fairrec::fairrec(inst, ExposurePolicy::global(1.0), identity_ordering(6));
  const MetricsReport r = evaluate(inst, fr, ExposurePolicy::global(1.0), ref);
  CHECK(r.h == 1.0);
  CHECK(r.alpha_mms_fraction == r.h);
  CHECK(r.mu_phi <= 1.0);

  // alpha = 0.5: one guaranteed copy per product, 9 slots over 6 customers.
  const auto policy = ExposurePolicy::global(0.5);
  const Allocation half = fairrec_phase_one(inst, policy, identity_ordering(6));
  CHECK_THROWS_AS(evaluate(inst, half, policy, ref), BadBundleSize);
  const MetricsReport p = evaluate(inst, half, policy, ref, true);
  CHECK(p.h == 1.0);
  CHECK(p.mu_phi < 1.0);
}
