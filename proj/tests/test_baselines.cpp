#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "fairrec/baselines.hpp"
#include "oracles.hpp"

using namespace fairrec;

namespace {

Instance make(const oracle::Matrix& v, std::size_t k) {
  return validate_instance(oracle::to_matrix(v), k);
}

void check_shape(const Allocation& a, std::size_t m, std::size_t k) {
  REQUIRE(a.customers() == m);
  for (const auto& b : a.bundles) CHECK(b.size() == k);
  CHECK(bundles_distinct(a));
}

// Straight transcription: score every product, sort all of them, take k.
oracle::Sets mpb19_reference(const oracle::Matrix& v, std::size_t k) {
  const std::size_t n = v.front().size();
  std::vector<double> exposure(n, 0.0);
  oracle::Sets out;
  for (const auto& row : v) {
    double total = 0.0;
    for (double e : exposure) total += e;
    std::vector<std::pair<double, unsigned>> ranked;
    for (unsigned p = 0; p < n; ++p) {
      const double benefit = total > 0 ? 1.0 - exposure[p] / total : 1.0;
      ranked.emplace_back(-(0.5 * row[p] + 0.5 * benefit), p);
    }
    std::sort(ranked.begin(), ranked.end());
    std::set<unsigned> bundle;
    for (std::size_t i = 0; i < k; ++i) bundle.insert(ranked[i].second);
    for (unsigned p : bundle) exposure[p] += 1.0;
    out.push_back(bundle);
  }
  return out;
}

}  // namespace

TEST_CASE("top_k") {
  CHECK(top_k(make({{3, 2, 1}, {1, 2, 3}}, 2)) == Allocation({{0, 1}, {2, 1}}));
  CHECK(canonical(top_k(make({{1, 1, 1}, {1, 1, 1}}, 2))) == Allocation({{0, 1}, {0, 1}}));

  std::mt19937_64 rng(4);
  const auto v = oracle::random_matrix(rng, 3, 5, false);
  const Allocation a = top_k(make(v, 2));
  for (unsigned u = 0; u < 3; ++u) {
    std::vector<unsigned> idx{0, 1, 2, 3, 4};
    std::stable_sort(idx.begin(), idx.end(), [&](unsigned x, unsigned y) { return v[u][x] > v[u][y]; });
    CHECK(a.bundles[u] == Bundle{idx[0], idx[1]});
  }
}

TEST_CASE("random_k is seeded and well formed") {
  std::mt19937_64 rng(1);
  const Instance inst = make(oracle::random_matrix(rng, 6, 9, false), 4);
  check_shape(random_k(inst, Seed{3}), 6, 4);
  CHECK(random_k(inst, Seed{3}) == random_k(inst, Seed{3}));
  CHECK(random_k(inst, Seed{3}) != random_k(inst, Seed{4}));
}

TEST_CASE("random_k draws uniformly") {
  // Customer 0's bundle over 10,000 seeds: each product should appear with
  // probability k/n, each unordered pair with probability 1/C(n,2).
  const Instance inst = make(oracle::Matrix(3, std::vector<double>(5, 1.0)), 2);
  const int draws = 10000;
  std::vector<int> single(5, 0);
  std::map<std::pair<ProductId, ProductId>, int> pairs;
  for (int s = 0; s < draws; ++s) {
    Bundle b = random_k(inst, Seed{static_cast<std::uint64_t>(s)}).bundles[0];
    std::sort(b.begin(), b.end());
    for (ProductId p : b) ++single[p];
    ++pairs[{b[0], b[1]}];
  }
  const double p = 2.0 / 5.0;
  const double mean = draws * p;
  const double sigma = std::sqrt(draws * p * (1 - p));
  for (int c : single) CHECK(std::abs(c - mean) < 5 * sigma);

  REQUIRE(pairs.size() == 10);
  double chi2 = 0.0;
  for (const auto& [key, c] : pairs) {
    const double expected = draws / 10.0;
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < 40.0);  // 9 degrees of freedom; p-value far below 1e-4
}

TEST_CASE("poorest_k") {
  CHECK(poorest_k(make({{9, 7, 5, 3}, {9, 7, 5, 3}}, 2)) == Allocation({{0, 1}, {2, 3}}));

  // n = m*k exposes every product exactly once.
  std::mt19937_64 rng(2);
  const Instance inst = make(oracle::random_matrix(rng, 4, 12, false), 3);
  const Allocation a = poorest_k(inst);
  check_shape(a, 4, 3);
  CHECK(exposures_of(a, 12) == ExposureVector(12, 1));
}

TEST_CASE("mixed_tr_k") {
  std::mt19937_64 rng(6);
  const auto v = oracle::random_matrix(rng, 7, 7, false);
  const Instance k1 = make(v, 1);
  CHECK(mixed_tr_k(k1, Seed{9}) == top_k(k1));

  const Instance inst = make({{9, 1, 1}, {1, 9, 1}}, 2);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Allocation a = mixed_tr_k(inst, Seed{s});
    check_shape(a, 2, 2);
    CHECK(a.bundles[0][0] == 0);
    CHECK(a.bundles[1][0] == 1);
  }
  const Instance k5 = make(v, 5);
  const Allocation a = mixed_tr_k(k5, Seed{1});
  check_shape(a, 7, 5);
  const Allocation best = top_k(k5);
  for (std::size_t u = 0; u < 7; ++u) {
    CHECK(Bundle(a.bundles[u].begin(), a.bundles[u].begin() + 3) ==
          Bundle(best.bundles[u].begin(), best.bundles[u].begin() + 3));
  }
  CHECK(mixed_tr_k(k5, Seed{1}) == a);
}

TEST_CASE("mixed_tp_k") {
  std::mt19937_64 rng(7);
  const Instance k1 = make(oracle::random_matrix(rng, 6, 6, false), 1);
  CHECK(mixed_tp_k(k1) == top_k(k1));

  // u0: top p0, then the least exposed of {1,2,3} is p1 (all zero).
  // u1: top p0, then p2 since p1 now has exposure 1.
  const Allocation a = mixed_tp_k(make({{9, 8, 1, 1}, {9, 8, 1, 1}}, 2));
  CHECK(a == Allocation({{0, 1}, {0, 2}}));
}

TEST_CASE("mpb19") {
  const auto v = oracle::Matrix{{0.2, 0.9, 0.4, 0.7}, {0.3, 0.8, 0.5, 0.6}};
  const Allocation a = mpb19(make(v, 2));
  CHECK(a.bundles[0] == top_k(make(v, 2)).bundles[0]);

  std::mt19937_64 rng(8);
  const auto row = oracle::random_matrix(rng, 1, 5, false);
  const Instance single = make({row[0], row[0]}, 3);
  CHECK(mpb19(single).bundles[0] == top_k(single).bundles[0]);

  for (int trial = 0; trial < 50; ++trial) {
    const auto w = oracle::random_matrix(rng, 4, 6, trial % 2 == 1);
    const Allocation got = mpb19(make(w, 2));
    check_shape(got, 4, 2);
    CHECK(oracle::to_sets(got) == mpb19_reference(w, 2));
  }
}

TEST_CASE("baselines produce exact-k distinct bundles") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 2 + rng() % 8;
    const std::size_t n = 3 + rng() % 12;
    const std::size_t k = 1 + rng() % (n - 1);
    if (n > m * k) continue;
    const Instance inst = make(oracle::random_matrix(rng, m, n, trial % 2 == 1), k);
    const Seed seed{static_cast<std::uint64_t>(trial)};
    for (const Allocation& a : {top_k(inst), random_k(inst, seed), poorest_k(inst),
                                mixed_tr_k(inst, seed), mixed_tp_k(inst), mpb19(inst)}) {
      check_shape(a, m, k);
    }
  }
}
