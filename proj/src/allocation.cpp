#include "fairrec/allocation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace fairrec {

FeasibleSets FeasibleSets::full(std::size_t customers, std::size_t products) {
  FeasibleSets f;
  f.m_ = customers;
  f.n_ = products;
  f.mask_.assign(customers * products, 1);
  return f;
}

void FeasibleSets::reset_to_complement(CustomerId u, const Bundle& held) {
  auto first = mask_.begin() + static_cast<std::ptrdiff_t>(u) * static_cast<std::ptrdiff_t>(n_);
  std::fill(first, first + static_cast<std::ptrdiff_t>(n_), 1);
  for (ProductId p : held) remove(u, p);
}

std::vector<ProductId> FeasibleSets::members(CustomerId u) const {
  std::vector<ProductId> out;
  for (std::size_t p = 0; p < n_; ++p) {
    if (contains(u, static_cast<ProductId>(p))) out.push_back(static_cast<ProductId>(p));
  }
  return out;
}

Ordering identity_ordering(std::size_t customers) {
  Ordering o(customers);
  std::iota(o.begin(), o.end(), CustomerId{0});
  return o;
}

bool is_permutation_of_customers(const Ordering& order, std::size_t customers) {
  if (order.size() != customers) return false;
  std::vector<bool> seen(customers, false);
  for (CustomerId u : order) {
    if (u >= customers || seen[u]) return false;
    seen[u] = true;
  }
  return true;
}

std::vector<std::size_t> copies_per_product(std::size_t m, std::size_t n, std::size_t k,
                                            const ExposurePolicy& policy) {
  if (!policy.is_global() && policy.size() != n) {
    throw std::invalid_argument("per-producer policy has " + std::to_string(policy.size()) +
                                " entries for " + std::to_string(n) + " products");
  }
  std::vector<std::size_t> copies(n);
  if (policy.is_global()) {
    std::fill(copies.begin(), copies.end(), alpha_share_floor(policy.global_alpha(), m, n, k));
  } else {
    for (std::size_t p = 0; p < n; ++p) {
      copies[p] = alpha_share_floor(policy.alpha_for(static_cast<ProductId>(p)), m, n, k);
    }
  }
  return copies;
}

namespace {

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

void check_round_robin_inputs(const Instance& inst, const std::vector<std::size_t>& copies,
                              const Ordering& order, const FeasibleSets& feasible) {
  if (copies.size() != inst.products()) {
    throw std::invalid_argument("copy vector length differs from product count");
  }
  if (!is_permutation_of_customers(order, inst.customers())) {
    throw std::invalid_argument("service order is not a permutation of the customers");
  }
  if (feasible.customers() != inst.customers() || feasible.products() != inst.products()) {
    throw std::invalid_argument("feasible sets do not match the instance shape");
  }
}

// Most relevant product for u among feasible products with copies left;
// the lowest id wins ties.
std::size_t best_available(const RelevanceMatrix& rel, CustomerId u,
                           const std::vector<std::size_t>& copies, const FeasibleSets& feasible) {
  const auto row = rel.row(u);
  std::size_t best = kNone;
  double best_value = 0.0;
  for (std::size_t p = 0; p < row.size(); ++p) {
    if (copies[p] == 0 || !feasible.contains(u, static_cast<ProductId>(p))) continue;
    if (best == kNone || row[p] > best_value) {
      best = p;
      best_value = row[p];
    }
  }
  return best;
}

void append(Allocation& into, const Allocation& more) {
  for (std::size_t u = 0; u < into.bundles.size(); ++u) {
    into.bundles[u].insert(into.bundles[u].end(), more.bundles[u].begin(), more.bundles[u].end());
  }
}

RoundRobinResult phase_one(const Instance& inst, const ExposurePolicy& policy,
                           const Ordering& order) {
  const std::size_t m = inst.customers();
  const std::size_t n = inst.products();
  std::vector<std::size_t> copies = copies_per_product(m, n, inst.k(), policy);
  const std::size_t budget = std::accumulate(copies.begin(), copies.end(), std::size_t{0});
  return greedy_round_robin(inst, std::move(copies), budget, order, FeasibleSets::full(m, n));
}

}  // namespace

RoundRobinResult greedy_round_robin(const Instance& inst, std::vector<std::size_t> copies,
                                    std::size_t budget, const Ordering& order,
                                    FeasibleSets feasible) {
  check_round_robin_inputs(inst, copies, order, feasible);
  const std::size_t m = inst.customers();
  const RelevanceMatrix& rel = inst.relevance();

  RoundRobinResult out{Allocation(m), std::move(feasible), m};
  if (budget == 0) return out;

  for (;;) {
    for (std::size_t i = 0; i < m; ++i) {
      const CustomerId u = order[i];
      const std::size_t p = best_available(rel, u, copies, out.feasible);
      if (p == kNone) {
        // Position i (0-based) is the 1-based index of the previous customer.
        if (i != 0) out.last_position = i;
        return out;
      }
      out.bundles.bundles[u].push_back(static_cast<ProductId>(p));
      out.feasible.remove(u, static_cast<ProductId>(p));
      --copies[p];
      if (--budget == 0) {
        out.last_position = i + 1;
        return out;
      }
    }
  }
}

Allocation fairrec_phase_one(const Instance& inst, const ExposurePolicy& policy,
                             const Ordering& order) {
  return phase_one(inst, policy, order).bundles;
}

Allocation fairrec(const Instance& inst, const ExposurePolicy& policy, const Ordering& order) {
  const std::size_t m = inst.customers();
  const std::size_t n = inst.products();
  const std::size_t k = inst.k();

  RoundRobinResult first = phase_one(inst, policy, order);
  Allocation alloc = std::move(first.bundles);
  const std::size_t x = first.last_position;

  // Customer right after position x in the service order.
  std::size_t lambda = alloc.bundles[order[x % m]].size();
  if (lambda >= k) return alloc;

  Ordering next = order;
  std::size_t budget = 0;
  if (x < m) {
    std::rotate(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(x), next.end());
    budget = m - x;
    ++lambda;
  }
  budget += m * (k - lambda);
  RoundRobinResult second = greedy_round_robin(inst, std::vector<std::size_t>(n, m), budget, next,
                                               std::move(first.feasible));
  append(alloc, second.bundles);
  return alloc;
}

ModifiedRoundRobinResult modified_greedy_round_robin(const Instance& inst,
                                                     std::vector<std::size_t> copies,
                                                     std::size_t budget, const Ordering& order,
                                                     FeasibleSets feasible) {
  check_round_robin_inputs(inst, copies, order, feasible);
  const std::size_t m = inst.customers();
  const RelevanceMatrix& rel = inst.relevance();

  ModifiedRoundRobinResult out{Allocation(m), std::move(feasible)};
  if (budget == 0) return out;
  Ordering sigma = order;

  auto settle = [&] {
    Allocation settled = eliminate_envy_cycles(out.bundles, rel);
    for (std::size_t u = 0; u < m; ++u) {
      if (settled.bundles[u] != out.bundles.bundles[u]) {
        out.feasible.reset_to_complement(static_cast<CustomerId>(u), settled.bundles[u]);
      }
    }
    out.bundles = std::move(settled);
    sigma = topological_order(build_envy_graph(out.bundles, rel));
  };

  for (;;) {
    for (std::size_t i = 0; i < m; ++i) {
      const CustomerId u = sigma[i];
      const std::size_t p = best_available(rel, u, copies, out.feasible);
      if (p == kNone) {
        settle();
        return out;
      }
      out.bundles.bundles[u].push_back(static_cast<ProductId>(p));
      out.feasible.remove(u, static_cast<ProductId>(p));
      --copies[p];
      if (--budget == 0) {
        settle();
        return out;
      }
    }
    settle();
  }
}

namespace {

ModifiedRoundRobinResult plus_phase_one(const Instance& inst, const ExposurePolicy& policy,
                                        const Ordering& order) {
  const std::size_t m = inst.customers();
  const std::size_t n = inst.products();
  std::vector<std::size_t> copies = copies_per_product(m, n, inst.k(), policy);
  const std::size_t budget = std::accumulate(copies.begin(), copies.end(), std::size_t{0});
  return modified_greedy_round_robin(inst, std::move(copies), budget, order,
                                     FeasibleSets::full(m, n));
}

}  // namespace

Allocation fairrecplus_phase_one(const Instance& inst, const ExposurePolicy& policy,
                                 const Ordering& order) {
  return plus_phase_one(inst, policy, order).bundles;
}

Allocation fairrecplus(const Instance& inst, const ExposurePolicy& policy,
                       const Ordering& order) {
  const std::size_t m = inst.customers();
  const std::size_t k = inst.k();
  const RelevanceMatrix& rel = inst.relevance();

  ModifiedRoundRobinResult first = plus_phase_one(inst, policy, order);
  Allocation alloc = std::move(first.bundles);

  for (std::size_t u = 0; u < m; ++u) {
    Bundle& bundle = alloc.bundles[u];
    if (bundle.size() >= k) continue;
    const auto cu = static_cast<CustomerId>(u);
    std::vector<ProductId> candidates = first.feasible.members(cu);
    const std::size_t want = std::min(k - bundle.size(), candidates.size());
    const auto row = rel.row(cu);
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(want),
                      candidates.end(), [&](ProductId a, ProductId b) {
                        return row[a] > row[b] || (row[a] == row[b] && a < b);
                      });
    bundle.insert(bundle.end(), candidates.begin(),
                  candidates.begin() + static_cast<std::ptrdiff_t>(want));
  }
  return alloc;
}

}  // namespace fairrec
