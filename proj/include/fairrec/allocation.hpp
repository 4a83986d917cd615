#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fairrec/core.hpp"

namespace fairrec {

/// Per-customer membership mask over products: the products a customer may
/// still receive. A product leaves F_u once it is allocated to u, so no
/// customer is ever recommended the same product twice.
class FeasibleSets {
 public:
  FeasibleSets() = default;
  /// Every customer may receive every product.
  static FeasibleSets full(std::size_t customers, std::size_t products);

  std::size_t customers() const noexcept { return m_; }
  std::size_t products() const noexcept { return n_; }

  bool contains(CustomerId u, ProductId p) const noexcept {
    return mask_[static_cast<std::size_t>(u) * n_ + p] != 0;
  }
  void remove(CustomerId u, ProductId p) noexcept {
    mask_[static_cast<std::size_t>(u) * n_ + p] = 0;
  }
  /// Resets F_u to all products except those in `held`.
  void reset_to_complement(CustomerId u, const Bundle& held);
  std::vector<ProductId> members(CustomerId u) const;

  bool operator==(const FeasibleSets&) const = default;

 private:
  std::size_t m_ = 0;
  std::size_t n_ = 0;
  std::vector<unsigned char> mask_;
};

/// Service order over customers: order[i] is the customer served at the
/// (i+1)-th position of each round.
using Ordering = std::vector<CustomerId>;

Ordering identity_ordering(std::size_t customers);
bool is_permutation_of_customers(const Ordering& order, std::size_t customers);

/// Copies per product: floor(alpha_p * m * k / n) for every product p.
std::vector<std::size_t> copies_per_product(std::size_t m, std::size_t n, std::size_t k,
                                            const ExposurePolicy& policy);

struct RoundRobinResult {
  Allocation bundles;
  FeasibleSets feasible;
  /// 1-based position in the service order of the last customer served
  /// before termination; m when termination hit the first position or
  /// nothing was allocated.
  std::size_t last_position = 0;
};

/// Greedy round robin: customers are served in `order`, round after round,
/// each taking their most relevant product among those still feasible for
/// them with copies left (ties go to the lowest product id). Stops after
/// `budget` allocations or as soon as the customer being served has no
/// available feasible product. `copies` is consumed.
RoundRobinResult greedy_round_robin(const Instance& inst, std::vector<std::size_t> copies,
                                    std::size_t budget, const Ordering& order,
                                    FeasibleSets feasible);

/// Two-phase FairRec. Phase 1 hands out the policy's guaranteed copies by
/// greedy round robin; phase 2 completes every bundle to exactly k items
/// with unlimited copies, resuming the service order after the last
/// phase-1 customer.
Allocation fairrec(const Instance& inst, const ExposurePolicy& policy, const Ordering& order);

/// Phase-1 result of fairrec on its own (used for phase instrumentation).
Allocation fairrec_phase_one(const Instance& inst, const ExposurePolicy& policy,
                             const Ordering& order);

// ---------------------------------------------------------------------------
// Envy graph machinery

/// Directed graph over customers; edge (u, w) means u strictly prefers w's
/// bundle to their own under raw relevance sums.
class EnvyGraph {
 public:
  explicit EnvyGraph(std::size_t nodes) : m_(nodes), adj_(nodes * nodes, 0) {}

  std::size_t nodes() const noexcept { return m_; }
  bool has_edge(CustomerId u, CustomerId w) const noexcept { return adj_[u * m_ + w] != 0; }
  void add_edge(CustomerId u, CustomerId w);
  std::vector<std::pair<CustomerId, CustomerId>> edges() const;
  std::size_t edge_count() const noexcept;

 private:
  std::size_t m_;
  std::vector<unsigned char> adj_;
};

EnvyGraph build_envy_graph(const Allocation& partial, const RelevanceMatrix& rel);

/// First directed cycle found by depth-first search started at the lowest
/// unvisited node with neighbours scanned in id order. Empty when acyclic.
/// Returned as c0 -> c1 -> ... -> c_{len-1} -> c0.
std::vector<CustomerId> find_cycle(const EnvyGraph& g);

/// Rotates bundles along envy cycles (each customer on a cycle takes the
/// bundle of the customer they envy) until the envy graph is acyclic. No
/// customer's value for their own bundle decreases.
Allocation eliminate_envy_cycles(Allocation partial, const RelevanceMatrix& rel);

/// Kahn ordering with a lowest-id frontier. For an edge (u, w) the envier u
/// comes before w. Throws CyclicGraph when no such ordering exists.
Ordering topological_order(const EnvyGraph& g);

struct ModifiedRoundRobinResult {
  Allocation bundles;
  FeasibleSets feasible;
};

/// Greedy round robin that restores an acyclic envy graph after every round
/// (and at termination) and re-derives the service order from it before the
/// next round. Feasible sets follow the bundles when they rotate.
ModifiedRoundRobinResult modified_greedy_round_robin(const Instance& inst,
                                                     std::vector<std::size_t> copies,
                                                     std::size_t budget, const Ordering& order,
                                                     FeasibleSets feasible);

/// FairRecPlus: phase 1 via modified_greedy_round_robin, then each customer
/// in id order tops up with their most relevant remaining feasible products.
Allocation fairrecplus(const Instance& inst, const ExposurePolicy& policy,
                       const Ordering& order);

Allocation fairrecplus_phase_one(const Instance& inst, const ExposurePolicy& policy,
                                 const Ordering& order);

}  // namespace fairrec
