#pragma once

#include "fairrec/core.hpp"
#include "fairrec/random.hpp"

namespace fairrec {

// Comparison recommenders. Each returns exactly k distinct products per
// customer. Wherever an ordering has ties, the lowest product id wins.

/// Each customer's k most relevant products.
Allocation top_k(const Instance& inst);

/// k products per customer drawn uniformly without replacement.
Allocation random_k(const Instance& inst, Seed seed);

/// Customers in id order each take the k currently least-exposed products.
Allocation poorest_k(const Instance& inst);

/// ceil(k/2) most relevant products plus a uniform draw from the rest.
Allocation mixed_tr_k(const Instance& inst, Seed seed);

/// ceil(k/2) most relevant products plus the least-exposed of the rest,
/// customers in id order.
Allocation mixed_tp_k(const Instance& inst);

/// Customers in id order take the top k by
/// 0.5 * V_u(p) + 0.5 * (1 - E_p / sum E), with the exposure share taken
/// as 0 before anything has been recommended.
Allocation mpb19(const Instance& inst);

}  // namespace fairrec
