#include "fairrec/baselines.hpp"

#include <algorithm>
#include <numeric>

namespace fairrec {

namespace {

std::size_t top_half(std::size_t k) { return (k + 1) / 2; }

// First `count` of `candidates` ranked by `better`, in ranked order.
template <typename Better>
std::vector<ProductId> best_of(std::vector<ProductId> candidates, std::size_t count,
                               Better better) {
  count = std::min(count, candidates.size());
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(count),
                    candidates.end(), better);
  candidates.resize(count);
  return candidates;
}

std::vector<ProductId> all_products(std::size_t n) {
  std::vector<ProductId> v(n);
  std::iota(v.begin(), v.end(), ProductId{0});
  return v;
}

std::vector<ProductId> most_relevant(const RelevanceMatrix& rel, CustomerId u, std::size_t count) {
  const auto row = rel.row(u);
  return best_of(all_products(rel.products()), count, [&](ProductId a, ProductId b) {
    return row[a] > row[b] || (row[a] == row[b] && a < b);
  });
}

std::vector<ProductId> least_exposed(const std::vector<ProductId>& candidates,
                                     const ExposureVector& exposure, std::size_t count) {
  return best_of(candidates, count, [&](ProductId a, ProductId b) {
    return exposure[a] < exposure[b] || (exposure[a] == exposure[b] && a < b);
  });
}

std::vector<ProductId> excluding(std::size_t n, const Bundle& taken) {
  std::vector<bool> in(n, false);
  for (ProductId p : taken) in[p] = true;
  std::vector<ProductId> rest;
  rest.reserve(n);
  for (std::size_t p = 0; p < n; ++p) {
    if (!in[p]) rest.push_back(static_cast<ProductId>(p));
  }
  return rest;
}

}  // namespace

Allocation top_k(const Instance& inst) {
  Allocation out(inst.customers());
  for (std::size_t u = 0; u < inst.customers(); ++u) {
    out.bundles[u] = most_relevant(inst.relevance(), static_cast<CustomerId>(u), inst.k());
  }
  return out;
}

Allocation random_k(const Instance& inst, Seed seed) {
  Rng rng(seed);
  Allocation out(inst.customers());
  for (std::size_t u = 0; u < inst.customers(); ++u) {
    std::vector<ProductId> pool = all_products(inst.products());
    out.bundles[u] = rng.sample(pool, inst.k());
  }
  return out;
}

Allocation poorest_k(const Instance& inst) {
  const std::size_t n = inst.products();
  const std::vector<ProductId> everything = all_products(n);
  ExposureVector exposure(n, 0);
  Allocation out(inst.customers());
  for (auto& bundle : out.bundles) {
    bundle = least_exposed(everything, exposure, inst.k());
    for (ProductId p : bundle) ++exposure[p];
  }
  return out;
}

Allocation mixed_tr_k(const Instance& inst, Seed seed) {
  Rng rng(seed);
  const std::size_t n = inst.products();
  const std::size_t head = top_half(inst.k());
  Allocation out(inst.customers());
  for (std::size_t u = 0; u < inst.customers(); ++u) {
    Bundle bundle = most_relevant(inst.relevance(), static_cast<CustomerId>(u), head);
    std::vector<ProductId> rest = excluding(n, bundle);
    const std::vector<ProductId> tail = rng.sample(rest, inst.k() - head);
    bundle.insert(bundle.end(), tail.begin(), tail.end());
    out.bundles[u] = std::move(bundle);
  }
  return out;
}

Allocation mixed_tp_k(const Instance& inst) {
  const std::size_t n = inst.products();
  const std::size_t head = top_half(inst.k());
  ExposureVector exposure(n, 0);
  Allocation out(inst.customers());
  for (std::size_t u = 0; u < inst.customers(); ++u) {
    Bundle bundle = most_relevant(inst.relevance(), static_cast<CustomerId>(u), head);
    const std::vector<ProductId> tail =
        least_exposed(excluding(n, bundle), exposure, inst.k() - head);
    bundle.insert(bundle.end(), tail.begin(), tail.end());
    for (ProductId p : bundle) ++exposure[p];
    out.bundles[u] = std::move(bundle);
  }
  return out;
}

Allocation mpb19(const Instance& inst) {
  const std::size_t n = inst.products();
  const std::vector<ProductId> everything = all_products(n);
  ExposureVector exposure(n, 0);
  std::size_t total = 0;
  std::vector<double> score(n);
  Allocation out(inst.customers());
  for (std::size_t u = 0; u < inst.customers(); ++u) {
    const auto row = inst.relevance().row(static_cast<CustomerId>(u));
    for (std::size_t p = 0; p < n; ++p) {
      const double share =
          total == 0 ? 0.0 : static_cast<double>(exposure[p]) / static_cast<double>(total);
      score[p] = 0.5 * row[p] + 0.5 * (1.0 - share);
    }
    out.bundles[u] = best_of(everything, inst.k(), [&](ProductId a, ProductId b) {
      return score[a] > score[b] || (score[a] == score[b] && a < b);
    });
    for (ProductId p : out.bundles[u]) ++exposure[p];
    total += inst.k();
  }
  return out;
}

}  // namespace fairrec
