#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "fairrec/error.hpp"

namespace fairrec {

using CustomerId = std::uint32_t;
using ProductId = std::uint32_t;

/// Dense m x n matrix of nonnegative relevance scores; entry (u, p) is the
/// relevance of product p to customer u. Immutable after construction.
class RelevanceMatrix {
 public:
  /// Throws InstanceError(BadValue) on a negative or non-finite entry and
  /// std::invalid_argument on a shape mismatch.
  RelevanceMatrix(std::size_t customers, std::size_t products,
                  std::vector<double> values);

  std::size_t customers() const noexcept { return m_; }
  std::size_t products() const noexcept { return n_; }

  double operator()(CustomerId u, ProductId p) const noexcept {
    return values_[static_cast<std::size_t>(u) * n_ + p];
  }
  std::span<const double> row(CustomerId u) const noexcept {
    return {values_.data() + static_cast<std::size_t>(u) * n_, n_};
  }
  std::span<const double> values() const noexcept { return values_; }

  bool operator==(const RelevanceMatrix&) const = default;

 private:
  std::size_t m_;
  std::size_t n_;
  std::vector<double> values_;
};

/// A relevance matrix together with a recommendation size k satisfying
/// k < n <= m*k. Only obtainable through validate_instance.
class Instance {
 public:
  const RelevanceMatrix& relevance() const noexcept { return rel_; }
  std::size_t customers() const noexcept { return rel_.customers(); }
  std::size_t products() const noexcept { return rel_.products(); }
  std::size_t k() const noexcept { return k_; }

 private:
  friend Instance validate_instance(RelevanceMatrix rel, std::size_t k);
  Instance(RelevanceMatrix rel, std::size_t k) : rel_(std::move(rel)), k_(k) {}

  RelevanceMatrix rel_;
  std::size_t k_;
};

Instance validate_instance(RelevanceMatrix rel, std::size_t k);

/// Products recommended to one customer, in the order they were allocated.
using Bundle = std::vector<ProductId>;

struct Allocation {
  std::vector<Bundle> bundles;

  Allocation() = default;
  explicit Allocation(std::size_t customers) : bundles(customers) {}
  explicit Allocation(std::vector<Bundle> b) : bundles(std::move(b)) {}

  std::size_t customers() const noexcept { return bundles.size(); }
  bool operator==(const Allocation&) const = default;
};

/// Same allocation with every bundle sorted ascending; lets callers compare
/// allocations as collections of sets.
Allocation canonical(Allocation alloc);

bool bundles_distinct(const Allocation& alloc);

/// Either one alpha for every producer or one alpha per producer; every
/// value lies in [0, 1].
class ExposurePolicy {
 public:
  static ExposurePolicy global(double alpha);
  static ExposurePolicy per_producer(std::vector<double> alphas);

  bool is_global() const noexcept {
    return std::holds_alternative<double>(alpha_);
  }
  /// Requires is_global().
  double global_alpha() const { return std::get<double>(alpha_); }
  /// Alpha applied to product p; for a per-producer policy p must be in range.
  double alpha_for(ProductId p) const;
  std::size_t size() const noexcept;

 private:
  explicit ExposurePolicy(std::variant<double, std::vector<double>> a)
      : alpha_(std::move(a)) {}
  std::variant<double, std::vector<double>> alpha_;
};

/// floor(alpha * m * k / n) evaluated exactly on the shortest decimal form of
/// alpha, so alpha = 0.7 behaves as 7/10 rather than its binary neighbour.
std::size_t alpha_share_floor(double alpha, std::size_t m, std::size_t n, std::size_t k);

/// E_p: number of customers whose bundle contains product p.
using ExposureVector = std::vector<std::size_t>;

ExposureVector exposures_of(const Allocation& alloc, std::size_t products);

}  // namespace fairrec
