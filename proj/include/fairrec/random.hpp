#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace fairrec {

struct Seed {
  std::uint64_t value = 0;
  bool operator==(const Seed&) const = default;
};

/// mt19937_64 wrapper whose draws do not depend on the standard library's
/// distribution implementations, so seeded results match across toolchains.
class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform real in [0, 1) with 53 random bits.
  double unit();

  /// `count` distinct elements of `pool`, uniformly without replacement,
  /// in draw order. `pool` is reordered.
  template <typename T>
  std::vector<T> sample(std::vector<T>& pool, std::size_t count) {
    std::vector<T> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count && i < pool.size(); ++i) {
      const std::size_t j = i + static_cast<std::size_t>(below(pool.size() - i));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
    return out;
  }

  /// Uniformly shuffled 0..size-1.
  std::vector<std::uint32_t> permutation(std::size_t size);

 private:
  std::mt19937_64 engine_;
};

}  // namespace fairrec
