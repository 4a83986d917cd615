#include "fairrec/random.hpp"

#include <numeric>

namespace fairrec {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x > limit);
  return x % bound;
}

double Rng::unit() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::vector<std::uint32_t> Rng::permutation(std::size_t size) {
  std::vector<std::uint32_t> v(size);
  std::iota(v.begin(), v.end(), 0u);
  for (std::size_t i = size; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(below(i));
    std::swap(v[i - 1], v[j]);
  }
  return v;
}

}  // namespace fairrec
