#include "fairrec/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace fairrec {

RelevanceMatrix::RelevanceMatrix(std::size_t customers, std::size_t products,
                                 std::vector<double> values)
    : m_(customers), n_(products), values_(std::move(values)) {
  if (m_ == 0 || n_ == 0) {
    throw std::invalid_argument("relevance matrix must have at least one row and one column");
  }
  if (values_.size() != m_ * n_) {
    throw std::invalid_argument("relevance matrix expects " + std::to_string(m_ * n_) +
                                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double v = values_[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw InstanceError(InstanceErrorKind::BadValue,
                          "relevance (" + std::to_string(i / n_) + ", " +
                              std::to_string(i % n_) + ") = " + std::to_string(v) +
                              " is not a finite nonnegative number");
    }
  }
}

Instance validate_instance(RelevanceMatrix rel, std::size_t k) {
  const std::size_t m = rel.customers();
  const std::size_t n = rel.products();
  if (k == 0) {
    throw std::invalid_argument("recommendation size k must be positive");
  }
  if (k >= n) {
    throw InstanceError(InstanceErrorKind::KTooLarge,
                        "k = " + std::to_string(k) + " must be smaller than n = " +
                            std::to_string(n));
  }
  if (n > m * k) {
    throw InstanceError(InstanceErrorKind::TooFewCustomers,
                        "n = " + std::to_string(n) + " exceeds m*k = " +
                            std::to_string(m) + "*" + std::to_string(k));
  }
  return Instance(std::move(rel), k);
}

Allocation canonical(Allocation alloc) {
  for (auto& b : alloc.bundles) std::sort(b.begin(), b.end());
  return alloc;
}

bool bundles_distinct(const Allocation& alloc) {
  for (const auto& b : alloc.bundles) {
    Bundle sorted = b;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return false;
  }
  return true;
}

namespace {
void check_alpha(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw std::invalid_argument("alpha " + std::to_string(a) + " is outside [0, 1]");
  }
}
}  // namespace

ExposurePolicy ExposurePolicy::global(double alpha) {
  check_alpha(alpha);
  return ExposurePolicy(alpha);
}

ExposurePolicy ExposurePolicy::per_producer(std::vector<double> alphas) {
  for (double a : alphas) check_alpha(a);
  return ExposurePolicy(std::move(alphas));
}

double ExposurePolicy::alpha_for(ProductId p) const {
  if (const auto* a = std::get_if<double>(&alpha_)) return *a;
  return std::get<std::vector<double>>(alpha_).at(p);
}

std::size_t ExposurePolicy::size() const noexcept {
  if (is_global()) return 0;
  return std::get<std::vector<double>>(alpha_).size();
}

std::size_t alpha_share_floor(double alpha, std::size_t m, std::size_t n, std::size_t k) {
  check_alpha(alpha);
  if (n == 0) throw std::invalid_argument("product count must be positive");
  using boost::multiprecision::cpp_int;

  // Shortest round-trip decimal: digits "d.ddd" and exponent e.
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, alpha, std::chars_format::scientific);
  if (ec != std::errc()) throw std::runtime_error("cannot format alpha");
  std::string text(buf, end);
  const auto epos = text.find('e');
  const int exponent = std::stoi(text.substr(epos + 1));
  std::string digits;
  for (char c : text.substr(0, epos)) {
    if (c != '.') digits.push_back(c);
  }
  // alpha = digits * 10^(exponent - (digits.size() - 1))
  const int scale = exponent - static_cast<int>(digits.size() - 1);
  cpp_int num(digits);
  num *= cpp_int(m) * cpp_int(k);
  cpp_int den(n);
  cpp_int ten(10);
  if (scale >= 0) {
    num *= boost::multiprecision::pow(ten, static_cast<unsigned>(scale));
  } else {
    den *= boost::multiprecision::pow(ten, static_cast<unsigned>(-scale));
  }
  return static_cast<std::size_t>(num / den);
}

ExposureVector exposures_of(const Allocation& alloc, std::size_t products) {
  ExposureVector e(products, 0);
  for (std::size_t u = 0; u < alloc.bundles.size(); ++u) {
    for (ProductId p : alloc.bundles[u]) {
      if (p >= products) {
        throw IdOutOfRange("customer " + std::to_string(u) + " holds product " +
                           std::to_string(p) + " but n = " + std::to_string(products));
      }
      ++e[p];
    }
  }
  return e;
}

}  // namespace fairrec
