#include "fairrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace fairrec {

namespace {

double best_k_total(std::span<const double> row, std::size_t k) {
  std::vector<double> v(row.begin(), row.end());
  k = std::min(k, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(),
                   std::greater<>());
  std::sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), std::greater<>());
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i) s += v[i];
  return s;
}

double bundle_value(std::span<const double> row, const Bundle& bundle) {
  double s = 0.0;
  for (ProductId p : bundle) s += row[p];
  return s;
}

// Capped at 1: no bundle of at most k products can beat the best k.
double normalized(double value, double best) {
  return best == 0.0 ? 1.0 : std::min(value / best, 1.0);
}

void check_shape(const RelevanceMatrix& rel, const Allocation& alloc) {
  if (alloc.customers() != rel.customers()) {
    throw std::invalid_argument("allocation has " + std::to_string(alloc.customers()) +
                                " bundles for " + std::to_string(rel.customers()) + " customers");
  }
  exposures_of(alloc, rel.products());
}

void check_sizes(const Allocation& alloc, std::size_t k) {
  for (std::size_t u = 0; u < alloc.customers(); ++u) {
    if (alloc.bundles[u].size() != k) {
      throw BadBundleSize("customer " + std::to_string(u) + " holds " +
                          std::to_string(alloc.bundles[u].size()) + " products, expected " +
                          std::to_string(k));
    }
  }
}

std::vector<double> utilities(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k,
                              std::vector<double>* best_out = nullptr) {
  std::vector<double> phi(alloc.customers());
  if (best_out) best_out->resize(alloc.customers());
  for (std::size_t u = 0; u < alloc.customers(); ++u) {
    const auto row = rel.row(static_cast<CustomerId>(u));
    const double best = best_k_total(row, k);
    if (best_out) (*best_out)[u] = best;
    phi[u] = normalized(bundle_value(row, alloc.bundles[u]), best);
  }
  return phi;
}

double envy_mean(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k) {
  const std::size_t m = alloc.customers();
  if (m < 2) return 0.0;
  std::vector<double> best;
  const std::vector<double> own = utilities(rel, alloc, k, &best);
  double total = 0.0;
  for (std::size_t u = 0; u < m; ++u) {
    const auto row = rel.row(static_cast<CustomerId>(u));
    double sum = 0.0;
    for (std::size_t w = 0; w < m; ++w) {
      if (w == u) continue;
      const double other = normalized(bundle_value(row, alloc.bundles[w]), best[u]);
      sum += std::max(other - own[u], 0.0);
    }
    total += sum / static_cast<double>(m - 1);
  }
  return total / static_cast<double>(m);
}

UtilityStats stats_of(const std::vector<double>& phi) {
  UtilityStats s;
  if (phi.empty()) return s;
  double sum = 0.0;
  for (double v : phi) sum += v;
  s.mean = sum / static_cast<double>(phi.size());
  double sq = 0.0;
  for (double v : phi) sq += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(phi.size()));
  return s;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw std::invalid_argument("length mismatch: " + std::to_string(a) + " vs " +
                                std::to_string(b));
  }
}

}  // namespace

double customer_utility(const RelevanceMatrix& rel, CustomerId u, const Bundle& bundle,
                        std::size_t k) {
  if (bundle.size() != k) {
    throw BadBundleSize("bundle holds " + std::to_string(bundle.size()) +
                        " products, expected " + std::to_string(k));
  }
  if (u >= rel.customers()) throw IdOutOfRange("customer id out of range");
  for (ProductId p : bundle) {
    if (p >= rel.products()) throw IdOutOfRange("product id out of range");
  }
  const auto row = rel.row(u);
  return normalized(bundle_value(row, bundle), best_k_total(row, k));
}

std::size_t mms_threshold(std::size_t m, std::size_t n, std::size_t k, double alpha) {
  return alpha_share_floor(alpha, m, n, k);
}

std::vector<std::size_t> exposure_thresholds(std::size_t m, std::size_t n, std::size_t k,
                                             const ExposurePolicy& policy) {
  if (!policy.is_global() && policy.size() != n) {
    throw std::invalid_argument("per-producer policy length differs from product count");
  }
  std::vector<std::size_t> t(n);
  for (std::size_t p = 0; p < n; ++p) {
    t[p] = mms_threshold(m, n, k, policy.alpha_for(static_cast<ProductId>(p)));
  }
  return t;
}

std::size_t count_at_threshold(const ExposureVector& exposures,
                               const std::vector<std::size_t>& thresholds) {
  check_lengths(exposures.size(), thresholds.size());
  std::size_t c = 0;
  for (std::size_t p = 0; p < exposures.size(); ++p) c += exposures[p] >= thresholds[p];
  return c;
}

double metric_h(const ExposureVector& exposures, const std::vector<std::size_t>& thresholds) {
  if (exposures.empty()) return 1.0;
  return static_cast<double>(count_at_threshold(exposures, thresholds)) /
         static_cast<double>(exposures.size());
}

double metric_z(const ExposureVector& exposures, std::size_t m, std::size_t n, std::size_t k) {
  if (n < 2) throw DegenerateBase("entropy base n must be at least 2");
  check_lengths(exposures.size(), n);
  const double total = static_cast<double>(m) * static_cast<double>(k);
  const double log_n = std::log(static_cast<double>(n));
  double z = 0.0;
  for (std::size_t e : exposures) {
    if (e == 0) continue;
    const double share = static_cast<double>(e) / total;
    z -= share * std::log(share) / log_n;
  }
  // A lone nonzero share of exactly 1 yields -0.0.
  return z == 0.0 ? 0.0 : z;
}

double metric_l(const ExposureVector& exposures, const ExposureVector& topk_exposures) {
  check_lengths(exposures.size(), topk_exposures.size());
  if (exposures.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t p = 0; p < exposures.size(); ++p) {
    if (topk_exposures[p] == 0) continue;
    const double ref = static_cast<double>(topk_exposures[p]);
    sum += std::max((ref - static_cast<double>(exposures[p])) / ref, 0.0);
  }
  return sum / static_cast<double>(exposures.size());
}

double metric_y(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k) {
  check_shape(rel, alloc);
  check_sizes(alloc, k);
  return envy_mean(rel, alloc, k);
}

UtilityStats utility_stats(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k) {
  check_shape(rel, alloc);
  check_sizes(alloc, k);
  return stats_of(utilities(rel, alloc, k));
}

bool is_ef1(const RelevanceMatrix& rel, const Allocation& alloc) {
  check_shape(rel, alloc);
  const std::size_t m = alloc.customers();
  for (std::size_t u = 0; u < m; ++u) {
    const auto row = rel.row(static_cast<CustomerId>(u));
    const double own = bundle_value(row, alloc.bundles[u]);
    for (std::size_t w = 0; w < m; ++w) {
      if (w == u) continue;
      double other = 0.0;
      double top = 0.0;
      for (ProductId p : alloc.bundles[w]) {
        other += row[p];
        top = std::max(top, row[p]);
      }
      if (own < other - top - kFairnessTolerance) return false;
    }
  }
  return true;
}

double alpha_mms_fraction(const ExposureVector& exposures,
                          const std::vector<std::size_t>& thresholds) {
  return metric_h(exposures, thresholds);
}

double alpha_mms_lower_bound(std::size_t m, std::size_t threshold) {
  return 1.0 - static_cast<double>(threshold) / static_cast<double>(m + 1);
}

bool meets_alpha_mms_bound(std::size_t satisfied, std::size_t n, std::size_t m,
                           std::size_t threshold) {
  // satisfied * (m + 1) >= n * (m + 1 - threshold)
  if (threshold >= m + 1) return true;
  return static_cast<unsigned __int128>(satisfied) * (m + 1) >=
         static_cast<unsigned __int128>(n) * (m + 1 - threshold);
}

std::vector<std::pair<double, double>> lorenz_points(const ExposureVector& exposures) {
  if (exposures.empty()) throw std::invalid_argument("lorenz curve needs at least one producer");
  std::vector<std::size_t> sorted = exposures;
  std::sort(sorted.begin(), sorted.end());
  std::size_t total = 0;
  for (std::size_t e : sorted) total += e;
  const double n = static_cast<double>(sorted.size());

  std::vector<std::pair<double, double>> points;
  points.reserve(sorted.size() + 1);
  points.emplace_back(0.0, 0.0);
  std::size_t cumulative = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    cumulative += sorted[i];
    const double x = static_cast<double>(i + 1) / n;
    // With nothing exposed every producer holds an equal (empty) share.
    const double y = total == 0 ? x : static_cast<double>(cumulative) / static_cast<double>(total);
    points.emplace_back(x, y);
  }
  return points;
}

MetricsReport evaluate(const Instance& inst, const Allocation& alloc,
                       const ExposurePolicy& policy, const ExposureVector& topk_exposures,
                       bool partial) {
  const RelevanceMatrix& rel = inst.relevance();
  const std::size_t m = inst.customers();
  const std::size_t n = inst.products();
  const std::size_t k = inst.k();
  check_shape(rel, alloc);
  if (!partial) check_sizes(alloc, k);

  const ExposureVector exposure = exposures_of(alloc, n);
  const std::vector<std::size_t> thresholds = exposure_thresholds(m, n, k, policy);

  MetricsReport r;
  r.h = metric_h(exposure, thresholds);
  r.z = metric_z(exposure, m, n, k);
  r.l = metric_l(exposure, topk_exposures);
  r.y = envy_mean(rel, alloc, k);
  const UtilityStats s = stats_of(utilities(rel, alloc, k));
  r.mu_phi = s.mean;
  r.std_phi = s.stddev;
  r.ef1 = is_ef1(rel, alloc);
  r.alpha_mms_fraction = alpha_mms_fraction(exposure, thresholds);
  return r;
}

}  // namespace fairrec
