#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fairrec/core.hpp"

namespace fairrec {

/// Tolerance absorbing summation-order noise in fairness checks.
inline constexpr double kFairnessTolerance = 1e-9;

/// Normalized customer utility: relevance of `bundle` to u divided by the
/// relevance of u's k best products. 1.0 when that best total is zero.
/// Throws BadBundleSize unless the bundle holds exactly k products.
double customer_utility(const RelevanceMatrix& rel, CustomerId u, const Bundle& bundle,
                        std::size_t k);

/// floor(alpha * m * k / n), the alpha-scaled maximin share of a producer.
std::size_t mms_threshold(std::size_t m, std::size_t n, std::size_t k, double alpha);

/// Per-product exposure thresholds under a policy.
std::vector<std::size_t> exposure_thresholds(std::size_t m, std::size_t n, std::size_t k,
                                             const ExposurePolicy& policy);

/// Fraction of producers whose exposure reaches their threshold.
double metric_h(const ExposureVector& exposures, const std::vector<std::size_t>& thresholds);

/// Base-n entropy of exposure shares E_p / (m k). 1 for uniform exposure,
/// 0 when one producer holds everything.
double metric_z(const ExposureVector& exposures, std::size_t m, std::size_t n, std::size_t k);

/// Mean relative exposure loss against a top-k reference. Products the
/// reference never exposes contribute nothing.
double metric_l(const ExposureVector& exposures, const ExposureVector& topk_exposures);

/// Mean average envy over customers, measured with normalized utilities.
double metric_y(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k);

struct UtilityStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

UtilityStats utility_stats(const RelevanceMatrix& rel, const Allocation& alloc, std::size_t k);

/// Envy-freeness up to one item under raw relevance sums.
bool is_ef1(const RelevanceMatrix& rel, const Allocation& alloc);

/// Same count as metric_h; reported next to the guaranteed lower bound.
double alpha_mms_fraction(const ExposureVector& exposures,
                          const std::vector<std::size_t>& thresholds);

/// 1 - threshold / (m + 1): the guaranteed fraction of producers at their
/// alpha-scaled maximin share.
double alpha_mms_lower_bound(std::size_t m, std::size_t threshold);

/// satisfied / n >= 1 - threshold / (m + 1), decided in integers.
bool meets_alpha_mms_bound(std::size_t satisfied, std::size_t n, std::size_t m,
                           std::size_t threshold);

std::size_t count_at_threshold(const ExposureVector& exposures,
                               const std::vector<std::size_t>& thresholds);

/// Lorenz curve of exposure: producers in ascending order of exposure,
/// point i = (i / n, share of total exposure held by the i poorest).
std::vector<std::pair<double, double>> lorenz_points(const ExposureVector& exposures);

struct MetricsReport {
  double h = 0.0;
  double z = 0.0;
  double l = 0.0;
  double y = 0.0;
  double mu_phi = 0.0;
  double std_phi = 0.0;
  bool ef1 = false;
  double alpha_mms_fraction = 0.0;
};

/// Every metric for one allocation. `topk_exposures` is the reference for L.
/// With `partial`, bundles may hold fewer than k products (phase-level
/// instrumentation); utilities are still normalized by the full top-k value.
MetricsReport evaluate(const Instance& inst, const Allocation& alloc,
                       const ExposurePolicy& policy, const ExposureVector& topk_exposures,
                       bool partial = false);

}  // namespace fairrec
