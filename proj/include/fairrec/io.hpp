#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "fairrec/core.hpp"
#include "fairrec/metrics.hpp"
#include "fairrec/random.hpp"

namespace fairrec {

/// External string keys for customers and products, in first-appearance
/// order. Algorithms only ever see the dense positions.
class EntityIndex {
 public:
  /// Returns the dense id for `key`, registering it when new.
  CustomerId add_customer(const std::string& key);
  ProductId add_product(const std::string& key);

  std::optional<ProductId> find_product(const std::string& key) const;
  std::optional<CustomerId> find_customer(const std::string& key) const;

  const std::vector<std::string>& customer_keys() const noexcept { return customers_; }
  const std::vector<std::string>& product_keys() const noexcept { return products_; }

 private:
  std::vector<std::string> customers_;
  std::vector<std::string> products_;
  std::unordered_map<std::string, CustomerId> customer_ids_;
  std::unordered_map<std::string, ProductId> product_ids_;
};

struct TripletRecord {
  std::string customer_key;
  std::string product_key;
  double score = 0.0;
};

/// Rectangular numeric CSV; row u is customer u. A first row whose first
/// cell is not a number is treated as a header.
RelevanceMatrix parse_dense_csv(std::istream& in);
RelevanceMatrix load_dense_csv(const std::filesystem::path& path);

/// CSV with the header `customer,product,score`. Later duplicates replace
/// earlier ones; absent pairs become 0.
std::pair<RelevanceMatrix, EntityIndex> parse_triplets_csv(std::istream& in);
std::pair<RelevanceMatrix, EntityIndex> load_triplets_csv(const std::filesystem::path& path);

/// Writes a matrix as a headerless dense CSV with round-trip exact numbers.
void write_dense_csv(const RelevanceMatrix& rel, const std::filesystem::path& path);

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

inline constexpr double kEarthRadiusKm = 6371.0;
/// Distance floor guarding co-located customer/product pairs.
inline constexpr double kMinDistanceKm = 1e-6;

double haversine_km(GeoPoint a, GeoPoint b);

/// V_u(p) = rating(p) / max(distance_km(u, p), kMinDistanceKm).
RelevanceMatrix gl_custom_scores(const std::vector<double>& ratings,
                                 const std::vector<GeoPoint>& customers,
                                 const std::vector<GeoPoint>& products);

enum class SynthDistribution { Uniform01, ZipfPopularity };

/// Seeded synthetic instance. Uniform01 draws i.i.d. values in [0, 1);
/// ZipfPopularity scales column p by 1/(p+1) and adds small uniform noise.
Instance synth_instance(std::size_t m, std::size_t n, std::size_t k, Seed seed,
                        SynthDistribution distribution);

/// One line per customer, comma-separated product keys (or integer ids when
/// no index is given), LF endings.
void write_allocation(const Allocation& alloc, const EntityIndex* index,
                      const std::filesystem::path& path);
std::string format_allocation(const Allocation& alloc, const EntityIndex* index);

Allocation parse_allocation(std::istream& in, const EntityIndex* index);
Allocation read_allocation(const std::filesystem::path& path, const EntityIndex* index = nullptr);

struct RunMetadata {
  std::string algorithm;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t k = 0;
  std::optional<double> alpha;  // absent for per-producer or alpha-free runs
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
};

enum class ReportFormat { Json, CsvRow };

/// Json writes one flat object. CsvRow appends a row, writing the header
/// first when the file is new or empty; `with_timing` adds elapsed_ms.
void write_report(const MetricsReport& report, const RunMetadata& meta,
                  const std::filesystem::path& path, ReportFormat format,
                  bool with_timing = true);

std::string report_json(const MetricsReport& report, const RunMetadata& meta);
std::pair<MetricsReport, RunMetadata> parse_report_json(const std::string& text);

std::string csv_header(bool with_timing);
std::string csv_row(const MetricsReport& report, const RunMetadata& meta, bool with_timing);

/// Shortest round-trip decimal, always carrying a fraction or exponent
/// (1.0 rather than 1).
std::string format_number(double v);

}  // namespace fairrec
