#include "fairrec/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"

namespace fairrec {

// ---------------------------------------------------------------------------
// EntityIndex

CustomerId EntityIndex::add_customer(const std::string& key) {
  auto [it, inserted] = customer_ids_.try_emplace(key, static_cast<CustomerId>(customers_.size()));
  if (inserted) customers_.push_back(key);
  return it->second;
}

ProductId EntityIndex::add_product(const std::string& key) {
  auto [it, inserted] = product_ids_.try_emplace(key, static_cast<ProductId>(products_.size()));
  if (inserted) products_.push_back(key);
  return it->second;
}

std::optional<ProductId> EntityIndex::find_product(const std::string& key) const {
  auto it = product_ids_.find(key);
  if (it == product_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<CustomerId> EntityIndex::find_customer(const std::string& key) const {
  auto it = customer_ids_.find(key);
  if (it == customer_ids_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// CSV helpers

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::optional<double> to_number(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return v;
}

double score_at(const std::string& cell, std::size_t line, std::size_t column) {
  const auto v = to_number(cell);
  const std::string where = " at line " + std::to_string(line) + ", column " + std::to_string(column);
  if (!v) throw ParseError(ParseErrorKind::BadNumber, line, "not a number '" + cell + "'" + where);
  if (!std::isfinite(*v) || *v < 0.0) {
    throw ParseError(ParseErrorKind::BadNumber, line,
                     "score '" + cell + "' is not a finite nonnegative number" + where);
  }
  return *v;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
  std::ofstream out(path, std::ios::binary | mode);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

RelevanceMatrix parse_dense_csv(std::istream& in) {
  std::vector<double> values;
  std::size_t columns = 0;
  std::size_t rows = 0;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_fields(line);
    if (first_content) {
      first_content = false;
      if (!to_number(cells.front())) continue;  // header
    }
    if (columns == 0) {
      columns = cells.size();
    } else if (cells.size() != columns) {
      throw ParseError(ParseErrorKind::Ragged, line_no,
                       "row at line " + std::to_string(line_no) + " has " +
                           std::to_string(cells.size()) + " columns, expected " +
                           std::to_string(columns));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) values.push_back(score_at(cells[c], line_no, c + 1));
    ++rows;
  }
  if (rows == 0) throw ParseError(ParseErrorKind::Empty, 0, "dense CSV has no data rows");
  return RelevanceMatrix(rows, columns, std::move(values));
}

RelevanceMatrix load_dense_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_dense_csv(in);
}

std::pair<RelevanceMatrix, EntityIndex> parse_triplets_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  EntityIndex index;
  struct Cell {
    CustomerId u;
    ProductId p;
    double score;
  };
  std::vector<Cell> cells;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> f = split_fields(line);
    if (!header_seen) {
      if (f.size() != 3 || f[0] != "customer" || f[1] != "product" || f[2] != "score") {
        throw ParseError(ParseErrorKind::Syntax, line_no,
                         "expected header 'customer,product,score' at line " +
                             std::to_string(line_no));
      }
      header_seen = true;
      continue;
    }
    if (f.size() != 3) {
      throw ParseError(ParseErrorKind::Ragged, line_no,
                       "line " + std::to_string(line_no) + " has " + std::to_string(f.size()) +
                           " fields, expected 3");
    }
    const double score = score_at(f[2], line_no, 3);
    cells.push_back({index.add_customer(f[0]), index.add_product(f[1]), score});
  }
  if (cells.empty()) throw ParseError(ParseErrorKind::Empty, 0, "triplet CSV has no records");

  const std::size_t m = index.customer_keys().size();
  const std::size_t n = index.product_keys().size();
  std::vector<double> values(m * n, 0.0);
  for (const Cell& c : cells) values[static_cast<std::size_t>(c.u) * n + c.p] = c.score;
  return {RelevanceMatrix(m, n, std::move(values)), std::move(index)};
}

std::pair<RelevanceMatrix, EntityIndex> load_triplets_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  return parse_triplets_csv(in);
}

void write_dense_csv(const RelevanceMatrix& rel, const std::filesystem::path& path) {
  auto out = open_out(path);
  std::string text;
  for (std::size_t u = 0; u < rel.customers(); ++u) {
    const auto row = rel.row(static_cast<CustomerId>(u));
    for (std::size_t p = 0; p < row.size(); ++p) {
      if (p) text += ',';
      text += format_number(row[p]);
    }
    text += '\n';
  }
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// GL-CUSTOM scoring

double haversine_km(GeoPoint a, GeoPoint b) {
  constexpr double rad = std::numbers::pi / 180.0;
  const double dlat = (b.lat - a.lat) * rad;
  const double dlon = (b.lon - a.lon) * rad;
  const double s = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(a.lat * rad) * std::cos(b.lat * rad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(s)));
}

namespace {
void check_point(GeoPoint g, const char* what, std::size_t i) {
  if (!std::isfinite(g.lat) || !std::isfinite(g.lon) || g.lat < -90.0 || g.lat > 90.0 ||
      g.lon < -180.0 || g.lon > 180.0) {
    throw BadCoordinate(std::string(what) + " " + std::to_string(i) + " has invalid coordinate (" +
                        std::to_string(g.lat) + ", " + std::to_string(g.lon) + ")");
  }
}
}  // namespace

RelevanceMatrix gl_custom_scores(const std::vector<double>& ratings,
                                 const std::vector<GeoPoint>& customers,
                                 const std::vector<GeoPoint>& products) {
  if (ratings.size() != products.size()) {
    throw std::invalid_argument("one rating per product expected");
  }
  for (std::size_t i = 0; i < customers.size(); ++i) check_point(customers[i], "customer", i);
  for (std::size_t i = 0; i < products.size(); ++i) check_point(products[i], "product", i);
  const std::size_t m = customers.size();
  const std::size_t n = products.size();
  std::vector<double> values(m * n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t p = 0; p < n; ++p) {
      const double d = std::max(haversine_km(customers[u], products[p]), kMinDistanceKm);
      values[u * n + p] = ratings[p] / d;
    }
  }
  return RelevanceMatrix(m, n, std::move(values));
}

// ---------------------------------------------------------------------------
// Synthetic instances

Instance synth_instance(std::size_t m, std::size_t n, std::size_t k, Seed seed,
                        SynthDistribution distribution) {
  // Reject the shape before spending time on the values.
  validate_instance(RelevanceMatrix(m, n, std::vector<double>(m * n, 0.0)), k);
  Rng rng(seed);
  std::vector<double> values(m * n);
  for (std::size_t u = 0; u < m; ++u) {
    for (std::size_t p = 0; p < n; ++p) {
      double v = rng.unit();
      if (distribution == SynthDistribution::ZipfPopularity) {
        v = v / static_cast<double>(p + 1) + 0.01 * rng.unit();
      }
      values[u * n + p] = v;
    }
  }
  return validate_instance(RelevanceMatrix(m, n, std::move(values)), k);
}

// ---------------------------------------------------------------------------
// Allocation files

std::string format_allocation(const Allocation& alloc, const EntityIndex* index) {
  std::string text;
  for (const Bundle& b : alloc.bundles) {
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) text += ',';
      if (index) {
        if (b[i] >= index->product_keys().size()) {
          throw IdOutOfRange("product id " + std::to_string(b[i]) + " has no key");
        }
        text += index->product_keys()[b[i]];
      } else {
        text += std::to_string(b[i]);
      }
    }
    text += '\n';
  }
  return text;
}

void write_allocation(const Allocation& alloc, const EntityIndex* index,
                      const std::filesystem::path& path) {
  const std::string text = format_allocation(alloc, index);
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

Allocation parse_allocation(std::istream& in, const EntityIndex* index) {
  Allocation alloc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    Bundle bundle;
    if (!trim(line).empty()) {
      for (const std::string& field : split_fields(line)) {
        if (index) {
          const auto p = index->find_product(field);
          if (!p) {
            throw ParseError(ParseErrorKind::Syntax, line_no,
                             "unknown product key '" + field + "' at line " +
                                 std::to_string(line_no));
          }
          bundle.push_back(*p);
        } else {
          ProductId p = 0;
          auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), p);
          if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
            throw ParseError(ParseErrorKind::Syntax, line_no,
                             "bad product id '" + field + "' at line " + std::to_string(line_no));
          }
          bundle.push_back(p);
        }
      }
    }
    alloc.bundles.push_back(std::move(bundle));
  }
  return alloc;
}

Allocation read_allocation(const std::filesystem::path& path, const EntityIndex* index) {
  auto in = open_in(path);
  return parse_allocation(in, index);
}

// ---------------------------------------------------------------------------
// Reports

std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string report_json(const MetricsReport& r, const RunMetadata& meta) {
  nlohmann::ordered_json j;
  j["algorithm"] = meta.algorithm;
  j["m"] = meta.m;
  j["n"] = meta.n;
  j["k"] = meta.k;
  j["alpha"] = meta.alpha ? nlohmann::ordered_json(*meta.alpha) : nlohmann::ordered_json(nullptr);
  j["seed"] = meta.seed;
  j["h"] = r.h;
  j["z"] = r.z;
  j["l"] = r.l;
  j["y"] = r.y;
  j["mu_phi"] = r.mu_phi;
  j["std_phi"] = r.std_phi;
  j["ef1"] = r.ef1;
  j["alpha_mms_fraction"] = r.alpha_mms_fraction;
  j["elapsed_ms"] = meta.elapsed_ms;
  return j.dump(2) + "\n";
}

std::pair<MetricsReport, RunMetadata> parse_report_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    MetricsReport r;
    RunMetadata meta;
    meta.algorithm = j.at("algorithm").get<std::string>();
    meta.m = j.at("m").get<std::size_t>();
    meta.n = j.at("n").get<std::size_t>();
    meta.k = j.at("k").get<std::size_t>();
    if (!j.at("alpha").is_null()) meta.alpha = j.at("alpha").get<double>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.elapsed_ms = j.at("elapsed_ms").get<double>();
    r.h = j.at("h").get<double>();
    r.z = j.at("z").get<double>();
    r.l = j.at("l").get<double>();
    r.y = j.at("y").get<double>();
    r.mu_phi = j.at("mu_phi").get<double>();
    r.std_phi = j.at("std_phi").get<double>();
    r.ef1 = j.at("ef1").get<bool>();
    r.alpha_mms_fraction = j.at("alpha_mms_fraction").get<double>();
    return {r, meta};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(ParseErrorKind::Syntax, 0, std::string("bad report json: ") + e.what());
  }
}

std::string csv_header(bool with_timing) {
  std::string h = "algorithm,m,n,k,alpha,seed,h,z,l,y,mu_phi,std_phi,ef1,alpha_mms_fraction";
  if (with_timing) h += ",elapsed_ms";
  return h + "\n";
}

std::string csv_row(const MetricsReport& r, const RunMetadata& meta, bool with_timing) {
  std::string row = meta.algorithm + ',' + std::to_string(meta.m) + ',' + std::to_string(meta.n) +
                    ',' + std::to_string(meta.k) + ',' +
                    (meta.alpha ? format_number(*meta.alpha) : std::string()) + ',' +
                    std::to_string(meta.seed) + ',' + format_number(r.h) + ',' +
                    format_number(r.z) + ',' + format_number(r.l) + ',' + format_number(r.y) +
                    ',' + format_number(r.mu_phi) + ',' + format_number(r.std_phi) + ',' +
                    (r.ef1 ? "true" : "false") + ',' + format_number(r.alpha_mms_fraction);
  if (with_timing) row += ',' + format_number(meta.elapsed_ms);
  return row + "\n";
}

void write_report(const MetricsReport& report, const RunMetadata& meta,
                  const std::filesystem::path& path, ReportFormat format, bool with_timing) {
  if (format == ReportFormat::Json) {
    auto out = open_out(path);
    out << report_json(report, meta);
    if (!out) throw IoError("failed writing " + path.string());
    return;
  }
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  auto out = open_out(path, std::ios::app);
  if (fresh) out << csv_header(with_timing);
  out << csv_row(report, meta, with_timing);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace fairrec
