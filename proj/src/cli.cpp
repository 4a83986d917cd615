#include "fairrec/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "fairrec/baselines.hpp"
#include "fairrec/metrics.hpp"

namespace fairrec::cli {

namespace {

const std::map<std::string, Algorithm>& algorithm_table() {
  static const std::map<std::string, Algorithm> table{
      {"fairrec", Algorithm::FairRec},       {"fairrecplus", Algorithm::FairRecPlus},
      {"top_k", Algorithm::TopK},            {"random_k", Algorithm::RandomK},
      {"poorest_k", Algorithm::PoorestK},    {"mixed_tr_k", Algorithm::MixedTrK},
      {"mixed_tp_k", Algorithm::MixedTpK},   {"mpb19", Algorithm::Mpb19},
  };
  return table;
}

/// Config problems detected after argument parsing.
class ConfigError : public Error {
 public:
  using Error::Error;
};

int exit_code_for(std::ostream& err, const std::exception& e) {
  int code = kInputError;
  if (const auto* ie = dynamic_cast<const InstanceError*>(&e)) {
    code = ie->kind() == InstanceErrorKind::BadValue ? kInputError : kInfeasible;
  } else if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const std::invalid_argument*>(&e)) {
    code = kConfigError;
  }
  err << "error: " << e.what() << "\n";
  spdlog::debug("exit {} after: {}", code, e.what());
  return code;
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const std::exception& e) {
    return exit_code_for(err, e);
  }
}

Ordering make_ordering(bool shuffled, std::size_t m, Seed seed) {
  if (!shuffled) return identity_ordering(m);
  // Decorrelate the ordering stream from the algorithm's own draws.
  Rng rng(Seed{seed.value ^ 0x9E3779B97F4A7C15ull});
  return rng.permutation(m);
}

ExposurePolicy resolve_policy(const RunConfig& cfg, std::size_t n) {
  if (cfg.alpha_file && cfg.alpha_from_ratings) {
    throw ConfigError("--alpha-file and --alpha-from-ratings are mutually exclusive");
  }
  std::optional<std::vector<double>> per_product;
  if (cfg.alpha_file) per_product = read_column(*cfg.alpha_file);
  if (cfg.alpha_from_ratings) per_product = alphas_from_ratings(read_column(*cfg.alpha_from_ratings));
  if (per_product) {
    if (cfg.alpha) throw ConfigError("--alpha cannot be combined with per-producer alphas");
    if (per_product->size() != n) {
      throw ConfigError("per-producer alpha file has " + std::to_string(per_product->size()) +
                        " values for " + std::to_string(n) + " products");
    }
    return ExposurePolicy::per_producer(std::move(*per_product));
  }
  const double a = cfg.alpha.value_or(1.0);
  if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  return ExposurePolicy::global(a);
}

void validate_config(const RunConfig& cfg) {
  const bool per_producer = cfg.alpha_file || cfg.alpha_from_ratings;
  if (!uses_alpha(cfg.algorithm) && (cfg.alpha || per_producer)) {
    throw ConfigError("alpha only applies to fairrec and fairrecplus");
  }
  if (cfg.emit_phase_metrics && !uses_alpha(cfg.algorithm)) {
    throw ConfigError("--phase-metrics needs fairrec or fairrecplus");
  }
  if (cfg.k == 0) throw ConfigError("--k must be positive");
}

struct Cell {
  Allocation alloc;
  MetricsReport report;
  RunMetadata meta;
  std::optional<MetricsReport> phase_report;
};

Cell run_cell(Algorithm algo, const Instance& inst, const ExposurePolicy& policy, Seed seed,
              bool shuffled, const ExposureVector& topk_exposure, bool phase_metrics) {
  const Ordering order = make_ordering(shuffled, inst.customers(), seed);
  const auto start = std::chrono::steady_clock::now();
  Allocation alloc = run_algorithm(algo, inst, policy, order, seed);
  const auto stop = std::chrono::steady_clock::now();

  Cell c;
  c.meta.algorithm = algorithm_name(algo);
  c.meta.m = inst.customers();
  c.meta.n = inst.products();
  c.meta.k = inst.k();
  if (policy.is_global()) c.meta.alpha = policy.global_alpha();
  c.meta.seed = seed.value;
  c.meta.elapsed_ms = std::chrono::duration<double, std::milli>(stop - start).count();

  // Baselines ignore the policy when allocating but are scored against it.
  c.report = evaluate(inst, alloc, policy, topk_exposure);
  if (phase_metrics && uses_alpha(algo)) {
    const Allocation first = algo == Algorithm::FairRec
                                 ? fairrec_phase_one(inst, policy, order)
                                 : fairrecplus_phase_one(inst, policy, order);
    c.phase_report = evaluate(inst, first, policy, topk_exposure, /*partial=*/true);
  }
  c.alloc = std::move(alloc);
  spdlog::info("{} m={} n={} k={} done in {:.3f} ms", c.meta.algorithm, c.meta.m, c.meta.n,
               c.meta.k, c.meta.elapsed_ms);
  return c;
}

std::filesystem::path phase_path(const std::filesystem::path& report) {
  std::filesystem::path p = report;
  p.replace_filename(report.stem().string() + ".phase1" + report.extension().string());
  return p;
}

void configure_logging() {
  static bool done = false;
  if (done) return;
  done = true;
  auto logger = spdlog::stderr_logger_st("fairrec");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::err);
  if (const char* env = std::getenv("FAIRREC_LOG")) {
    const std::string level(env);
    if (level == "info") spdlog::set_level(spdlog::level::info);
    if (level == "debug") spdlog::set_level(spdlog::level::debug);
  }
}

}  // namespace

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  const auto& t = algorithm_table();
  auto it = t.find(name);
  if (it == t.end()) return std::nullopt;
  return it->second;
}

std::string algorithm_name(Algorithm a) {
  for (const auto& [name, algo] : algorithm_table()) {
    if (algo == a) return name;
  }
  return "unknown";
}

bool uses_alpha(Algorithm a) { return a == Algorithm::FairRec || a == Algorithm::FairRecPlus; }

bool uses_seed(Algorithm a) { return a == Algorithm::RandomK || a == Algorithm::MixedTrK; }

LoadedData load_input(const std::filesystem::path& path, InputFormat format) {
  if (format == InputFormat::Dense) return {load_dense_csv(path), std::nullopt};
  auto [rel, index] = load_triplets_csv(path);
  return {std::move(rel), std::move(index)};
}

std::vector<double> read_column(const std::filesystem::path& path) {
  const RelevanceMatrix col = load_dense_csv(path);
  if (col.products() != 1) {
    throw ParseError(ParseErrorKind::Ragged, 0, path.string() + " must have exactly one column");
  }
  return {col.values().begin(), col.values().end()};
}

std::vector<double> alphas_from_ratings(const std::vector<double>& ratings) {
  std::vector<double> alphas(ratings.size());
  for (std::size_t p = 0; p < ratings.size(); ++p) {
    alphas[p] = std::floor(ratings[p]) / 5.0;  // 0.2 * floor(rating)
    if (alphas[p] > 1.0) {
      throw ConfigError("rating " + std::to_string(ratings[p]) + " of product " +
                        std::to_string(p) + " maps above alpha = 1");
    }
  }
  return alphas;
}

Allocation run_algorithm(Algorithm algo, const Instance& inst, const ExposurePolicy& policy,
                         const Ordering& order, Seed seed) {
  switch (algo) {
    case Algorithm::FairRec: return fairrec(inst, policy, order);
    case Algorithm::FairRecPlus: return fairrecplus(inst, policy, order);
    case Algorithm::TopK: return top_k(inst);
    case Algorithm::RandomK: return random_k(inst, seed);
    case Algorithm::PoorestK: return poorest_k(inst);
    case Algorithm::MixedTrK: return mixed_tr_k(inst, seed);
    case Algorithm::MixedTpK: return mixed_tp_k(inst);
    case Algorithm::Mpb19: return mpb19(inst);
  }
  throw std::logic_error("unhandled algorithm");
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  configure_logging();
  return guarded(err, [&] {
    validate_config(cfg);
    LoadedData data = load_input(cfg.input, cfg.input_format);
    const std::size_t n = data.relevance.products();
    const Instance inst = validate_instance(std::move(data.relevance), cfg.k);
    const ExposurePolicy policy = resolve_policy(cfg, n);
    const ExposureVector topk_exposure = exposures_of(top_k(inst), n);

    Cell c = run_cell(cfg.algorithm, inst, policy, cfg.seed, cfg.shuffled_ordering, topk_exposure,
                      cfg.emit_phase_metrics);
    const EntityIndex* index = data.index ? &*data.index : nullptr;
    if (cfg.out_alloc) write_allocation(c.alloc, index, *cfg.out_alloc);
    if (cfg.out_report) {
      write_report(c.report, c.meta, *cfg.out_report, cfg.report_format, cfg.timing);
      if (c.phase_report) {
        RunMetadata meta = c.meta;
        meta.algorithm += ":phase1";
        write_report(*c.phase_report, meta, phase_path(*cfg.out_report), cfg.report_format,
                     cfg.timing);
      }
    } else {
      out << report_json(c.report, c.meta);
    }
    return static_cast<int>(kOk);
  });
}

int cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<double>& values,
              const std::vector<Algorithm>& algorithms, std::ostream& out, std::ostream& err) {
  configure_logging();
  return guarded(err, [&] {
    if (values.empty() || algorithms.empty()) throw ConfigError("sweep needs values and algorithms");
    if (!cfg.out_report) throw ConfigError("sweep needs --out-report");
    if (axis == SweepAxis::K) {
      for (double v : values) {
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("k values must be positive integers");
      }
    } else {
      if (cfg.k == 0) throw ConfigError("--k must be positive");
      for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("alpha values must lie in [0, 1]");
      }
    }
    const LoadedData data = load_input(cfg.input, cfg.input_format);
    const std::size_t n = data.relevance.products();

    struct Spec {
      Algorithm algo;
      std::size_t k;
      ExposurePolicy policy;
      Seed seed;
    };
    std::vector<Spec> specs;
    std::map<std::size_t, Instance> instances;
    for (std::size_t a = 0; a < algorithms.size(); ++a) {
      for (std::size_t i = 0; i < values.size(); ++i) {
        const std::size_t cell = a * values.size() + i;
        RunConfig c = cfg;
        c.algorithm = algorithms[a];
        if (axis == SweepAxis::K) {
          c.k = static_cast<std::size_t>(values[i]);
        } else {
          c.alpha = values[i];
          c.alpha_file.reset();
          c.alpha_from_ratings.reset();
        }
        c.emit_phase_metrics = false;
        if (!instances.contains(c.k)) {
          try {
            instances.emplace(c.k, validate_instance(data.relevance, c.k));
          } catch (const InstanceError& e) {
            throw InstanceError(e.kind(), "cell " + std::to_string(cell) + " (" +
                                              algorithm_name(c.algorithm) + ", k=" +
                                              std::to_string(c.k) + "): " + e.what());
          }
        }
        specs.push_back({c.algorithm, c.k, resolve_policy(c, n), Seed{cfg.seed.value + cell}});
      }
    }

    std::map<std::size_t, ExposureVector> topk_exposure;
    for (const auto& [k, inst] : instances) topk_exposure.emplace(k, exposures_of(top_k(inst), n));

    std::vector<std::string> rows(specs.size());
    auto work = [&](std::size_t i) {
      const Spec& s = specs[i];
      const Cell c = run_cell(s.algo, instances.at(s.k), s.policy, s.seed, cfg.shuffled_ordering,
                              topk_exposure.at(s.k), false);
      rows[i] = csv_row(c.report, c.meta, cfg.timing);
    };
    if (cfg.parallel) {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> failures(specs.size());
      const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                               static_cast<unsigned>(specs.size())));
      {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
          pool.emplace_back([&] {
            for (std::size_t i = next++; i < specs.size(); i = next++) {
              try {
                work(i);
              } catch (...) {
                failures[i] = std::current_exception();
              }
            }
          });
        }
      }
      for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    } else {
      for (std::size_t i = 0; i < specs.size(); ++i) work(i);
    }

    std::error_code ec;
    const bool fresh = !std::filesystem::exists(*cfg.out_report, ec) ||
                       std::filesystem::file_size(*cfg.out_report, ec) == 0;
    std::ofstream file(*cfg.out_report, std::ios::binary | std::ios::app);
    if (!file) throw IoError("cannot write " + cfg.out_report->string());
    if (fresh) file << csv_header(cfg.timing);
    for (const auto& r : rows) file << r;
    if (!file) throw IoError("failed writing " + cfg.out_report->string());
    out << "wrote " << rows.size() << " rows to " << cfg.out_report->string() << "\n";
    return static_cast<int>(kOk);
  });
}

int cmd_check(const std::filesystem::path& instance, InputFormat format,
              const std::filesystem::path& allocation, double alpha, std::optional<std::size_t> k,
              std::ostream& out, std::ostream& err) {
  configure_logging();
  return guarded(err, [&] {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
    LoadedData data = load_input(instance, format);
    const EntityIndex* index = data.index ? &*data.index : nullptr;
    const Allocation alloc = read_allocation(allocation, index);
    const std::size_t m = data.relevance.customers();
    const std::size_t n = data.relevance.products();
    if (alloc.customers() != m) {
      throw ParseError(ParseErrorKind::Syntax, 0,
                       "allocation has " + std::to_string(alloc.customers()) +
                           " bundles for " + std::to_string(m) + " customers");
    }
    const ExposureVector exposure = exposures_of(alloc, n);
    const std::size_t kk = k.value_or(alloc.bundles.front().size());
    const Instance inst = validate_instance(std::move(data.relevance), kk);

    bool all = true;
    auto report = [&](const std::string& name, bool ok, const std::string& detail) {
      out << (ok ? "PASS " : "FAIL ") << name << (detail.empty() ? "" : ": " + detail) << "\n";
      all = all && ok;
    };

    std::size_t wrong_size = 0;
    for (const auto& b : alloc.bundles) wrong_size += b.size() != kk;
    report("exact-k", wrong_size == 0,
           wrong_size ? std::to_string(wrong_size) + " bundles differ from k=" + std::to_string(kk)
                      : "");
    report("distinct", bundles_distinct(alloc), "");
    report("ef1", is_ef1(inst.relevance(), alloc), "");

    const std::size_t threshold = mms_threshold(m, n, kk, alpha);
    const std::size_t unexposed =
        static_cast<std::size_t>(std::count(exposure.begin(), exposure.end(), std::size_t{0}));
    if (threshold >= 1) {
      report("exposure>=1", unexposed == 0,
             unexposed ? std::to_string(unexposed) + " producers without exposure" : "");
    } else {
      out << "SKIP exposure>=1: alpha-scaled share is 0\n";
    }
    const std::vector<std::size_t> thresholds(n, threshold);
    const std::size_t satisfied = count_at_threshold(exposure, thresholds);
    report("alpha-mms-bound", meets_alpha_mms_bound(satisfied, n, m, threshold),
           std::to_string(satisfied) + "/" + std::to_string(n) + " at threshold " +
               std::to_string(threshold) + ", bound " +
               format_number(alpha_mms_lower_bound(m, threshold)));
    return static_cast<int>(all ? kOk : kCheckFailed);
  });
}

int cmd_gen(std::size_t m, std::size_t n, std::size_t k, Seed seed,
            SynthDistribution distribution, const std::filesystem::path& path, std::ostream& out,
            std::ostream& err) {
  configure_logging();
  return guarded(err, [&] {
    if (m == 0 || n == 0 || k == 0) {
      throw InstanceError(InstanceErrorKind::TooFewCustomers, "m, n and k must be positive");
    }
    const Instance inst = synth_instance(m, n, k, seed, distribution);
    write_dense_csv(inst.relevance(), path);
    out << "wrote " << m << "x" << n << " instance to " << path.string() << "\n";
    return static_cast<int>(kOk);
  });
}

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Two-sided fair recommendation: FairRec, FairRecPlus and baselines"};
  app.require_subcommand(1);

  const std::map<std::string, InputFormat> formats{{"dense", InputFormat::Dense},
                                                   {"triplets", InputFormat::Triplets}};

  RunConfig cfg;
  std::string algo = "fairrec";
  std::string ordering = "identity";
  std::string report_format = "json";
  double alpha_value = 1.0;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", cfg.input, "Relevance data")->required();
    sub->add_option("--input-format", cfg.input_format, "dense or triplets")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--seed", seed, "Base seed");
    sub->add_option("--ordering", ordering, "identity or shuffled")
        ->check(CLI::IsMember({"identity", "shuffled"}));
    sub->add_option("--alpha-file", cfg.alpha_file, "One alpha per product");
    sub->add_option("--alpha-from-ratings", cfg.alpha_from_ratings,
                    "One rating per product; alpha = 0.2 * floor(rating)");
    sub->add_option("--out-report", cfg.out_report, "Report path");
    sub->add_option("--report-format", report_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    sub->add_flag("--timing", cfg.timing, "Add elapsed_ms to CSV rows");
  };

  CLI::App* run = app.add_subcommand("run", "Run one algorithm and report metrics");
  add_common(run);
  run->add_option("--algo", algo, "Algorithm")->required();
  run->add_option("--k", cfg.k, "Recommendation size")->required();
  auto* alpha_opt = run->add_option("--alpha", alpha_value, "Global alpha in [0, 1]");
  run->add_option("--out-alloc", cfg.out_alloc, "Allocation output path");
  run->add_flag("--phase-metrics", cfg.emit_phase_metrics, "Also report phase-1 metrics");

  CLI::App* sweep = app.add_subcommand("sweep", "Algorithms x (k or alpha) grid into CSV rows");
  add_common(sweep);
  std::vector<std::string> sweep_algos;
  std::vector<double> sweep_k;
  std::vector<double> sweep_alpha;
  std::string axis = "alpha";
  sweep->add_option("--algo", sweep_algos, "Algorithms (comma separated)")
      ->required()
      ->delimiter(',');
  sweep->add_option("--axis", axis, "k or alpha")->check(CLI::IsMember({"k", "alpha"}));
  sweep->add_option("--k", sweep_k, "k value(s)")->required()->delimiter(',');
  sweep->add_option("--alpha", sweep_alpha, "alpha value(s)")->delimiter(',');
  sweep->add_flag("--parallel", cfg.parallel, "Evaluate cells concurrently");

  CLI::App* check = app.add_subcommand("check", "Verify an allocation's fairness properties");
  std::filesystem::path check_input;
  std::filesystem::path check_alloc;
  InputFormat check_format = InputFormat::Dense;
  double check_alpha = 1.0;
  std::optional<std::size_t> check_k;
  check->add_option("--input", check_input, "Relevance data")->required();
  check->add_option("--input-format", check_format, "dense or triplets")
      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  check->add_option("--alloc", check_alloc, "Allocation file")->required();
  check->add_option("--alpha", check_alpha, "alpha used to produce the allocation");
  check->add_option("--k", check_k, "Expected bundle size (default: first bundle's size)");

  CLI::App* gen = app.add_subcommand("gen", "Write a synthetic dense instance");
  std::size_t gm = 0, gn = 0, gk = 0;
  std::uint64_t gseed = 0;
  std::string dist = "uniform01";
  std::filesystem::path gout;
  gen->add_option("--m", gm, "Customers")->required();
  gen->add_option("--n", gn, "Products")->required();
  gen->add_option("--k", gk, "Recommendation size")->required();
  gen->add_option("--seed", gseed, "Seed");
  gen->add_option("--dist", dist, "uniform01 or zipf")->check(CLI::IsMember({"uniform01", "zipf"}));
  gen->add_option("--out", gout, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(kConfigError);
  }

  cfg.seed = Seed{seed};
  cfg.shuffled_ordering = ordering == "shuffled";
  cfg.report_format = report_format == "csv" ? ReportFormat::CsvRow : ReportFormat::Json;

  if (run->parsed()) {
    const auto a = parse_algorithm(algo);
    if (!a) {
      std::cerr << "error: unknown algorithm '" << algo << "'\n";
      return kConfigError;
    }
    cfg.algorithm = *a;
    if (alpha_opt->count() > 0) cfg.alpha = alpha_value;
    return cmd_run(cfg, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    std::vector<Algorithm> algos;
    for (const auto& name : sweep_algos) {
      const auto a = parse_algorithm(name);
      if (!a) {
        std::cerr << "error: unknown algorithm '" << name << "'\n";
        return kConfigError;
      }
      algos.push_back(*a);
    }
    const SweepAxis ax = axis == "k" ? SweepAxis::K : SweepAxis::Alpha;
    std::vector<double> values;
    if (ax == SweepAxis::K) {
      values = sweep_k;
      if (sweep_alpha.size() > 1) {
        std::cerr << "error: a k sweep takes a single --alpha\n";
        return kConfigError;
      }
      if (!sweep_alpha.empty()) cfg.alpha = sweep_alpha.front();
    } else {
      values = sweep_alpha;
      if (sweep_k.size() != 1) {
        std::cerr << "error: an alpha sweep takes a single --k\n";
        return kConfigError;
      }
      cfg.k = static_cast<std::size_t>(sweep_k.front());
    }
    return cmd_sweep(cfg, ax, values, algos, std::cout, std::cerr);
  }
  if (check->parsed()) {
    return cmd_check(check_input, check_format, check_alloc, check_alpha, check_k, std::cout,
                     std::cerr);
  }
  const SynthDistribution d =
      dist == "zipf" ? SynthDistribution::ZipfPopularity : SynthDistribution::Uniform01;
  return cmd_gen(gm, gn, gk, Seed{gseed}, d, gout, std::cout, std::cerr);
}

}  // namespace fairrec::cli
