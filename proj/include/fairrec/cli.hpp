#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairrec/allocation.hpp"
#include "fairrec/io.hpp"
#include "fairrec/random.hpp"

namespace fairrec::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kInputError = 3,
  kInfeasible = 4,
  kCheckFailed = 5,
};

enum class Algorithm { FairRec, FairRecPlus, TopK, RandomK, PoorestK, MixedTrK, MixedTpK, Mpb19 };

std::optional<Algorithm> parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm a);
bool uses_alpha(Algorithm a);
bool uses_seed(Algorithm a);

enum class InputFormat { Dense, Triplets };

struct RunConfig {
  Algorithm algorithm = Algorithm::FairRec;
  std::size_t k = 0;
  std::optional<double> alpha;
  std::optional<std::filesystem::path> alpha_file;          // one alpha per product
  std::optional<std::filesystem::path> alpha_from_ratings;  // alpha_p = 0.2 * floor(rating_p)
  Seed seed{};
  bool shuffled_ordering = false;
  std::filesystem::path input;
  InputFormat input_format = InputFormat::Dense;
  std::optional<std::filesystem::path> out_alloc;
  std::optional<std::filesystem::path> out_report;
  ReportFormat report_format = ReportFormat::Json;
  bool emit_phase_metrics = false;
  bool parallel = false;
  bool timing = false;  // elapsed_ms column in CSV rows
};

enum class SweepAxis { K, Alpha };

/// Loaded relevance data plus the product index when keys were external.
struct LoadedData {
  RelevanceMatrix relevance;
  std::optional<EntityIndex> index;
};

LoadedData load_input(const std::filesystem::path& path, InputFormat format);

/// One-column CSV of per-product alphas, or ratings mapped through
/// 0.2 * floor(rating).
std::vector<double> read_column(const std::filesystem::path& path);
std::vector<double> alphas_from_ratings(const std::vector<double>& ratings);

Allocation run_algorithm(Algorithm algo, const Instance& inst, const ExposurePolicy& policy,
                         const Ordering& order, Seed seed);

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, SweepAxis axis, const std::vector<double>& values,
              const std::vector<Algorithm>& algorithms, std::ostream& out, std::ostream& err);
int cmd_check(const std::filesystem::path& instance, InputFormat format,
              const std::filesystem::path& allocation, double alpha, std::optional<std::size_t> k,
              std::ostream& out, std::ostream& err);
int cmd_gen(std::size_t m, std::size_t n, std::size_t k, Seed seed,
            SynthDistribution distribution, const std::filesystem::path& path, std::ostream& out,
            std::ostream& err);

/// Entry point behind the `fairrec` binary.
int main(int argc, char** argv);

}  // namespace fairrec::cli
