#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fhmix/parallel.hpp"
#include "fhmix_cli/config.hpp"
#include "json.hpp"

namespace fhmix::cli {

/// Column header of the per-dimension CSV.
inline constexpr std::string_view kCurveCsvHeader =
    "dim,affinity,mu_mass,nu_mass,bayes_error,stderr,n,seed";

struct CommandResult {
  nlohmann::ordered_json report;
  /// Per-dimension curve (separability only).
  std::optional<std::string> csv;
  /// Human-readable summary for stdout.
  std::string summary;
  /// False when the verdict is inconclusive (drives --strict).
  bool conclusive = true;
};

/// Both mixtures must contain exactly one component.
CommandResult classify_pair(const ExperimentConfig& config);
CommandResult matrix(const ExperimentConfig& config);
CommandResult separability(const ExperimentConfig& config, Parallelism par = {});

/// Writes the first `rows` draws of mu_d and nu_d for every d of the ladder
/// to `dir/samples_{mu,nu}_d<d>.csv`. Seeds follow the curve's per-d seeds.
std::vector<std::filesystem::path> export_samples(const ExperimentConfig& config,
                                                  const std::filesystem::path& dir,
                                                  std::size_t rows, Parallelism par = {});

/// Writes `content` to a sibling temp file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// Full command line: `fhmix <subcommand> --config ... --out ...`.
/// Returns the process exit code: 0 ok, 1 unexpected failure, 2 config or
/// validation error, 3 inconclusive verdict under --strict.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace fhmix::cli
