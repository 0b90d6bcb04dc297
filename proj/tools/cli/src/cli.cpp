#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

#include "fhmix/error.hpp"
#include "fhmix/version.hpp"
#include "fhmix_cli/commands.hpp"

namespace fhmix::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitInconclusive = 3;

struct Options {
  std::string config;
  std::string out;
  std::string csv;
  std::string export_dir;
  std::size_t export_rows = 1000;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  unsigned threads = 0;
  bool strict = false;
};

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config, "experiment configuration (JSON)")->required();
  sub.add_option("--out", o.out, "report path (JSON)")->required();
  sub.add_option("--seed", o.seed, "override experiment.seed");
  sub.add_option("--samples", o.samples, "override experiment.n")->check(CLI::PositiveNumber);
  sub.add_option("--threads", o.threads, "worker threads (0 = all cores)");
  sub.add_flag("--strict", o.strict, "exit 3 when the verdict is inconclusive");
}

std::filesystem::path default_csv_path(const std::filesystem::path& out) {
  std::filesystem::path p = out;
  return p.replace_extension(".csv");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equivalence and singularity of Gaussian measures and their mixtures", "fhmix"};
  app.set_version_flag("--version", std::string(version_string()));
  app.require_subcommand(1);

  Options o;
  CLI::App* classify = app.add_subcommand("classify-pair", "classify a pair of Gaussians");
  CLI::App* grid = app.add_subcommand("matrix", "pairwise dichotomy matrix of two mixtures");
  CLI::App* curve = app.add_subcommand("separability", "Monte Carlo separability curve");
  for (CLI::App* sub : {classify, grid, curve}) add_common(*sub, o);
  curve->add_option("--csv", o.csv, "curve CSV path (default: --out with .csv)");
  curve->add_option("--export-samples", o.export_dir, "directory for per-dimension draws");
  curve->add_option("--export-rows", o.export_rows, "draws per exported file")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    ExperimentConfig config = load_config(o.config);
    if (o.seed) config.experiment.seed = *o.seed;
    if (o.samples) config.experiment.n = *o.samples;
    const Parallelism par{o.threads};

    CommandResult result;
    if (classify->parsed()) {
      result = classify_pair(config);
    } else if (grid->parsed()) {
      result = matrix(config);
    } else {
      result = separability(config, par);
    }
    write_atomic(o.out, result.report.dump(2) + "\n");
    if (result.csv) {
      write_atomic(o.csv.empty() ? default_csv_path(o.out) : std::filesystem::path(o.csv),
                   *result.csv);
    }
    if (!o.export_dir.empty()) export_samples(config, o.export_dir, o.export_rows, par);
    out << result.summary;
    if (o.strict && !result.conclusive) {
      err << "fhmix: verdict is inconclusive (--strict)\n";
      return kExitInconclusive;
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "fhmix: config error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const Error& e) {
    err << "fhmix: validation error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "fhmix: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_cli(int argc, const char* const* argv) {
  return run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}

}  // namespace fhmix::cli
