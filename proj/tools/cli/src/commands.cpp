#include "fhmix_cli/commands.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>
#include <system_error>

#include "fhmix/error.hpp"
#include "fhmix/gaussian.hpp"
#include "fhmix/series.hpp"
#include "fhmix/version.hpp"

namespace fhmix::cli {

using nlohmann::ordered_json;

namespace {

ordered_json report_header(std::string_view command, const ExperimentConfig& config) {
  ordered_json r;
  r["tool"] = "fhmix";
  r["version"] = std::string(version_string());
  r["command"] = std::string(command);
  r["seed"] = config.experiment.seed;
  r["n"] = config.experiment.n;
  r["config"] = to_json(config);
  return r;
}

ordered_json to_json(const SeriesVerdict& v) {
  ordered_json out;
  out["status"] = std::string(to_string(v.status));
  if (v.converges()) out["limit_estimate"] = v.limit_estimate;
  if (v.undecided()) {
    out["horizon"] = v.horizon;
    out["partial_sum"] = v.partial_sum;
  }
  if (v.leading) {
    out["leading"] = {{"coeff", v.leading->coeff},
                      {"power", v.leading->power},
                      {"ratio", v.leading->ratio}};
  }
  return out;
}

ordered_json to_json(const DichotomyVerdict& v) {
  ordered_json reasons = ordered_json::array();
  for (auto r : v.reasons) reasons.push_back(std::string(to_string(r)));
  ordered_json out;
  out["status"] = std::string(to_string(v.status));
  out["reasons"] = reasons;
  out["hilbert_schmidt"] = to_json(v.hilbert_schmidt);
  out["cameron_martin"] = to_json(v.cameron_martin);
  out["warnings"] = v.warnings;
  return out;
}

ordered_json to_json(const LebesgueSplit& s) {
  return {{"ac_indices", s.ac_indices},
          {"s_indices", s.s_indices},
          {"ac_weight", s.ac_weight},
          {"s_weight", s.s_weight}};
}

ordered_json cells_json(const std::vector<std::pair<std::size_t, std::size_t>>& cells) {
  ordered_json out = ordered_json::array();
  for (const auto& [i, j] : cells) out.push_back({i, j});
  return out;
}

ordered_json partial_sum_or_null(const SequenceSpec& s, Transform t, std::size_t n) {
  try {
    return partial_sum(s, t, n);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::IndexBeyondHorizon) throw;
    return nullptr;
  }
}

std::string grid_table(const DichotomyMatrix& m) {
  std::size_t width = 0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      width = std::max(width, to_string(m.at(i, j).status).size());
  width = std::max<std::size_t>(width, 8) + 2;
  std::string out = fmt::format("{:<8}", "");
  for (std::size_t j = 0; j < m.cols(); ++j) out += fmt::format("{:<{}}", fmt::format("nu[{}]", j), width);
  out += "\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out += fmt::format("{:<8}", fmt::format("mu[{}]", i));
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out += fmt::format("{:<{}}", to_string(m.at(i, j).status), width);
    }
    out += "\n";
  }
  return out;
}

ordered_json estimate_json(const Estimate& e) {
  return {{"value", e.value}, {"stderr", e.std_error}, {"n", e.n}, {"seed", e.seed}};
}

void write_sample_csv(const std::filesystem::path& path, const SampleMatrix& s) {
  std::string out;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    for (Eigen::Index j = 0; j < s.cols(); ++j) {
      if (j > 0) out += ',';
      out += fmt::format("{}", s(i, j));
    }
    out += '\n';
  }
  write_atomic(path, out);
}

}  // namespace

CommandResult classify_pair(const ExperimentConfig& config) {
  if (config.mu.size() != 1 || config.nu.size() != 1) {
    throw ConfigError(config.mu.size() != 1 ? "mu.components" : "nu.components",
                      "classify-pair needs exactly one component in mu and in nu");
  }
  const GaussianSpec& gi = config.mu.components[0];
  const GaussianSpec& gj = config.nu.components[0];
  const DichotomyVerdict v = fh_classify(gi, gj);
  const TEigenvalues lambda = t_eigenvalues(gi, gj);

  CommandResult result;
  ordered_json& r = result.report = report_header("classify-pair", config);
  const ordered_json verdict = to_json(v);
  for (const auto& item : verdict.items()) r[item.key()] = item.value();
  if (lambda.is_sequence()) {
    r["lambda"] = {{"description", lambda.sequence().describe()}};
    if (const auto h = lambda.sequence().horizon()) r["lambda"]["horizon"] = *h;
  } else {
    r["lambda"] = {{"values", lambda.vector()}};
  }

  ordered_json sums = ordered_json::array();
  if (gi.is_diagonal()) {
    const SequenceSpec dm = gi.mean_sequence() - gj.mean_sequence();
    const SequenceSpec cm_terms = SequenceSpec::quotient(dm * dm, gi.variance_sequence());
    for (std::size_t c : config.experiment.checkpoints) {
      sums.push_back({{"n", c},
                      {"hilbert_schmidt",
                       partial_sum_or_null(lambda.sequence(), Transform::Square, c)},
                      {"cameron_martin", partial_sum_or_null(cm_terms, Transform::Identity, c)}});
    }
  }
  r["partial_sums"] = sums;

  result.conclusive = !v.undecided();
  result.summary = fmt::format("status: {}\n", to_string(v.status));
  for (auto reason : v.reasons) result.summary += fmt::format("reason: {}\n", to_string(reason));
  if (v.hilbert_schmidt.undecided()) {
    result.summary += fmt::format("horizon: {}\n", v.hilbert_schmidt.horizon);
  }
  return result;
}

CommandResult matrix(const ExperimentConfig& config) {
  const DichotomyMatrix m = dichotomy_matrix(config.mu, config.nu);
  const MixtureVerdict v = mixture_dichotomy(config.mu, config.nu, m);

  CommandResult result;
  ordered_json& r = result.report = report_header("matrix", config);
  r["status"] = std::string(to_string(v.status));
  ordered_json grid = ordered_json::array();
  ordered_json cells = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) {
      row.push_back(std::string(to_string(m.at(i, j).status)));
      ordered_json cell = {{"i", i}, {"j", j}};
      const ordered_json verdict = to_json(m.at(i, j));
      for (const auto& item : verdict.items()) cell[item.key()] = item.value();
      cells.push_back(cell);
    }
    grid.push_back(row);
  }
  r["grid"] = grid;
  r["cells"] = cells;
  r["split"] = v.split ? to_json(*v.split) : ordered_json(nullptr);
  r["ac_weight"] = v.split ? ordered_json(v.split->ac_weight) : ordered_json(nullptr);
  r["undecided_cells"] = cells_json(v.undecided_cells);

  result.conclusive = v.status != MixtureVerdict::Status::Undecided && v.split.has_value() ==
                                                                           (v.status == MixtureVerdict::Status::Mixed);
  result.summary = grid_table(m) + fmt::format("status: {}\n", to_string(v.status));
  if (v.split) result.summary += fmt::format("ac_weight: {}\n", v.split->ac_weight);
  for (const auto& [i, j] : v.undecided_cells) {
    result.summary += fmt::format("undecided: ({}, {})\n", i, j);
  }
  return result;
}

CommandResult separability(const ExperimentConfig& config, Parallelism par) {
  const ExperimentParams& e = config.experiment;
  const MixtureVerdict verdict = mixture_dichotomy(config.mu, config.nu);
  const SeparabilityReport curve = separability_curve(config.mu, config.nu, e.dims, e.n, e.seed,
                                                      par, CurveOptions{e.tau, e.priors});
  CommandResult result;
  ordered_json& r = result.report = report_header("separability", config);
  r["status"] = std::string(to_string(verdict.status));
  r["split"] = verdict.split ? to_json(*verdict.split) : ordered_json(nullptr);
  r["undecided_cells"] = cells_json(verdict.undecided_cells);
  r["tau"] = e.tau;
  r["priors"] = e.priors;

  std::string csv = std::string(kCurveCsvHeader) + "\n";
  ordered_json rows = ordered_json::array();
  for (const SeparabilityRow& row : curve.rows) {
    rows.push_back({{"dim", row.dim},
                    {"seed", row.seed},
                    {"affinity", row.affinity.aggregate},
                    {"affinity_upper_bound", row.affinity.upper_bound},
                    {"affinity_min", row.affinity.minimum},
                    {"mu_mass", row.masses.mu_mass},
                    {"nu_mass", row.masses.nu_mass},
                    {"mu_mass_stderr", row.masses.mu_std_error},
                    {"nu_mass_stderr", row.masses.nu_std_error},
                    {"bayes_error", estimate_json(row.bayes_error)}});
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", row.dim, row.affinity.aggregate,
                       row.masses.mu_mass, row.masses.nu_mass, row.bayes_error.value,
                       row.bayes_error.std_error, curve.n, row.seed);
  }
  r["rows"] = rows;
  bool monotone = true;
  for (std::size_t k = 1; k < curve.rows.size(); ++k) {
    monotone = monotone &&
               curve.rows[k].affinity.aggregate <= curve.rows[k - 1].affinity.aggregate;
  }
  if (!monotone) throw std::logic_error("aggregate affinity increased along the ladder");
  r["affinity_monotone"] = monotone;

  if (verdict.status == MixtureVerdict::Status::Mixed && verdict.split &&
      verdict.split->ac_weight > 0.0) {
    const ErrorFloorReport floor = estimate_error_floor(config.mu, config.nu, *verdict.split,
                                                        e.dims, e.n, e.seed, par, e.priors);
    ordered_json frows = ordered_json::array();
    for (const auto& row : floor.rows) {
      frows.push_back({{"dim", row.dim},
                       {"bayes_error", estimate_json(row.bayes_error)},
                       {"overlap_quadrature", row.overlap_quadrature
                                                  ? ordered_json(*row.overlap_quadrature)
                                                  : ordered_json(nullptr)}});
    }
    r["floor"] = {{"ac_weight", floor.ac_weight},
                  {"floor_estimate", floor.floor_estimate},
                  {"floor_stderr", floor.floor_std_error},
                  {"rows", frows}};
  }

  result.csv = std::move(csv);
  result.conclusive = verdict.status != MixtureVerdict::Status::Undecided;
  result.summary = fmt::format("status: {}\n{}", to_string(verdict.status), *result.csv);
  return result;
}

std::vector<std::filesystem::path> export_samples(const ExperimentConfig& config,
                                                  const std::filesystem::path& dir,
                                                  std::size_t rows, Parallelism par) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (std::size_t d : config.experiment.dims) {
    const std::uint64_t seed = dimension_seed(config.experiment.seed, d);
    const auto mu = sample(truncate(config.mu, d), rows, split_seed(seed, 0), par);
    const auto nu = sample(truncate(config.nu, d), rows, split_seed(seed, 1), par);
    for (const auto& [name, s] : {std::pair{"mu", &mu}, std::pair{"nu", &nu}}) {
      const auto path = dir / fmt::format("samples_{}_d{}.csv", name, d);
      write_sample_csv(path, *s);
      written.push_back(path);
    }
  }
  return written;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

}  // namespace fhmix::cli
