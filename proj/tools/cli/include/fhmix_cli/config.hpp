#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fhmix/mixture.hpp"
#include "fhmix/montecarlo.hpp"
#include "json.hpp"

namespace fhmix::cli {

inline constexpr int kSchemaVersion = 1;

struct ExperimentParams {
  std::vector<std::size_t> dims{1, 10, 100, 1000};
  std::size_t n = 10000;
  std::uint64_t seed = 0;
  Priors priors{0.5, 0.5};
  double tau = 0.0;
  /// Partial-sum checkpoints reported by classify-pair.
  std::vector<std::size_t> checkpoints{10, 100, 1000};

  friend bool operator==(const ExperimentParams&, const ExperimentParams&) = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  MixtureSpec mu;
  MixtureSpec nu;
  ExperimentParams experiment;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Malformed or ill-typed configuration. `field` is a dotted path such as
/// "mu.components[0].variance.alpha"; line and column are set for syntax
/// errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, std::string message, std::optional<std::size_t> line = {},
              std::optional<std::size_t> column = {});

  const std::string& field() const noexcept { return field_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  std::string field_;
  std::optional<std::size_t> line_;
  std::optional<std::size_t> column_;
};

/// Parses and validates a config document. Library validation failures
/// (fhmix::Error) propagate unchanged.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
nlohmann::ordered_json to_json(const SequenceSpec& s);
nlohmann::ordered_json to_json(const MixtureSpec& m);

/// Pretty-printed JSON, LF line endings, trailing newline.
std::string serialize_config(const ExperimentConfig& config);

}  // namespace fhmix::cli
