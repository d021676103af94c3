#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rpsde/error.hpp"
#include "rpsde/model.hpp"
#include "rpsde/noise.hpp"

namespace rpsde::app {

/// Validation failure; `problems()` lists every offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parsed experiment configuration.
///
/// Values are stored in canonical text form (reals with 17 significant
/// digits, lists comma separated), so serializing and re-parsing a config
/// gives an equal object. Keys that were not given fall back to the schema
/// defaults through the typed getters.
class ExperimentConfig {
 public:
  using Section = std::map<std::string, std::string>;

  bool has(const std::string& section, const std::string& key) const;

  double real(const std::string& section, const std::string& key) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::uint64_t seed() const;
  std::string text(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  std::vector<std::int64_t> integers(const std::string& section, const std::string& key) const;

  /// Replaces a value; it is re-validated and canonicalized.
  void set(const std::string& section, const std::string& key, const std::string& value);

  const std::map<std::string, Section>& values() const noexcept { return values_; }

  bool operator==(const ExperimentConfig&) const = default;

 private:
  friend ExperimentConfig parse_config(const std::string& text);
  std::map<std::string, Section> values_;
};

/// Parses INI text, rejecting unknown sections and keys and malformed values.
/// All problems are collected before a single ConfigError is thrown.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

/// Canonical INI text: sections and keys in sorted order.
std::string serialize_config(const ExperimentConfig& config);

/// The model described by [model]; throws ConfigError on bad coefficients.
SdeModel build_model(const ExperimentConfig& config);

/// The grid from [grid] and the model period.
GridSpec build_grid(const ExperimentConfig& config, double period);

/// Builds the model and grid and checks the section of `command`; every
/// problem is reported in one ConfigError.
void validate_for_command(const ExperimentConfig& config, const std::string& command);

/// Commands the runner understands.
const std::vector<std::string>& command_names();

}  // namespace rpsde::app
