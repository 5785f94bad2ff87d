#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlgb/baselines.hpp"
#include "mlgb/lflf.hpp"

namespace mlgb {

/// One `key = value` line. Values use JSON scalar/array syntax; a bare word
/// is read as a string.
struct ConfigEntry {
  std::string key;
  nlohmann::json value;
  std::size_t line = 0;
};

/// Flat TOML-style file: top-level entries live in section "".
struct ConfigFile {
  std::filesystem::path source;
  std::map<std::string, std::vector<ConfigEntry>> sections;

  const std::vector<ConfigEntry>* section(const std::string& name) const;
};

/// Parses text; collects every malformed line and throws ConfigError listing
/// them as "source:line: message".
ConfigFile parse_config(const std::string& text, const std::filesystem::path& source = "<config>");
ConfigFile read_config(const std::filesystem::path& file);

/// Model names accepted by train and benchmark.
const std::vector<std::string>& model_names();
bool is_lflf_model(const std::string& name);

/// Applies entries to a config; returns one message per unknown key or
/// badly typed value instead of throwing.
std::vector<std::string> apply_overrides(LflfConfig& cfg, const std::vector<ConfigEntry>& entries,
                                         const std::filesystem::path& source);
std::vector<std::string> apply_overrides(BaselineConfig& cfg, const std::vector<ConfigEntry>& entries,
                                         const std::filesystem::path& source);

/// Default configs for a model name with `entries` applied. Throws ConfigError.
LflfConfig lflf_config_for(const std::string& model, const std::vector<ConfigEntry>& entries,
                           const std::filesystem::path& source = "<config>");
BaselineConfig baseline_config_for(const std::string& model, const std::vector<ConfigEntry>& entries,
                                   const std::filesystem::path& source = "<config>");

/// Plain-text echo in the same key = value format.
std::string echo(const LflfConfig& cfg);
std::string echo(const BaselineConfig& cfg);

/// Benchmark description:
///
///   datasets = ["data/a", "data/b"]     # relative to the config file
///   models = ["mlp", "lflf-gcn"]
///   seeds = [0, 1, 2]
///   output_dir = "results"              # optional
///   readout_l2 = 1.0                    # optional
///
///   [lflf-gcn]                          # per-model overrides
///   hidden_dim = 64
struct BenchConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<std::string> models;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;
  double readout_l2 = 1.0;
  std::map<std::string, std::vector<ConfigEntry>> overrides;
};

/// Reads and cross-checks a benchmark config, reporting all problems at once
/// via ConfigError.
BenchConfig validate_config(const std::filesystem::path& file);
BenchConfig validate_config(const ConfigFile& file);

}  // namespace mlgb
