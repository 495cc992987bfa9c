#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "radnmt/composition.hpp"
#include "radnmt/metrics.hpp"
#include "radnmt/vocabulary.hpp"

namespace radnmt {

/// Everything one training/evaluation run depends on.
///
/// File format: UTF-8 text, one `key = value` per line, '#' starts a comment
/// line, blank lines are ignored. Unknown keys are rejected. `dev.source` and
/// `dev.refs` default to the training files when absent.
struct ExperimentConfig {
  std::string train_source;
  std::string train_target;
  std::string dev_source;
  std::vector<std::string> dev_refs;  // comma-separated in the file
  std::string table;
  std::string output_dir;

  CompositionSetting setting = CompositionSetting::WCR;
  int embedding = 620;
  int hidden = 1000;
  VocabSizes vocab;
  std::size_t max_len = 50;
  std::size_t batch_size = 32;

  double dropout = 0.5;
  double clip_norm = 1.0;
  double rho = 0.95;
  double epsilon = 1e-6;

  int beam = 10;
  std::size_t max_updates = 1000;
  std::size_t validate_every = 100;
  std::uint64_t seed = 1234;
  unsigned threads = 1;

  HleporParams hlepor;

  bool operator==(const ExperimentConfig&) const = default;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  /// Makes relative paths relative to `base` instead of the working directory.
  void resolve_paths(const std::filesystem::path& base);
  /// Canonical text form; parse_config(to_string()) == *this.
  std::string to_string() const;
  /// 16 hex digits over the canonical text, ignoring output_dir.
  std::string hash() const;
};

/// Throws ConfigError (with line number) on malformed lines, unknown keys,
/// bad values, or missing required keys.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
/// Parses and resolves relative paths against the file's directory.
ExperimentConfig load_config_file(const std::string& path);

}  // namespace radnmt
