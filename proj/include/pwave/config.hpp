#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pwave/experiments.hpp"

namespace pwave {

/// One documented configuration key.
struct ConfigKey {
  std::string name;
  std::string fallback;  ///< default as written in a config file, empty when required or unset
  std::string meaning;
};

/// Every accepted key, in documentation order.
const std::vector<ConfigKey>& config_schema();

inline constexpr double kMinP = 1.1;
inline constexpr double kMaxP = 10.0;

/// Flat `key = value` configuration. Values keep their text form until an
/// experiment asks for them.
class RunConfig {
 public:
  /// Throws InputError listing unknown keys, duplicate keys or malformed lines.
  static RunConfig parse(std::istream& in, const std::string& origin = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  const std::string& experiment() const { return experiment_; }
  const std::string& output() const { return output_; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  std::string text(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key, double fallback) const;
  /// Throws InputError naming the key when it is absent.
  double required_number(const std::string& key) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const;
  std::vector<int> integers(const std::string& key, std::vector<int> fallback) const;

 private:
  std::string experiment_;
  std::string output_ = "out";
  std::map<std::string, std::string> values_;
};

struct RunOptions {
  bool oracle = false;
};

/// Validates the config for its experiment and runs it. Keys the experiment
/// ignores are reported as warnings.
ExperimentReport run_experiment(const RunConfig& config, const RunOptions& options = {});

CrossSectionDescriptor section_from_config(const RunConfig& config);
Numerics numerics_from_config(const RunConfig& config, const RunOptions& options = {});

/// Catalogue as printed by `pwave list`.
void print_catalogue(std::ostream& out);

}  // namespace pwave
