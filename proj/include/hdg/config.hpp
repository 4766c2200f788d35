#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "hdg/oracles.hpp"
#include "hdg/slice.hpp"

namespace hdg {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat `key = value` configuration with dotted namespaces (channel.L,
/// sector.alpha, slice.dt). `#` starts a comment; later entries override
/// earlier ones.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_text(const std::string& text, const std::string& origin = "<text>");

  // Applies one `key=value` override.
  void set(const std::string& assignment);
  void set(const std::string& key, const std::string& value);

  [[nodiscard]] bool contains(const std::string& key) const { return values_.count(key) != 0; }
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] int get_int(const std::string& key, int fallback) const;
  [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  [[nodiscard]] std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }
  // Keys that were never read, to catch typos.
  [[nodiscard]] std::vector<std::string> unused_keys(const std::string& prefix = "") const;
  // One line of `key=value` pairs in key order: explicit entries plus the
  // defaults returned by earlier reads.
  [[nodiscard]] std::string echo() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
  mutable std::map<std::string, std::string> defaults_;
};

std::vector<double> parse_doubles(const std::string& list);
std::vector<int> parse_ints(const std::string& list);

ChannelParams channel_params(const Config& config);
SectorParams sector_params(const Config& config);
ScenarioConfig slice_config(const Config& config, ScenarioKind kind);

}  // namespace hdg
