#include "hdg/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hdg/output.hpp"

namespace hdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': '" + text + "' is not a number");
  }
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError("key '" + key + "': '" + text + "' is not an integer");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(list);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<double> parse_doubles(const std::string& list) {
  std::vector<double> out;
  for (const auto& s : split_list(list)) out.push_back(to_double("list", s));
  return out;
}

std::vector<int> parse_ints(const std::string& list) {
  std::vector<int> out;
  for (const auto& s : split_list(list)) out.push_back(to_int("list", s));
  return out;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str(), path);
}

Config Config::from_text(const std::string& text, const std::string& origin) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    }
    c.set(line);
  }
  return c;
}

void Config::set(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void Config::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of(" \t") != std::string::npos) throw ConfigError("invalid key '" + key + "'");
  values_[key] = value;
  used_[key] = false;
}

double Config::get_double(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    defaults_[key] = format_number(fallback);
    return fallback;
  }
  used_[key] = true;
  return to_double(key, it->second);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    defaults_[key] = std::to_string(fallback);
    return fallback;
  }
  used_[key] = true;
  return to_int(key, it->second);
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    defaults_[key] = fallback ? "true" : "false";
    return fallback;
  }
  used_[key] = true;
  std::string v = it->second;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': '" + it->second + "' is not a boolean");
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    defaults_[key] = fallback;
    return fallback;
  }
  used_[key] = true;
  return it->second;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    std::string v;
    for (double x : fallback) v += (v.empty() ? "" : ",") + format_number(x);
    defaults_[key] = v;
    return fallback;
  }
  used_[key] = true;
  std::vector<double> out;
  for (const auto& s : split_list(it->second)) out.push_back(to_double(key, s));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    std::string v;
    for (int x : fallback) v += (v.empty() ? "" : ",") + std::to_string(x);
    defaults_[key] = v;
    return fallback;
  }
  used_[key] = true;
  std::vector<int> out;
  for (const auto& s : split_list(it->second)) out.push_back(to_int(key, s));
  return out;
}

std::vector<std::string> Config::unused_keys(const std::string& prefix) const {
  std::vector<std::string> out;
  for (const auto& [k, used] : used_)
    if (!used && k.rfind(prefix, 0) == 0) out.push_back(k);
  return out;
}

std::string Config::echo() const {
  std::map<std::string, std::string> all = defaults_;
  for (const auto& [k, v] : values_) all[k] = v;
  std::string out;
  for (const auto& [k, v] : all) {
    if (!out.empty()) out += ' ';
    out += k + "=" + v;
  }
  return out;
}

ChannelParams channel_params(const Config& c) {
  ChannelParams p;
  p.L = c.get_double("channel.L", p.L);
  p.L1 = c.get_double("channel.L1", p.L1);
  p.H_L = c.get_double("channel.H_L", p.H_L);
  p.sigma = c.get_double("channel.sigma", p.sigma);
  p.A = c.get_double("channel.A", p.A);
  p.g = c.get_double("channel.g", p.g);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p;
}

SectorParams sector_params(const Config& c) {
  SectorParams p;
  p.H0 = c.get_double("sector.H0", p.H0);
  p.alpha = c.get_double("sector.alpha", p.alpha);
  p.L1 = c.get_double("sector.L1", p.L1);
  p.L = c.get_double("sector.L", p.L);
  p.m = c.get_double("sector.m", p.m);
  p.omega = c.get_double("sector.omega", p.omega);
  p.A = c.get_double("sector.A", p.A);
  p.g = c.get_double("sector.g", p.g);
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p;
}

ScenarioConfig slice_config(const Config& c, ScenarioKind kind) {
  ScenarioConfig s = kind == ScenarioKind::StandingWave ? ScenarioConfig::standing_wave() : ScenarioConfig::density_flow();
  s.x_min = c.get_double("slice.x_min", s.x_min);
  s.x_max = c.get_double("slice.x_max", s.x_max);
  s.z_min = c.get_double("slice.z_min", s.z_min);
  s.z_max = c.get_double("slice.z_max", s.z_max);
  s.nx = c.get_int("slice.nx", s.nx);
  s.nz = c.get_int("slice.nz", s.nz);
  s.dt = c.get_double("slice.dt", s.dt);
  s.t_end = c.get_double("slice.t_end", s.t_end);
  s.degree = c.get_int("slice.degree", s.degree);
  s.snapshot_times = c.get_doubles("slice.snapshots", s.snapshot_times);
  s.rho0 = c.get_double("slice.rho0", s.rho0);
  s.g = c.get_double("slice.g", s.g);
  s.eta0 = c.get_double("slice.eta0", s.eta0);
  s.kappa = c.get_double("slice.kappa", s.kappa);
  s.rho1 = c.get_double("slice.rho1", s.rho1);
  s.dense_x_max = c.get_double("slice.dense_x_max", s.dense_x_max);
  s.Kh = c.get_double("slice.Kh", s.Kh);
  s.Kz = c.get_double("slice.Kz", s.Kz);
  s.bathymetry = c.get_bool("slice.bathymetry", s.bathymetry);
  s.ramp.x0 = c.get_double("slice.ramp.x0", s.ramp.x0);
  s.ramp.z0 = c.get_double("slice.ramp.z0", s.ramp.z0);
  s.ramp.x1 = c.get_double("slice.ramp.x1", s.ramp.x1);
  s.ramp.z1 = c.get_double("slice.ramp.z1", s.ramp.z1);
  s.bar.x0 = c.get_double("slice.bar.x0", s.bar.x0);
  s.bar.x1 = c.get_double("slice.bar.x1", s.bar.x1);
  s.bar.z0 = c.get_double("slice.bar.z0", s.bar.z0);
  s.bar.z1 = c.get_double("slice.bar.z1", s.bar.z1);
  s.advection = c.get_bool("slice.advection", s.advection);
  s.instability_factor = c.get_double("slice.instability_factor", s.instability_factor);
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return s;
}

}  // namespace hdg
