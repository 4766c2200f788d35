#include "hdg/output.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace hdg {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw std::runtime_error("number formatting failed");
  return {buf.data(), ptr};
}

void CsvTable::add_row(const std::vector<double>& values) {
  std::vector<std::string> row;
  row.reserve(values.size());
  for (double v : values) row.push_back(format_number(v));
  rows.push_back(std::move(row));
}

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

void write_joined(std::ofstream& out, const std::vector<std::string>& items) {
  for (std::size_t i = 0; i < items.size(); ++i) out << (i ? "," : "") << items[i];
  out << '\n';
}

}  // namespace

void write_csv(const std::string& path, const CsvTable& table, const std::string& config_echo) {
  auto out = open_output(path);
  out << "# config: " << config_echo << '\n';
  write_joined(out, table.header);
  for (const auto& row : table.rows) write_joined(out, row);
}

void write_grid(const std::string& path, const GridField& f, const std::string& config_echo) {
  if (f.values.size() != static_cast<std::size_t>(f.nx) * static_cast<std::size_t>(f.nz)) {
    throw std::invalid_argument("grid field '" + f.name + "' has the wrong size");
  }
  auto out = open_output(path);
  out << "# config: " << config_echo << '\n';
  out << "# field: " << f.name << " t=" << format_number(f.time) << '\n';
  out << f.nx << ' ' << f.nz << ' ' << format_number(f.x_min) << ' ' << format_number(f.x_max) << ' '
      << format_number(f.z_min) << ' ' << format_number(f.z_max) << '\n';
  for (int j = 0; j < f.nz; ++j) {
    for (int i = 0; i < f.nx; ++i) {
      const auto k = static_cast<std::size_t>(i + f.nx * j);
      const bool solid = !f.solid.empty() && f.solid[k];
      out << (i ? " " : "") << (solid ? std::string("nan") : format_number(f.values[k]));
    }
    out << '\n';
  }
}

}  // namespace hdg
