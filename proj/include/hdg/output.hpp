#pragma once

#include <string>
#include <vector>

namespace hdg {

// Shortest decimal that round-trips, so repeated runs give identical files.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(const std::vector<double>& values);
};

/// CSV with a `# config: ...` comment line, then the header row, then the rows.
void write_csv(const std::string& path, const CsvTable& table, const std::string& config_echo);

/// Plain-text structured grid: comment lines (config, field name, time), a
/// header line `nx nz x_min x_max z_min z_max`, then nz rows of nx values,
/// bottom row first. Cells flagged in `solid` are written as nan.
struct GridField {
  std::string name;
  double time = 0.0;
  int nx = 0, nz = 0;
  double x_min = 0.0, x_max = 0.0, z_min = 0.0, z_max = 0.0;
  std::vector<double> values;  // i + nx * j
  std::vector<char> solid;     // optional, same layout
};
void write_grid(const std::string& path, const GridField& field, const std::string& config_echo);

}  // namespace hdg
