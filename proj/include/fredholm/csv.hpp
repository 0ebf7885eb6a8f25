#pragma once

#include "fredholm/grid.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace fredholm {

/// Two-column CSV "node,value" with a one-line header; 17 significant digits.
void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& fn,
                             const std::string& value_header = "value");
GridFunction read_grid_function_csv(const std::filesystem::path& path);

/// Single-column data file, optional non-numeric header line.
std::vector<double> read_column_csv(const std::filesystem::path& path);
void write_column_csv(const std::filesystem::path& path, const std::vector<double>& values,
                      const std::string& header);

std::string format_double(double v);

} // namespace fredholm
