#include "fredholm/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fredholm {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_grid_function_csv(const std::filesystem::path& path, const GridFunction& fn,
                             const std::string& value_header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "node," << value_header << "\n";
    for (std::size_t i = 0; i < fn.size(); ++i)
        out << format_double(fn.grid->node(i)) << ',' << format_double(fn.values[i]) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

GridFunction read_grid_function_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::vector<double> nodes, values;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": expected two comma-separated columns");
        try {
            nodes.push_back(std::stod(a));
            values.push_back(std::stod(b));
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unparseable number");
        }
    }
    return {make_grid(std::move(nodes)), std::move(values)};
}

std::vector<double> read_column_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    std::vector<double> values;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            values.push_back(std::stod(line));
        } catch (const std::exception&) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": unparseable number");
        }
    }
    return values;
}

void write_column_csv(const std::filesystem::path& path, const std::vector<double>& values,
                      const std::string& header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << header << "\n";
    for (double v : values) out << format_double(v) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace fredholm
