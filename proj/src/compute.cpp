#include "fredholm/compute.hpp"

#include <cmath>

namespace fredholm::compute {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

inline double row_dot(const double* row, const double* wp, std::size_t n) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * wp[j];
    return acc;
}

inline double col_dot(const double* a, std::size_t rows, std::size_t cols, std::size_t j,
                      const double* wr) {
    double acc = 0.0;
    for (std::size_t i = 0; i < rows; ++i) acc += a[i * cols + j] * wr[i];
    return acc;
}

inline double kde_at(double x, const double* xs, std::size_t n, double inv_h, double scale) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = (x - xs[i]) * inv_h;
        acc += std::exp(-0.5 * z * z);
    }
    return acc * kInvSqrt2Pi * scale;
}
} // namespace

namespace serial {

void matvec_rows(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wp, std::span<double> out) {
    for (std::size_t i = 0; i < rows; ++i) out[i] = row_dot(a.data() + i * cols, wp.data(), cols);
}

void matvec_cols(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wr, std::span<double> out) {
    for (std::size_t j = 0; j < cols; ++j) out[j] = col_dot(a.data(), rows, cols, j, wr.data());
}

void kde_sum(std::span<const double> xs, double inv_h, double scale,
             std::span<const double> nodes, std::span<double> out) {
    for (std::size_t k = 0; k < nodes.size(); ++k)
        out[k] = kde_at(nodes[k], xs.data(), xs.size(), inv_h, scale);
}

} // namespace serial

void matvec_rows(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wp, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
        out[i] = row_dot(a.data() + static_cast<std::size_t>(i) * cols, wp.data(), cols);
}

void matvec_cols(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wr, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(cols);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
        out[j] = col_dot(a.data(), rows, cols, static_cast<std::size_t>(j), wr.data());
}

void kde_sum(std::span<const double> xs, double inv_h, double scale,
             std::span<const double> nodes, std::span<double> out) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(nodes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < n; ++k)
        out[k] = kde_at(nodes[k], xs.data(), xs.size(), inv_h, scale);
}

} // namespace fredholm::compute
