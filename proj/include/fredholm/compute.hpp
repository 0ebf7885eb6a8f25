#pragma once

#include <cstddef>
#include <span>

namespace fredholm::compute {

/// Hot inner loops, each in two variants: a serial reference and an
/// OpenMP-parallel version.  The parallel versions distribute whole output
/// elements across threads and keep the per-element accumulation order
/// identical to the serial code, so results are bit-for-bit equal for any
/// thread count.

/// out[i] = sum_j a[i*cols + j] * wp[j]   (row dot; mixture f_m = K (w.p))
namespace serial {
void matvec_rows(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wp, std::span<double> out);
void matvec_cols(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wr, std::span<double> out);
void kde_sum(std::span<const double> xs, double inv_h, double scale,
             std::span<const double> nodes, std::span<double> out);
} // namespace serial

void matvec_rows(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wp, std::span<double> out);

/// out[j] = sum_i a[i*cols + j] * wr[i]   (column dot; update factors)
void matvec_cols(std::span<const double> a, std::size_t rows, std::size_t cols,
                 std::span<const double> wr, std::span<double> out);

/// out[k] = scale * sum_i phi((nodes[k]-xs[i]) * inv_h)   (Gaussian KDE sum)
void kde_sum(std::span<const double> xs, double inv_h, double scale,
             std::span<const double> nodes, std::span<double> out);

} // namespace fredholm::compute
