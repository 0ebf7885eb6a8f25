#pragma once

#include "fredholm/grid.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fredholm {

/// Standard normal pdf and cdf (erfc-based, accurate in the tails).
double normal_pdf(double z);
double normal_cdf(double z);

class KernelMatrix;

/// Two-argument kernel k(x, theta) with declared properties.  Built-in kinds:
///   ExponentialRate        k(x,t) = t e^{-t x}        (x >= 0, t >= 0; k(.,0) == 0)
///   NormalLocation(sigma)  k(x,t) = phi((x-t)/sigma)/sigma
///   NormalLocationReflected(sigma)  k(x,t) = phi((x+t)/sigma)/sigma
///   NormalScale            k(x,t) = phi(x/sqrt(t))/sqrt(t), t > 0 (t = variance)
///   TruncatedNormalFPT     normal with mean b h(t)/t, variance 1/t, restricted
///                          to x > 0 and renormalized
///   Tabulated              raw matrix, evaluation only at grid nodes
///   Difference             plus - minus (signed, not a density in x)
class KernelSpec {
public:
    enum class Kind {
        ExponentialRate,
        NormalLocation,
        NormalLocationReflected,
        NormalScale,
        TruncatedNormalFPT,
        Tabulated,
        Difference,
    };

    static KernelSpec exponential_rate();
    static KernelSpec normal_location(double sigma);
    static KernelSpec normal_location_reflected(double sigma);
    static KernelSpec normal_scale();
    /// h is the boundary shape function; b its coefficient.
    static KernelSpec truncated_normal_fpt(double b, std::function<double(double)> h);
    static KernelSpec tabulated(std::shared_ptr<const KernelMatrix> matrix);
    static KernelSpec difference(KernelSpec plus, KernelSpec minus);

    Kind kind() const { return kind_; }
    bool density_in_x() const { return density_in_x_; }
    bool non_negative() const { return non_negative_; }
    double sigma() const { return sigma_; }

    /// k(x, theta); throws on domain violations (e.g. theta < 0 for
    /// ExponentialRate, theta <= 0 for NormalScale).
    double evaluate(double x, double theta) const;

    std::string name() const;

private:
    KernelSpec() = default;

    Kind kind_{};
    bool density_in_x_ = false;
    bool non_negative_ = false;
    double sigma_ = 0.0;
    double fpt_b_ = 0.0;
    std::function<double(double)> fpt_h_;
    std::shared_ptr<const KernelMatrix> table_;
    std::shared_ptr<const KernelSpec> plus_, minus_;
};

/// Dense tabulation entries[i][j] = k(x_i, theta_j), row-major.  Immutable
/// after construction and safe to share across threads.
class KernelMatrix {
public:
    KernelMatrix(GridPtr x_grid, GridPtr theta_grid, std::vector<double> entries);

    std::size_t rows() const { return x_grid_->size(); }
    std::size_t cols() const { return theta_grid_->size(); }
    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols() + j]; }
    std::span<const double> entries() const { return entries_; }
    const GridPtr& x_grid() const { return x_grid_; }
    const GridPtr& theta_grid() const { return theta_grid_; }

private:
    GridPtr x_grid_;
    GridPtr theta_grid_;
    std::vector<double> entries_;
};

using KernelMatrixPtr = std::shared_ptr<const KernelMatrix>;

/// Evaluate the kernel over the grid product.  Parallelized over rows;
/// deterministic.  Domain violations are reported with the offending (i, j).
KernelMatrix build_matrix(const KernelSpec& kernel, GridPtr x_grid, GridPtr theta_grid);
KernelMatrixPtr build_matrix_ptr(const KernelSpec& kernel, GridPtr x_grid, GridPtr theta_grid);

/// Trapezoid mass over x of column j.
double column_mass(const KernelMatrix& m, std::size_t j);
std::vector<double> column_masses(const KernelMatrix& m);
/// Trapezoid mass over theta of row i (used by the shift transform).
std::vector<double> row_masses(const KernelMatrix& m);

/// Divide every column by its x-mass so each has unit quadrature mass.
/// Columns with mass <= zero_tol are left untouched (all-zero columns on a
/// grid that includes a degenerate parameter value) and reported back via
/// the returned masses.
KernelMatrix normalize_columns(const KernelMatrix& m, const std::vector<double>& masses);

/// Warnings for density-in-x kernels whose tabulated columns lose more than
/// deficit_tol of their mass to grid truncation.
std::vector<std::string> mass_deficit_warnings(const KernelMatrix& m, double deficit_tol = 1e-3);

/// Tabulated-kernel CSV: first row x-nodes, first column theta-nodes (corner
/// cell ignored), body entries k(x_i, theta_j).
KernelMatrix read_kernel_matrix_csv(const std::filesystem::path& path);
void write_kernel_matrix_csv(const std::filesystem::path& path, const KernelMatrix& m);

} // namespace fredholm
