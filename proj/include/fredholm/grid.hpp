#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fredholm {

/// One-dimensional quadrature grid: strictly increasing nodes with
/// trapezoid-rule weights derived from the actual spacing.  Grids may be
/// non-uniform; weights are
///   w_0 = (x_1 - x_0)/2,  w_j = (x_{j+1} - x_{j-1})/2,  w_{M-1} = (x_{M-1} - x_{M-2})/2.
class Grid1D {
public:
    explicit Grid1D(std::vector<double> nodes);

    static Grid1D uniform(double lo, double hi, std::size_t n);

    std::size_t size() const { return nodes_.size(); }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

using GridPtr = std::shared_ptr<const Grid1D>;

inline GridPtr make_uniform_grid(double lo, double hi, std::size_t n) {
    return std::make_shared<const Grid1D>(Grid1D::uniform(lo, hi, n));
}
inline GridPtr make_grid(std::vector<double> nodes) {
    return std::make_shared<const Grid1D>(std::move(nodes));
}

/// True if the two functions can share quadrature: same grid object, or
/// node-for-node identical grids.
bool same_grid(const Grid1D& a, const Grid1D& b);

/// Real values tabulated on a grid.  No interpolation is ever performed
/// between grids; callers must resample explicitly.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridPtr g, std::vector<double> v);

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Tabulate fn(node) on a grid.
template <typename F>
GridFunction tabulate(GridPtr grid, F&& fn) {
    std::vector<double> v(grid->size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(grid->node(i));
    return {std::move(grid), std::move(v)};
}

GridFunction constant(GridPtr grid, double value);

/// Sum of w_j * v_j; exact for functions linear between nodes.
double trapezoid_integrate(const GridFunction& fn);

/// Kullback--Leibler divergence sum of w_j f_j log(f_j/g_j), with the
/// convention 0 log 0 = 0.  Throws "support violation" if f > 0 at a node
/// where g <= 0.
double kl_divergence(const GridFunction& f, const GridFunction& g);

/// Quadrature of |f - g|.
double l1_distance(const GridFunction& f, const GridFunction& g);

/// fn / trapezoid_integrate(fn).  Throws "zero mass" if the integral is <= 0
/// and "negative values" if fn < 0 anywhere.
GridFunction normalize_to_density(const GridFunction& fn);

/// Checks values >= 0 and |mass - 1| <= tol.
bool is_density(const GridFunction& fn, double tol = 1e-6);

} // namespace fredholm
