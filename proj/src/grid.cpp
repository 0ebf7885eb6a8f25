#include "fredholm/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fredholm {

Grid1D::Grid1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2)
        throw std::invalid_argument("Grid1D: need at least 2 nodes");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (!std::isfinite(nodes_[i]))
            throw std::invalid_argument("Grid1D: non-finite node at index " + std::to_string(i));
        if (i > 0 && nodes_[i] <= nodes_[i - 1])
            throw std::invalid_argument("Grid1D: nodes not strictly increasing at index " +
                                        std::to_string(i));
    }
    const std::size_t m = nodes_.size();
    weights_.resize(m);
    weights_[0] = (nodes_[1] - nodes_[0]) / 2.0;
    for (std::size_t j = 1; j + 1 < m; ++j)
        weights_[j] = (nodes_[j + 1] - nodes_[j - 1]) / 2.0;
    weights_[m - 1] = (nodes_[m - 1] - nodes_[m - 2]) / 2.0;
}

Grid1D Grid1D::uniform(double lo, double hi, std::size_t n) {
    if (!(lo < hi))
        throw std::invalid_argument("Grid1D::uniform: lo must be < hi");
    if (n < 2)
        throw std::invalid_argument("Grid1D::uniform: need at least 2 nodes");
    std::vector<double> nodes(n);
    const double h = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + h * static_cast<double>(i);
    nodes.back() = hi;
    return Grid1D(std::move(nodes));
}

bool same_grid(const Grid1D& a, const Grid1D& b) {
    if (&a == &b) return true;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.node(i) != b.node(i)) return false;
    return true;
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw std::invalid_argument("GridFunction: null grid");
    if (values.size() != grid->size())
        throw std::invalid_argument("GridFunction: values/nodes length mismatch");
}

GridFunction constant(GridPtr grid, double value) {
    std::vector<double> v(grid->size(), value);
    return {std::move(grid), std::move(v)};
}

double trapezoid_integrate(const GridFunction& fn) {
    double acc = 0.0;
    const auto& g = *fn.grid;
    for (std::size_t i = 0; i < fn.size(); ++i) acc += g.weight(i) * fn.values[i];
    return acc;
}

static void require_shared_grid(const GridFunction& f, const GridFunction& g, const char* op) {
    if (!same_grid(*f.grid, *g.grid))
        throw std::invalid_argument(std::string(op) + ": functions do not share a grid");
}

double kl_divergence(const GridFunction& f, const GridFunction& g) {
    require_shared_grid(f, g, "kl_divergence");
    double acc = 0.0;
    const auto& grid = *f.grid;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const double fi = f.values[i];
        if (fi == 0.0) continue;  // 0 log 0 = 0
        const double gi = g.values[i];
        if (fi > 0.0 && gi <= 0.0)
            throw std::runtime_error("kl_divergence: support violation at node " +
                                     std::to_string(i));
        acc += grid.weight(i) * fi * std::log(fi / gi);
    }
    return acc;
}

double l1_distance(const GridFunction& f, const GridFunction& g) {
    require_shared_grid(f, g, "l1_distance");
    double acc = 0.0;
    const auto& grid = *f.grid;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += grid.weight(i) * std::abs(f.values[i] - g.values[i]);
    return acc;
}

GridFunction normalize_to_density(const GridFunction& fn) {
    for (std::size_t i = 0; i < fn.size(); ++i)
        if (fn.values[i] < 0.0)
            throw std::runtime_error("normalize_to_density: negative values");
    const double mass = trapezoid_integrate(fn);
    if (!(mass > 0.0))
        throw std::runtime_error("normalize_to_density: zero mass");
    GridFunction out = fn;
    for (auto& v : out.values) v /= mass;
    return out;
}

bool is_density(const GridFunction& fn, double tol) {
    for (double v : fn.values)
        if (v < 0.0) return false;
    return std::abs(trapezoid_integrate(fn) - 1.0) <= tol;
}

} // namespace fredholm
