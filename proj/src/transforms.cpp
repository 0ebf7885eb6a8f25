#include "fredholm/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fredholm {

namespace {
constexpr double kDegenerateColumn = 1e-300;

void require_non_negative(const KernelMatrix& m, const char* op) {
    for (double v : m.entries())
        if (v < 0.0) throw std::invalid_argument(std::string(op) + ": kernel must be non-negative");
}

GridFunction starting_density(const GridPtr& theta, const std::optional<GridFunction>& p0) {
    if (p0) {
        if (!same_grid(*p0->grid, *theta))
            throw std::invalid_argument("transform: p0 is not on the theta-grid");
        return normalize_to_density(*p0);
    }
    return normalize_to_density(constant(theta, 1.0));
}

void finish_canonical(TransformedProblem& t, const KernelMatrix& matrix,
                      const GridFunction& target, bool allow_zero_columns) {
    t.column_masses = column_masses(matrix);
    for (std::size_t j = 0; j < t.column_masses.size(); ++j) {
        if (t.column_masses[j] <= kDegenerateColumn && !allow_zero_columns)
            throw std::runtime_error("degenerate kernel column at theta index " +
                                     std::to_string(j));
    }
    t.canonical_matrix =
        std::make_shared<const KernelMatrix>(normalize_columns(matrix, t.column_masses));
    t.mass_scale = trapezoid_integrate(target);
    if (!(t.mass_scale > 0.0)) throw std::runtime_error("transform: target has zero mass");
    GridFunction f = target;
    for (auto& v : f.values) v /= t.mass_scale;
    t.canonical_f = std::move(f);
}
} // namespace

std::string to_string(TransformKind k) {
    switch (k) {
        case TransformKind::NormalizeKernel: return "normalize-kernel";
        case TransformKind::Shift: return "shift";
        case TransformKind::SplitKernel: return "split-kernel";
    }
    return "?";
}

TransformedProblem normalize_kernel_transform(KernelMatrixPtr matrix, const GridFunction& f,
                                              std::optional<GridFunction> p0,
                                              bool allow_zero_columns) {
    require_non_negative(*matrix, "normalize_kernel_transform");
    if (!same_grid(*f.grid, *matrix->x_grid()))
        throw std::invalid_argument("normalize_kernel_transform: f is not on the x-grid");
    for (double v : f.values)
        if (v < 0.0)
            throw std::invalid_argument("normalize_kernel_transform: f must be non-negative");
    TransformedProblem t;
    t.kind = TransformKind::NormalizeKernel;
    t.original_theta = matrix->theta_grid();
    t.canonical_p0 = starting_density(t.original_theta, p0);
    finish_canonical(t, *matrix, f, allow_zero_columns);
    return t;
}

double auto_shift(const GridFunction& f) {
    double sup = 0.0;
    for (double v : f.values) sup = std::max(sup, std::abs(v));
    return 50.0 * std::max(1.0, sup);
}

TransformedProblem shift_transform(KernelMatrixPtr matrix, const GridFunction& f, double t,
                                   std::optional<GridFunction> p0) {
    require_non_negative(*matrix, "shift_transform");
    if (!same_grid(*f.grid, *matrix->x_grid()))
        throw std::invalid_argument("shift_transform: f is not on the x-grid");
    if (t <= 0.0) t = auto_shift(f);
    TransformedProblem tp;
    tp.kind = TransformKind::Shift;
    tp.shift_t = t;
    tp.original_theta = matrix->theta_grid();
    tp.canonical_p0 = starting_density(tp.original_theta, p0);

    const auto rowm = row_masses(*matrix);
    GridFunction tilde_f = f;
    for (std::size_t i = 0; i < tilde_f.size(); ++i) {
        tilde_f.values[i] += t * rowm[i];
        if (tilde_f.values[i] < 0.0)
            throw std::runtime_error("shift too small: shifted target negative at node " +
                                     std::to_string(i));
    }
    finish_canonical(tp, *matrix, tilde_f, false);
    return tp;
}

TransformedProblem split_kernel_transform(const KernelMatrix& k_plus,
                                          const KernelMatrix& k_minus, const GridFunction& f,
                                          double t) {
    require_non_negative(k_plus, "split_kernel_transform");
    require_non_negative(k_minus, "split_kernel_transform");
    if (!same_grid(*k_plus.x_grid(), *k_minus.x_grid()) ||
        !same_grid(*k_plus.theta_grid(), *k_minus.theta_grid()))
        throw std::invalid_argument("split_kernel_transform: k+ and k- must share grids");
    if (!same_grid(*f.grid, *k_plus.x_grid()))
        throw std::invalid_argument("split_kernel_transform: f is not on the x-grid");
    if (t <= 0.0) t = auto_shift(f);

    // doubled domain [alpha, 2 beta - alpha]: original nodes, then each node
    // (except the first) displaced by the domain length
    const Grid1D& th = *k_plus.theta_grid();
    const std::size_t m = th.size();
    const double alpha = th.front(), beta = th.back();
    std::vector<double> nodes(th.nodes().begin(), th.nodes().end());
    nodes.reserve(2 * m - 1);
    for (std::size_t j = 1; j < m; ++j) nodes.push_back(beta + (th.node(j) - alpha));
    GridPtr doubled = make_grid(std::move(nodes));

    const std::size_t rows = k_plus.rows();
    const std::size_t cols = 2 * m - 1;
    std::vector<double> entries(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        double* row = entries.data() + i * cols;
        for (std::size_t j = 0; j < m; ++j) row[j] = k_plus(i, j);
        for (std::size_t j = 1; j < m; ++j) row[m - 1 + j] = k_minus(i, j);
    }
    auto doubled_matrix =
        std::make_shared<const KernelMatrix>(k_plus.x_grid(), doubled, std::move(entries));

    TransformedProblem tp = shift_transform(doubled_matrix, f, t);
    tp.kind = TransformKind::SplitKernel;
    tp.original_theta = k_plus.theta_grid();
    tp.doubled = true;
    return tp;
}

Recovered recover(const TransformedProblem& transformed, const SolverResult& solved) {
    const auto& c = transformed.column_masses;
    if (solved.p_final.size() != c.size())
        throw std::invalid_argument("recover: solution does not match the transformed problem");
    // undo mass scale and column normalization: s = M q / c
    std::vector<double> s(c.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        s[j] = c[j] > kDegenerateColumn
                   ? transformed.mass_scale * solved.p_final.values[j] / c[j]
                   : 0.0;

    Recovered out;
    const double t = transformed.shift_t;
    if (!transformed.doubled) {
        for (auto& v : s) v -= t;  // t = 0 for NormalizeKernel
        out.p = {transformed.original_theta, std::move(s)};
        return out;
    }

    const std::size_t m = transformed.original_theta->size();
    std::vector<double> p(m), delta(m, 0.0);
    p[0] = s[0] - t;  // the first node has no displaced twin
    for (std::size_t j = 1; j < m; ++j) {
        const double first = s[j] - t;
        const double second = t - s[m - 1 + j];
        p[j] = 0.5 * (first + second);
        delta[j] = first - second;
    }
    out.p = {transformed.original_theta, std::move(p)};
    GridFunction dfn{transformed.original_theta, std::move(delta)};
    out.split_discrepancy_l1 = trapezoid_integrate({transformed.original_theta,
                                                    [&] {
                                                        auto a = dfn.values;
                                                        for (auto& v : a) v = std::abs(v);
                                                        return a;
                                                    }()});
    double p_l1 = 0.0;
    for (std::size_t j = 0; j < m; ++j)
        p_l1 += transformed.original_theta->weight(j) * std::abs(out.p.values[j]);
    if (out.split_discrepancy_l1 > 0.1 * p_l1)
        out.warnings.push_back("inconsistent split solution: the two halves disagree (|delta|_1 = " +
                               std::to_string(out.split_discrepancy_l1) + ")");
    return out;
}

} // namespace fredholm
