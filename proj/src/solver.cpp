#include "fredholm/solver.hpp"

#include "fredholm/compute.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fredholm {

namespace {
constexpr double kMonotoneSlack = 1e-10;

std::vector<double> hadamard_with_weights(const Grid1D& grid, std::span<const double> v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = grid.weight(i) * v[i];
    return out;
}
} // namespace

ProblemSpec::ProblemSpec(KernelMatrixPtr m, GridFunction f_, GridFunction p0_, double f_mass_tol)
    : matrix(std::move(m)), f(std::move(f_)), p0(std::move(p0_)) {
    if (!matrix) throw std::invalid_argument("ProblemSpec: null kernel matrix");
    if (!same_grid(*f.grid, *matrix->x_grid()))
        throw std::invalid_argument("ProblemSpec: f is not on the matrix x-grid");
    if (!same_grid(*p0.grid, *matrix->theta_grid()))
        throw std::invalid_argument("ProblemSpec: p0 is not on the matrix theta-grid");
    for (std::size_t j = 0; j < p0.size(); ++j)
        if (!(p0.values[j] > 0.0))
            throw std::invalid_argument("ProblemSpec: p0 must be strictly positive (node " +
                                        std::to_string(j) + ")");
    for (double v : f.values)
        if (v < 0.0) throw std::invalid_argument("ProblemSpec: f must be non-negative");
    const double mass = trapezoid_integrate(f);
    if (std::abs(mass - 1.0) > f_mass_tol)
        throw std::invalid_argument("ProblemSpec: f mass " + std::to_string(mass) +
                                    " is not within tolerance of 1");
}

std::string to_string(Termination t) {
    switch (t) {
        case Termination::MaxIter: return "MaxIter";
        case Termination::DivergenceBelowTol: return "DivergenceBelowTol";
        case Termination::DiffBelowTol: return "DiffBelowTol";
    }
    return "?";
}

GridFunction mixture(const KernelMatrix& matrix, const GridFunction& p) {
    if (!same_grid(*p.grid, *matrix.theta_grid()))
        throw std::invalid_argument("mixture: p is not on the matrix theta-grid");
    const auto wp = hadamard_with_weights(*matrix.theta_grid(), p.values);
    std::vector<double> out(matrix.rows());
    compute::matvec_rows(matrix.entries(), matrix.rows(), matrix.cols(), wp, out);
    return {matrix.x_grid(), std::move(out)};
}

GridFunction update_step(const ProblemSpec& problem, const GridFunction& p_prev,
                         const GridFunction& f_prev, const SolveOptions& opts) {
    const KernelMatrix& m = *problem.matrix;
    const auto& xg = *m.x_grid();
    std::vector<double> wr(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const double fi = problem.f.values[i];
        if (fi == 0.0) {
            wr[i] = 0.0;  // nodes outside supp(f) contribute nothing
            continue;
        }
        const double fpi = f_prev.values[i];
        if (!(fpi > 0.0))
            throw std::runtime_error("update_step: mixture vanishes on support of f (node " +
                                     std::to_string(i) + ")");
        wr[i] = xg.weight(i) * fi / fpi;
    }
    std::vector<double> factors(m.cols());
    compute::matvec_cols(m.entries(), m.rows(), m.cols(), wr, factors);
    GridFunction p{m.theta_grid(), std::vector<double>(m.cols())};
    for (std::size_t j = 0; j < m.cols(); ++j) p.values[j] = p_prev.values[j] * factors[j];
    if (opts.renormalize) {
        const double mass = trapezoid_integrate(p);
        if (!(mass > 0.0)) throw std::runtime_error("update_step: iterate has zero mass");
        for (auto& v : p.values) v /= mass;
    }
    return p;
}

GridFunction additive_update_step(const ProblemSpec& problem, const GridFunction& p_prev,
                                  const GridFunction& f_prev) {
    const KernelMatrix& m = *problem.matrix;
    const auto& xg = *m.x_grid();
    std::vector<double> wr(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        wr[i] = xg.weight(i) * (problem.f.values[i] - f_prev.values[i]);
    std::vector<double> corr(m.cols());
    compute::matvec_cols(m.entries(), m.rows(), m.cols(), wr, corr);
    GridFunction p{m.theta_grid(), std::vector<double>(m.cols())};
    for (std::size_t j = 0; j < m.cols(); ++j) p.values[j] = p_prev.values[j] + corr[j];
    return p;
}

SolverResult solve(const ProblemSpec& problem, const StoppingRule& rule,
                   const SolveOptions& opts) {
    SolverResult res;
    res.p_final = problem.p0;
    res.f_final = mixture(*problem.matrix, res.p_final);
    res.divergence_history.push_back(kl_divergence(problem.f, res.f_final));
    res.termination = Termination::MaxIter;
    for (int m = 1; m <= rule.max_iter; ++m) {
        res.p_final = update_step(problem, res.p_final, res.f_final, opts);
        res.f_final = mixture(*problem.matrix, res.p_final);
        const double d_prev = res.divergence_history.back();
        const double d = kl_divergence(problem.f, res.f_final);
        res.divergence_history.push_back(d);
        res.iterations = m;
        if (d > d_prev + kMonotoneSlack) {
            std::ostringstream ss;
            ss << "divergence increased at iteration " << m << " (" << d_prev << " -> " << d
               << ")";
            res.warnings.push_back(ss.str());
        }
        if (rule.tol_div > 0.0 && d < rule.tol_div) {
            res.termination = Termination::DivergenceBelowTol;
            break;
        }
        if (rule.tol_diff > 0.0 && d_prev - d < rule.tol_diff) {
            res.termination = Termination::DiffBelowTol;
            break;
        }
    }
    return res;
}

EmpiricalProblem::EmpiricalProblem(const KernelSpec& kernel, GridPtr theta_grid,
                                   std::vector<double> observations)
    : theta_grid_(std::move(theta_grid)), n_(observations.size()) {
    if (n_ < 2) throw std::invalid_argument("EmpiricalProblem: need at least 2 observations");
    const std::size_t cols = theta_grid_->size();
    eval_.resize(n_ * cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(n_);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double x = observations[static_cast<std::size_t>(i)];
        double* row = eval_.data() + static_cast<std::size_t>(i) * cols;
        for (std::size_t j = 0; j < cols; ++j) row[j] = kernel.evaluate(x, theta_grid_->node(j));
    }
}

std::vector<double> EmpiricalProblem::mixture_at_observations(const GridFunction& p) const {
    if (!same_grid(*p.grid, *theta_grid_))
        throw std::invalid_argument("EmpiricalProblem: p is not on the theta-grid");
    const auto wp = hadamard_with_weights(*theta_grid_, p.values);
    std::vector<double> out(n_);
    compute::matvec_rows(eval_, n_, theta_grid_->size(), wp, out);
    return out;
}

GridFunction EmpiricalProblem::update_step(const GridFunction& p_prev) const {
    const auto fm = mixture_at_observations(p_prev);
    std::vector<double> wr(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (!(fm[i] > 0.0))
            throw std::runtime_error("empirical update: zero likelihood at observation " +
                                     std::to_string(i));
        wr[i] = 1.0 / (static_cast<double>(n_) * fm[i]);
    }
    std::vector<double> factors(theta_grid_->size());
    compute::matvec_cols(eval_, n_, theta_grid_->size(), wr, factors);
    GridFunction p{theta_grid_, std::vector<double>(theta_grid_->size())};
    for (std::size_t j = 0; j < p.size(); ++j) p.values[j] = p_prev.values[j] * factors[j];
    const double mass = trapezoid_integrate(p);
    if (!(mass > 0.0)) throw std::runtime_error("empirical update: iterate has zero mass");
    for (auto& v : p.values) v /= mass;
    return p;
}

double EmpiricalProblem::mean_log_likelihood(const GridFunction& p) const {
    const auto fm = mixture_at_observations(p);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        if (!(fm[i] > 0.0))
            throw std::runtime_error("mean_log_likelihood: zero likelihood at observation " +
                                     std::to_string(i));
        acc += std::log(fm[i]);
    }
    return acc / static_cast<double>(n_);
}

SolverResult solve_empirical(const EmpiricalProblem& problem, const GridFunction& p0,
                             const StoppingRule& rule) {
    SolverResult res;
    res.p_final = p0;
    res.divergence_history.push_back(-problem.mean_log_likelihood(p0));
    res.termination = Termination::MaxIter;
    for (int m = 1; m <= rule.max_iter; ++m) {
        res.p_final = problem.update_step(res.p_final);
        const double d_prev = res.divergence_history.back();
        const double d = -problem.mean_log_likelihood(res.p_final);
        res.divergence_history.push_back(d);
        res.iterations = m;
        if (d > d_prev + kMonotoneSlack) {
            std::ostringstream ss;
            ss << "log-likelihood decreased at iteration " << m;
            res.warnings.push_back(ss.str());
        }
        if (rule.tol_diff > 0.0 && d_prev - d < rule.tol_diff) {
            res.termination = Termination::DiffBelowTol;
            break;
        }
    }
    return res;
}

} // namespace fredholm
