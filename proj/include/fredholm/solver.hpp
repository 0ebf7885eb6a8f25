#pragma once

#include "fredholm/grid.hpp"
#include "fredholm/kernels.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fredholm {

/// Canonical density-form problem: find p with f = integral k(.,theta) p(theta).
struct ProblemSpec {
    KernelMatrixPtr matrix;
    GridFunction f;   // target density on the x-grid
    GridFunction p0;  // strictly positive starting density on the theta-grid

    ProblemSpec(KernelMatrixPtr m, GridFunction f_, GridFunction p0_,
                double f_mass_tol = 1e-6);
};

struct StoppingRule {
    int max_iter = 500;
    double tol_div = 0.0;   // stop when D_m < tol_div       (0 disables)
    double tol_diff = 0.0;  // stop when D_{m-1} - D_m < tol_diff (0 disables)
};

enum class Termination { MaxIter, DivergenceBelowTol, DiffBelowTol };

std::string to_string(Termination t);

struct SolverResult {
    GridFunction p_final;
    GridFunction f_final;
    std::vector<double> divergence_history;  // D_0 .. D_m, length iterations+1
    int iterations = 0;
    Termination termination = Termination::MaxIter;
    std::vector<std::string> warnings;
};

struct SolveOptions {
    bool renormalize = true;  // renormalize p_m to unit quadrature mass each step
};

/// f_m(x_i) = sum_j w_j k(x_i, theta_j) p(theta_j).
GridFunction mixture(const KernelMatrix& matrix, const GridFunction& p);

/// One multiplicative step: p(theta_j) <- p(theta_j) * sum_i w_i k(x_i,theta_j) f(x_i)/f_prev(x_i),
/// with f/f_prev = 0 where f = 0, then (by default) renormalized to unit mass.
/// Throws if f_prev <= 0 somewhere f > 0.
GridFunction update_step(const ProblemSpec& problem, const GridFunction& p_prev,
                         const GridFunction& f_prev, const SolveOptions& opts = {});

/// Landweber baseline p <- p + sum_i w_i k(x_i,theta) (f - f_prev); not clipped,
/// not renormalized, may go negative.
GridFunction additive_update_step(const ProblemSpec& problem, const GridFunction& p_prev,
                                  const GridFunction& f_prev);

/// Iterate update_step recording D_m = KL(f, f_m) until a stopping criterion
/// fires.  A divergence increase beyond 1e-10 is recorded as a warning, not an
/// error.
SolverResult solve(const ProblemSpec& problem, const StoppingRule& rule,
                   const SolveOptions& opts = {});

/// Sample-based variant: the kernel is evaluated analytically at each
/// observation (no x-grid).  Precomputes the n-by-M evaluation matrix once.
class EmpiricalProblem {
public:
    EmpiricalProblem(const KernelSpec& kernel, GridPtr theta_grid,
                     std::vector<double> observations);

    const GridPtr& theta_grid() const { return theta_grid_; }
    std::size_t sample_size() const { return n_; }

    /// f_prev(X_i) = sum_j w_j k(X_i, theta_j) p(theta_j), for every observation.
    std::vector<double> mixture_at_observations(const GridFunction& p) const;

    /// p(theta_j) <- p(theta_j) * (1/n) sum_i k(X_i,theta_j)/f_prev(X_i), renormalized.
    /// Throws "zero likelihood at observation" if f_prev(X_i) = 0 for some i.
    GridFunction update_step(const GridFunction& p_prev) const;

    /// (1/n) sum_i log f_p(X_i).
    double mean_log_likelihood(const GridFunction& p) const;

private:
    GridPtr theta_grid_;
    std::size_t n_;
    std::vector<double> eval_;  // n x M, row-major
};

/// EM loop on the empirical problem.  divergence_history records the negative
/// mean log-likelihood (monotone non-increasing); tol_diff applies to its
/// per-step decrease, tol_div is ignored (the quantity can be negative).
SolverResult solve_empirical(const EmpiricalProblem& problem, const GridFunction& p0,
                             const StoppingRule& rule);

} // namespace fredholm
