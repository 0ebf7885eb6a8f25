#pragma once

#include "fredholm/solver.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace fredholm {

/// Upper boundary a + b h(t) for standard Brownian motion, with h(0) = 0 and
/// h(t) <= sqrt(t) (checked numerically on the grids it is used with).
struct BoundarySpec {
    double a = 1.0;
    double b = 0.1;
    std::function<double(double)> h;
    std::string name;  // "sqrt", "level", "power(gamma)", "tabulated"

    double value(double t) const { return a + b * h(t); }
};

BoundarySpec sqrt_boundary(double a, double b);
BoundarySpec level_boundary(double a);  // h == 0
BoundarySpec power_boundary(double a, double b, double gamma);  // h(t) = t^gamma, gamma in (0, 1/2]
/// Piecewise-linear h from tabulated values (clamped to the last value beyond
/// the table).
BoundarySpec tabulated_boundary(double a, double b, GridFunction h_values);

/// Checks h(0) ~ 0 and h <= sqrt on every node of the grid.
void validate_boundary(const BoundarySpec& boundary, const Grid1D& theta_grid);

struct MCConfig {
    std::size_t samples = 5000;
    std::uint64_t seed = 0;
    bool resample_each_iteration = true;
};

struct FPTProblem {
    BoundarySpec boundary;
    GridPtr theta_grid;  // strictly positive nodes
    MCConfig mc;
    GridFunction p0;     // starting tilde-p, strictly positive

    FPTProblem(BoundarySpec boundary_, GridPtr theta_grid_, MCConfig mc_, GridFunction p0_);
};

/// Truncated-normal kernel of the hitting-time Fredholm equation: mean
/// b h(theta)/theta, variance 1/theta, restricted to x > 0.
KernelSpec fpt_kernel(const BoundarySpec& boundary);

/// Right-hand side f(x) = a e^{-a x} on x > 0, kept analytic.
struct ExponentialRhs {
    double rate;
    double pdf(double x) const;
};
ExponentialRhs fpt_rhs(const BoundarySpec& boundary);

/// One Monte-Carlo multiplicative step: N exponential draws, update factor
/// (1/N) sum_i k(X_i, theta_j)/f_m(X_i) with f_m evaluated by the trapezoid
/// rule over the theta-grid.  Deterministic given (mc.seed, iteration).
GridFunction mc_update_step(const FPTProblem& problem, const GridFunction& p_prev,
                            std::uint64_t iteration, const SolveOptions& opts = {});

/// Back-transform tilde-p -> p:
/// p = sqrt(theta) tilde-p / [a sqrt(2 pi) e^{b^2 h^2/(2 theta)} Psi(-b h/sqrt(theta))].
/// Not renormalized unless asked; its quadrature mass is the key diagnostic.
GridFunction untransform(const BoundarySpec& boundary, const GridFunction& tilde_p,
                         bool renormalize = false);

struct FPTResult {
    SolverResult tilde;   // tilde-p iterate, histories, warnings
    GridFunction p;       // untransformed density of T on the theta-grid
    double p_mass = 0.0;  // quadrature mass of p (should be ~ 1 up to truncation)
};

/// Full pipeline: iterate mc_update_step; the divergence history is computed
/// against f tabulated on a uniform x-grid over [0, 20/a] (diagnostic only).
FPTResult solve_fpt(const FPTProblem& problem, const StoppingRule& rule,
                    const SolveOptions& opts = {});

struct SimulateOptions {
    /// Brownian-bridge within-step crossing test; removes the O(sqrt(dt))
    /// discrete-monitoring bias of the plain Euler check.
    bool bridge_correction = true;
    double censor_warn_fraction = 0.05;
};

struct SimulationResult {
    std::vector<double> hitting_times;  // sorted, uncensored only
    std::size_t paths = 0;
    std::size_t censored = 0;
    std::vector<std::string> warnings;
};

/// Euler paths of standard Brownian motion checked against the boundary at
/// t_k = k dt; per-path seeded substreams, deterministic for any thread count.
SimulationResult simulate_fpt(const BoundarySpec& boundary, std::size_t paths, double dt,
                              double t_max, std::uint64_t seed,
                              const SimulateOptions& options = {});

/// sup over grid nodes of |cumulative-trapezoid(p) - empirical sub-CDF|; both
/// sides count censored paths in the denominator.
double sup_cdf_distance(const SimulationResult& sim, const GridFunction& p);

/// Two-sided KS statistic of the uncensored times against a closed-form CDF,
/// with the total path count in the denominator (sub-CDF convention).
double ks_distance(const SimulationResult& sim, const std::function<double(double)>& cdf);

/// Density of the first passage time of level a (b = 0 boundary):
/// a t^{-3/2} phi(a/sqrt(t)).
double levy_density(double a, double t);
double levy_cdf(double a, double t);

} // namespace fredholm
