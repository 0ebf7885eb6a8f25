#include "fredholm/fpt.hpp"

#include "fredholm/compute.hpp"
#include "fredholm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fredholm {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024;
}

BoundarySpec sqrt_boundary(double a, double b) {
    return {a, b, [](double t) { return std::sqrt(t); }, "sqrt"};
}

BoundarySpec level_boundary(double a) {
    return {a, 1.0, [](double) { return 0.0; }, "level"};
}

BoundarySpec power_boundary(double a, double b, double gamma) {
    if (!(gamma > 0.0) || gamma > 0.5)
        throw std::invalid_argument("power_boundary: gamma must be in (0, 1/2]");
    return {a, b, [gamma](double t) { return std::pow(t, gamma); }, "power"};
}

BoundarySpec tabulated_boundary(double a, double b, GridFunction h_values) {
    auto grid = h_values.grid;
    auto values = std::make_shared<const std::vector<double>>(std::move(h_values.values));
    auto h = [grid, values](double t) {
        const auto nodes = grid->nodes();
        if (t <= nodes.front()) return (*values).front() * (t / std::max(nodes.front(), 1e-300));
        if (t >= nodes.back()) return (*values).back();
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
        const std::size_t j = static_cast<std::size_t>(it - nodes.begin());
        const double frac = (t - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
        return (*values)[j - 1] * (1.0 - frac) + (*values)[j] * frac;
    };
    return {a, b, std::move(h), "tabulated"};
}

void validate_boundary(const BoundarySpec& boundary, const Grid1D& theta_grid) {
    if (!(boundary.a > 0.0) || !(boundary.b > 0.0))
        throw std::invalid_argument("BoundarySpec: a and b must be > 0");
    if (std::abs(boundary.h(0.0)) > 1e-12)
        throw std::invalid_argument("BoundarySpec: h(0) must be 0");
    for (std::size_t j = 0; j < theta_grid.size(); ++j) {
        const double t = theta_grid.node(j);
        if (boundary.h(t) > std::sqrt(t) + 1e-12)
            throw std::invalid_argument("BoundarySpec: h(t) exceeds sqrt(t) at t = " +
                                        std::to_string(t));
    }
}

FPTProblem::FPTProblem(BoundarySpec boundary_, GridPtr theta_grid_, MCConfig mc_,
                       GridFunction p0_)
    : boundary(std::move(boundary_)), theta_grid(std::move(theta_grid_)), mc(mc_),
      p0(std::move(p0_)) {
    if (theta_grid->front() <= 0.0)
        throw std::invalid_argument("FPTProblem: theta-grid must be strictly positive");
    if (mc.samples < 1) throw std::invalid_argument("FPTProblem: need at least one MC sample");
    if (!same_grid(*p0.grid, *theta_grid))
        throw std::invalid_argument("FPTProblem: p0 is not on the theta-grid");
    for (double v : p0.values)
        if (!(v > 0.0)) throw std::invalid_argument("FPTProblem: p0 must be strictly positive");
    validate_boundary(boundary, *theta_grid);
}

KernelSpec fpt_kernel(const BoundarySpec& boundary) {
    return KernelSpec::truncated_normal_fpt(boundary.b, boundary.h);
}

double ExponentialRhs::pdf(double x) const { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); }

ExponentialRhs fpt_rhs(const BoundarySpec& boundary) {
    if (!(boundary.a > 0.0)) throw std::invalid_argument("fpt_rhs: a must be > 0");
    return {boundary.a};
}

namespace {

struct ThetaTables {
    std::vector<double> mu;       // b h(theta)/theta
    std::vector<double> sq;       // sqrt(theta)
    std::vector<double> inv_psi;  // 1/Psi(-b h/sqrt(theta)) = 1/Phi(mu sqrt(theta))
};

ThetaTables theta_tables(const BoundarySpec& boundary, const Grid1D& grid) {
    ThetaTables t;
    const std::size_t m = grid.size();
    t.mu.resize(m);
    t.sq.resize(m);
    t.inv_psi.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double theta = grid.node(j);
        t.sq[j] = std::sqrt(theta);
        t.mu[j] = boundary.b * boundary.h(theta) / theta;
        t.inv_psi[j] = 1.0 / normal_cdf(t.mu[j] * t.sq[j]);
    }
    return t;
}

// rows: samples, cols: theta nodes
void fill_sample_kernel(const ThetaTables& t, std::span<const double> xs,
                        std::vector<double>& entries) {
    const std::size_t cols = t.mu.size();
    entries.resize(xs.size() * cols);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double x = xs[static_cast<std::size_t>(i)];
        double* row = entries.data() + static_cast<std::size_t>(i) * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            const double z = (x - t.mu[j]) * t.sq[j];
            row[j] = normal_pdf(z) * t.sq[j] * t.inv_psi[j];
        }
    }
}

std::vector<double> draw_sample(const FPTProblem& problem, std::uint64_t iteration) {
    const std::uint64_t index = problem.mc.resample_each_iteration ? iteration : 0;
    Rng rng = Rng::substream(problem.mc.seed, index);
    std::vector<double> xs(problem.mc.samples);
    const double rate = problem.boundary.a;
    for (auto& x : xs) x = rng.exponential(rate);
    return xs;
}

GridFunction mc_step_impl(const FPTProblem& problem, const ThetaTables& tables,
                          const GridFunction& p_prev, std::uint64_t iteration,
                          const SolveOptions& opts) {
    const auto xs = draw_sample(problem, iteration);
    std::vector<double> entries;
    fill_sample_kernel(tables, xs, entries);
    const std::size_t n = xs.size();
    const std::size_t m = problem.theta_grid->size();

    const auto& grid = *problem.theta_grid;
    std::vector<double> wp(m);
    for (std::size_t j = 0; j < m; ++j) wp[j] = grid.weight(j) * p_prev.values[j];
    std::vector<double> fm(n);
    compute::matvec_rows(entries, n, m, wp, fm);

    std::vector<double> wr(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(fm[i] > 0.0))
            throw std::runtime_error("mc_update_step: mixture vanished at sample " +
                                     std::to_string(i));
        wr[i] = 1.0 / (static_cast<double>(n) * fm[i]);
    }
    std::vector<double> factors(m);
    compute::matvec_cols(entries, n, m, wr, factors);

    GridFunction p{problem.theta_grid, std::vector<double>(m)};
    for (std::size_t j = 0; j < m; ++j) p.values[j] = p_prev.values[j] * factors[j];
    if (opts.renormalize) {
        const double mass = trapezoid_integrate(p);
        if (!(mass > 0.0)) throw std::runtime_error("mc_update_step: iterate has zero mass");
        for (auto& v : p.values) v /= mass;
    }
    return p;
}

} // namespace

GridFunction mc_update_step(const FPTProblem& problem, const GridFunction& p_prev,
                            std::uint64_t iteration, const SolveOptions& opts) {
    const auto tables = theta_tables(problem.boundary, *problem.theta_grid);
    return mc_step_impl(problem, tables, p_prev, iteration, opts);
}

GridFunction untransform(const BoundarySpec& boundary, const GridFunction& tilde_p,
                         bool renormalize) {
    GridFunction p = tilde_p;
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double theta = p.grid->node(j);
        const double sq = std::sqrt(theta);
        const double h = boundary.h(theta);
        const double denom = boundary.a * kSqrt2Pi *
                             std::exp(0.5 * boundary.b * boundary.b * h * h / theta) *
                             normal_cdf(boundary.b * h / sq);
        p.values[j] = sq * tilde_p.values[j] / denom;
    }
    if (renormalize) p = normalize_to_density(p);
    return p;
}

FPTResult solve_fpt(const FPTProblem& problem, const StoppingRule& rule,
                    const SolveOptions& opts) {
    const auto tables = theta_tables(problem.boundary, *problem.theta_grid);

    // diagnostic target: f tabulated on [0, 20/a], used only for D_m
    const ExponentialRhs rhs = fpt_rhs(problem.boundary);
    GridPtr x_grid = make_uniform_grid(0.0, 20.0 / rhs.rate, 1001);
    const GridFunction f_tab =
        normalize_to_density(tabulate(x_grid, [&](double x) { return rhs.pdf(x); }));
    const auto diag_matrix = build_matrix_ptr(fpt_kernel(problem.boundary), x_grid,
                                              problem.theta_grid);

    FPTResult res;
    SolverResult& s = res.tilde;
    s.p_final = normalize_to_density(problem.p0);
    s.f_final = mixture(*diag_matrix, s.p_final);
    s.divergence_history.push_back(kl_divergence(f_tab, s.f_final));
    s.termination = Termination::MaxIter;
    for (int m = 1; m <= rule.max_iter; ++m) {
        s.p_final = mc_step_impl(problem, tables, s.p_final,
                                 static_cast<std::uint64_t>(m), opts);
        s.f_final = mixture(*diag_matrix, s.p_final);
        const double d_prev = s.divergence_history.back();
        const double d = kl_divergence(f_tab, s.f_final);
        s.divergence_history.push_back(d);
        s.iterations = m;
        if (d > d_prev + 1e-10) {
            std::ostringstream ss;
            ss << "divergence increased at iteration " << m << " (MC jitter)";
            s.warnings.push_back(ss.str());
        }
        if (rule.tol_div > 0.0 && d < rule.tol_div) {
            s.termination = Termination::DivergenceBelowTol;
            break;
        }
        if (rule.tol_diff > 0.0 && d_prev - d < rule.tol_diff) {
            s.termination = Termination::DiffBelowTol;
            break;
        }
    }
    res.p = untransform(problem.boundary, s.p_final, false);
    res.p_mass = trapezoid_integrate(res.p);
    return res;
}

SimulationResult simulate_fpt(const BoundarySpec& boundary, std::size_t paths, double dt,
                              double t_max, std::uint64_t seed,
                              const SimulateOptions& options) {
    if (!(dt > 0.0)) throw std::invalid_argument("simulate_fpt: dt must be > 0");
    if (!(t_max > dt)) throw std::invalid_argument("simulate_fpt: t_max must exceed dt");
    const std::size_t nsteps = static_cast<std::size_t>(std::llround(t_max / dt));
    std::vector<double> bound(nsteps + 1);
    for (std::size_t k = 0; k <= nsteps; ++k)
        bound[k] = boundary.value(dt * static_cast<double>(k));

    std::vector<double> hit(paths, -1.0);
    const double sq = std::sqrt(dt);
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(paths);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t pi = 0; pi < n; ++pi) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(pi));
        double B = 0.0;
        for (std::size_t k = 1; k <= nsteps; ++k) {
            const double gap_prev = bound[k - 1] - B;
            B += sq * rng.normal();
            const double gap = bound[k] - B;
            if (gap <= 0.0) {
                hit[pi] = dt * static_cast<double>(k);
                break;
            }
            if (options.bridge_correction) {
                // within-step crossing of the bridge between the two endpoints
                const double pc = std::exp(-2.0 * gap_prev * gap / dt);
                if (rng.uniform() < pc) {
                    hit[pi] = dt * static_cast<double>(k);
                    break;
                }
            }
        }
    }

    SimulationResult res;
    res.paths = paths;
    for (double t : hit) {
        if (t < 0.0)
            ++res.censored;
        else
            res.hitting_times.push_back(t);
    }
    std::sort(res.hitting_times.begin(), res.hitting_times.end());
    const double frac = static_cast<double>(res.censored) / static_cast<double>(paths);
    if (frac > options.censor_warn_fraction) {
        std::ostringstream ss;
        ss << "censoring fraction " << frac << " exceeds " << options.censor_warn_fraction
           << " (t_max = " << t_max << ")";
        res.warnings.push_back(ss.str());
    }
    return res;
}

double sup_cdf_distance(const SimulationResult& sim, const GridFunction& p) {
    const auto& grid = *p.grid;
    const double inv_n = 1.0 / static_cast<double>(sim.paths);
    double cdf = 0.0, sup = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        if (j > 0)
            cdf += 0.5 * (p.values[j] + p.values[j - 1]) * (grid.node(j) - grid.node(j - 1));
        const auto it = std::upper_bound(sim.hitting_times.begin(), sim.hitting_times.end(),
                                         grid.node(j));
        const double emp = static_cast<double>(it - sim.hitting_times.begin()) * inv_n;
        sup = std::max(sup, std::abs(cdf - emp));
    }
    return sup;
}

double ks_distance(const SimulationResult& sim, const std::function<double(double)>& cdf) {
    const double inv_n = 1.0 / static_cast<double>(sim.paths);
    double sup = 0.0;
    for (std::size_t i = 0; i < sim.hitting_times.size(); ++i) {
        const double F = cdf(sim.hitting_times[i]);
        sup = std::max(sup, std::abs(static_cast<double>(i + 1) * inv_n - F));
        sup = std::max(sup, std::abs(static_cast<double>(i) * inv_n - F));
    }
    return sup;
}

double levy_density(double a, double t) {
    if (!(t > 0.0)) return 0.0;
    return a * std::pow(t, -1.5) * normal_pdf(a / std::sqrt(t));
}

double levy_cdf(double a, double t) {
    if (!(t > 0.0)) return 0.0;
    return 2.0 * normal_cdf(-a / std::sqrt(t));
}

} // namespace fredholm
