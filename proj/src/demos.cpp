#include "fredholm/demos.hpp"

#include "fredholm/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fredholm::demos {

namespace {
double lgamma_pos(double x) { return std::lgamma(x); }
}

double beta_pdf(double alpha, double beta, double t) {
    if (t < 0.0 || t > 1.0) return 0.0;
    if (t == 0.0) return alpha < 1.0 ? INFINITY : (alpha == 1.0 ? beta : 0.0);
    if (t == 1.0) return beta < 1.0 ? INFINITY : (beta == 1.0 ? alpha : 0.0);
    const double logc = lgamma_pos(alpha + beta) - lgamma_pos(alpha) - lgamma_pos(beta);
    return std::exp(logc + (alpha - 1.0) * std::log(t) + (beta - 1.0) * std::log1p(-t));
}

double gamma_pdf(double shape, double t) {
    if (t < 0.0) return 0.0;
    if (t == 0.0) return shape > 1.0 ? 0.0 : (shape == 1.0 ? 1.0 : INFINITY);
    return std::exp((shape - 1.0) * std::log(t) - t - lgamma_pos(shape));
}

double pareto_pdf(double a, double x) {
    if (x < 0.0) return 0.0;
    return a * std::pow(x + 1.0, -(a + 1.0));
}

double half_cauchy_pdf(double t) {
    if (t < 0.0) return 0.0;
    return (2.0 / M_PI) / (1.0 + t * t);
}

ParetoDemo make_pareto(double a) {
    ParetoDemo d;
    d.theta_grid = make_uniform_grid(0.0, 50.0, 2001);
    d.x_grid = make_uniform_grid(0.0, 20.0, 2001);
    d.matrix = build_matrix_ptr(KernelSpec::exponential_rate(), d.x_grid, d.theta_grid);
    d.f_target = normalize_to_density(tabulate(d.x_grid, [a](double x) { return pareto_pdf(a, x); }));
    d.p_truth =
        normalize_to_density(tabulate(d.theta_grid, [a](double t) { return gamma_pdf(a, t); }));
    GridFunction p0 = normalize_to_density(tabulate(d.theta_grid, half_cauchy_pdf));
    // theta = 0 gives an all-zero kernel column; it carries no mass and is
    // allowed through column normalization
    d.transformed = normalize_kernel_transform(d.matrix, d.f_target, p0,
                                               /*allow_zero_columns=*/true);
    return d;
}

TransformedProblem SignedDemo::transform(double t) const {
    if (split) return split_kernel_transform(*k_plus, *k_minus, f, t);
    return shift_transform(k_plus, f, t);
}

SignedDemo make_signed(int which) {
    SignedDemo d;
    d.name = which == 1 ? "signed-1" : "signed-2";
    d.split = false;
    d.iterations = 10;
    d.theta_grid = make_uniform_grid(0.0, 1.0, 401);
    d.x_grid = make_uniform_grid(-0.25, 1.25, 1501);
    d.k_plus = build_matrix_ptr(KernelSpec::normal_location(0.05), d.x_grid, d.theta_grid);
    d.p_truth = tabulate(d.theta_grid, [which](double t) {
        return which == 1 ? beta_pdf(2, 5, t) - beta_pdf(4, 1, t)
                          : beta_pdf(10, 1, t) - beta_pdf(1, 10, t);
    });
    d.f = mixture(*d.k_plus, d.p_truth);
    return d;
}

SignedDemo make_genkernel(int which) {
    SignedDemo d;
    d.name = which == 1 ? "genkernel-1" : "genkernel-2";
    d.split = true;
    d.iterations = 5;
    d.theta_grid = make_uniform_grid(0.0, 1.0, 401);
    d.x_grid = make_uniform_grid(-1.25, 1.25, 2501);
    d.k_plus = build_matrix_ptr(KernelSpec::normal_location(0.05), d.x_grid, d.theta_grid);
    d.k_minus =
        build_matrix_ptr(KernelSpec::normal_location_reflected(0.05), d.x_grid, d.theta_grid);
    d.p_truth = tabulate(d.theta_grid, [which](double t) {
        return which == 1 ? beta_pdf(2, 3, t) - beta_pdf(3, 2, t)
                          : beta_pdf(2, 7, t) + beta_pdf(3, 4, t) - 1.0;
    });
    GridFunction fplus = mixture(*d.k_plus, d.p_truth);
    GridFunction fminus = mixture(*d.k_minus, d.p_truth);
    d.f = fplus;
    for (std::size_t i = 0; i < d.f.size(); ++i) d.f.values[i] -= fminus.values[i];
    return d;
}

FPTProblem make_fpt_sqrt(std::uint64_t seed) {
    // theta_j = 0.05 j, j = 1..1000
    std::vector<double> nodes(1000);
    for (std::size_t j = 0; j < 1000; ++j) nodes[j] = 0.05 * static_cast<double>(j + 1);
    GridPtr theta = make_grid(std::move(nodes));
    GridFunction p0 = tabulate(theta, [](double t) { return 0.01 * std::exp(-0.01 * t); });
    MCConfig mc;
    mc.samples = 5000;
    mc.seed = seed;
    return {sqrt_boundary(1.0, 0.1), theta, mc, std::move(p0)};
}

const std::vector<std::string>& demo_names() {
    static const std::vector<std::string> names = {
        "pareto",   "galaxy",      "deconv-1", "deconv-2",    "scale-1",  "scale-2",
        "fpt-sqrt", "signed-1",    "signed-2", "genkernel-1", "genkernel-2"};
    return names;
}

namespace {

DemoOutput run_pareto(const DemoConfig& cfg) {
    ParetoDemo d = make_pareto();
    StoppingRule rule;
    rule.max_iter = cfg.iterations.value_or(d.iterations);
    const SolverResult sol = solve(d.transformed.canonical_problem(), rule);
    const Recovered rec = recover(d.transformed, sol);

    DemoOutput out;
    out.iterations = sol.iterations;
    out.termination = to_string(sol.termination);
    out.divergence_history = sol.divergence_history;
    out.warnings = sol.warnings;
    for (const auto& w : rec.warnings) out.warnings.push_back(w);
    GridFunction f_fit = mixture(*d.matrix, rec.p);
    out.mass_diagnostics["p_final_mass"] = trapezoid_integrate(rec.p);
    out.csv_functions = {{"p_final", rec.p},
                         {"f_final", f_fit},
                         {"p_truth", d.p_truth},
                         {"f_target", d.f_target}};
    return out;
}

DemoOutput run_signed(const DemoConfig& cfg, SignedDemo d) {
    StoppingRule rule;
    rule.max_iter = cfg.iterations.value_or(d.iterations);
    const TransformedProblem tp = d.transform(cfg.t);
    const SolverResult sol = solve(tp.canonical_problem(), rule);
    const Recovered rec = recover(tp, sol);

    DemoOutput out;
    out.iterations = sol.iterations;
    out.termination = to_string(sol.termination);
    out.divergence_history = sol.divergence_history;
    out.warnings = sol.warnings;
    for (const auto& w : rec.warnings) out.warnings.push_back(w);
    out.mass_diagnostics["shift_t"] = tp.shift_t;
    out.mass_diagnostics["mass_scale"] = tp.mass_scale;
    if (d.split) out.mass_diagnostics["split_discrepancy_l1"] = rec.split_discrepancy_l1;
    out.csv_functions = {{"p_final", rec.p}, {"p_truth", d.p_truth}, {"f_target", d.f}};
    return out;
}

DemoOutput run_mixing_scenario(const DemoConfig& cfg, const std::string& name) {
    const MixingScenario scenario = builtin_scenario(name);
    const SampleData data = sample_scenario(scenario, cfg.seed);
    StoppingRule rule;
    rule.max_iter = cfg.iterations.value_or(500);
    if (!cfg.iterations) rule.tol_diff = 1e-5;
    KDEConfig kc;
    const MixingResult res = estimate_mixing(data, scenario.kernel, scenario.theta_grid, kc, rule);

    DemoOutput out;
    out.iterations = res.solve.iterations;
    out.termination = to_string(res.solve.termination);
    out.divergence_history = res.solve.divergence_history;
    out.warnings = res.solve.warnings;
    for (const auto& w : res.warnings) out.warnings.push_back(w);
    out.mass_diagnostics["bandwidth"] = res.bandwidth;
    out.mass_diagnostics["l1_f_final_vs_kde"] = l1_distance(res.solve.f_final, res.f_target);
    out.csv_functions = {{"p_final", res.solve.p_final},
                         {"f_final", res.solve.f_final},
                         {"f_kde", res.f_target},
                         {"p_truth", scenario.true_mixing}};
    out.csv_columns.push_back({"sample", data.observations});
    return out;
}

DemoOutput run_galaxy(const DemoConfig& cfg) {
    if (!cfg.data_file)
        throw std::invalid_argument(
            "demo galaxy: pass --data <file.csv> (the 82-point galaxy velocity dataset is "
            "not bundled; see README)");
    SampleData data(read_column_csv(*cfg.data_file));
    const double h = rule_of_thumb_bandwidth(data);
    // deconvolution kernel width = KDE bandwidth ("--sigma auto" convention)
    const KernelSpec kernel = KernelSpec::normal_location(h);
    const auto [lo, hi] =
        std::minmax_element(data.observations.begin(), data.observations.end());
    GridPtr theta = make_uniform_grid(*lo, *hi, 401);
    StoppingRule rule;
    rule.max_iter = cfg.iterations.value_or(25);
    KDEConfig kc;
    const MixingResult res = estimate_mixing(data, kernel, theta, kc, rule);

    DemoOutput out;
    out.iterations = res.solve.iterations;
    out.termination = to_string(res.solve.termination);
    out.divergence_history = res.solve.divergence_history;
    out.warnings = res.solve.warnings;
    out.mass_diagnostics["bandwidth"] = res.bandwidth;
    out.csv_functions = {{"p_final", res.solve.p_final},
                         {"f_final", res.solve.f_final},
                         {"f_kde", res.f_target}};
    return out;
}

DemoOutput run_fpt(const DemoConfig& cfg) {
    FPTProblem problem = make_fpt_sqrt(cfg.seed);
    problem.mc.samples = cfg.mc_samples;
    StoppingRule rule;
    rule.max_iter = cfg.iterations.value_or(200);
    const FPTResult res = solve_fpt(problem, rule);

    DemoOutput out;
    out.iterations = res.tilde.iterations;
    out.termination = to_string(res.tilde.termination);
    out.divergence_history = res.tilde.divergence_history;
    out.warnings = res.tilde.warnings;
    out.mass_diagnostics["p_mass"] = res.p_mass;
    out.csv_functions = {{"tilde_p", res.tilde.p_final}, {"p", res.p}};
    if (cfg.simulate_paths > 0) {
        const SimulationResult sim =
            simulate_fpt(problem.boundary, cfg.simulate_paths, cfg.simulate_dt,
                         cfg.simulate_tmax, cfg.seed + 1);
        for (const auto& w : sim.warnings) out.warnings.push_back(w);
        out.mass_diagnostics["censored_fraction"] =
            static_cast<double>(sim.censored) / static_cast<double>(sim.paths);
        out.mass_diagnostics["sup_cdf_distance"] = sup_cdf_distance(sim, res.p);
        out.csv_columns.push_back({"simulated_hitting_times", sim.hitting_times});
    }
    return out;
}

} // namespace

DemoOutput run_demo(const DemoConfig& cfg) {
    const std::string& n = cfg.name;
    if (n == "pareto") return run_pareto(cfg);
    if (n == "galaxy") return run_galaxy(cfg);
    if (n == "deconv-1" || n == "deconv-2" || n == "scale-1" || n == "scale-2")
        return run_mixing_scenario(cfg, n);
    if (n == "signed-1") return run_signed(cfg, make_signed(1));
    if (n == "signed-2") return run_signed(cfg, make_signed(2));
    if (n == "genkernel-1") return run_signed(cfg, make_genkernel(1));
    if (n == "genkernel-2") return run_signed(cfg, make_genkernel(2));
    if (n == "fpt-sqrt") return run_fpt(cfg);
    throw std::invalid_argument("unknown demo: " + n + " (see `fredholm-kit demo --list`)");
}

} // namespace fredholm::demos
