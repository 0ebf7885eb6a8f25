// fredholm-kit: batch front-end for the Fredholm first-kind solvers.
//
// Commands
//   solve    general problem from a JSON config (kernel, f from CSV, transform)
//   mixdens  mixing-density estimation from a univariate data CSV
//   fpt      first-passage-time density for a Brownian-motion boundary
//   demo     named reproductions of the built-in experiments
//
// Every run writes run_config.json (all defaults materialized), diagnostics.json
// and at least one result CSV into --out; rerunning from the emitted
// run_config.json reproduces the CSVs byte for byte.

#include "fredholm/csv.hpp"
#include "fredholm/demos.hpp"
#include "fredholm/fpt.hpp"
#include "fredholm/mixing.hpp"
#include "fredholm/transforms.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fredholm;

namespace {

class Timer {
public:
    void start(const std::string& name) {
        name_ = name;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop(json& timings) {
        const auto dt = std::chrono::steady_clock::now() - t0_;
        timings[name_] =
            std::chrono::duration_cast<std::chrono::milliseconds>(dt).count();
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
};

struct RunContext {
    fs::path out_dir;
    json resolved_config;
    json diagnostics;
    Timer timer;

    explicit RunContext(const fs::path& out) : out_dir(out) {
        fs::create_directories(out_dir);
        diagnostics["warnings"] = json::array();
        diagnostics["timings_ms"] = json::object();
        diagnostics["mass_diagnostics"] = json::object();
    }

    void write_function(const std::string& name, const GridFunction& fn) {
        write_grid_function_csv(out_dir / (name + ".csv"), fn);
    }
    void finish() {
        std::ofstream cfg(out_dir / "run_config.json");
        cfg << resolved_config.dump(2) << "\n";
        std::ofstream diag(out_dir / "diagnostics.json");
        diag << diagnostics.dump(2) << "\n";
    }
};

void fill_solver_diag(json& diag, int iterations, const std::string& termination,
                      const std::vector<double>& history,
                      const std::vector<std::string>& warnings) {
    diag["iterations"] = iterations;
    diag["termination"] = termination;
    diag["divergence_history"] = history;
    for (const auto& w : warnings) diag["warnings"].push_back(w);
}

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config parse error in " + path + ": " + e.what());
    }
    return j;
}

/// Collect every config problem instead of failing fast.
struct ConfigErrors {
    std::vector<std::string> errors;
    void require(bool ok, const std::string& message) {
        if (!ok) errors.push_back(message);
    }
    void raise_if_any() const {
        if (errors.empty()) return;
        json j{{"error", "invalid config"}, {"details", errors}};
        throw std::runtime_error(j.dump());
    }
};

GridPtr grid_from_json(const json& g, const std::string& field, ConfigErrors& errs) {
    double lo = g.value("min", 0.0), hi = g.value("max", 1.0);
    std::size_t n = g.value("nodes", 401);
    errs.require(lo < hi, field + ": min must be < max");
    errs.require(n >= 2, field + ": need at least 2 nodes");
    if (!errs.errors.empty()) return nullptr;
    return make_uniform_grid(lo, hi, n);
}

StoppingRule rule_from_json(json& cfg) {
    StoppingRule rule;
    rule.max_iter = cfg.value("max_iter", 500);
    rule.tol_diff = cfg.value("tol_diff", 1e-5);
    rule.tol_div = cfg.value("tol_div", 0.0);
    cfg["max_iter"] = rule.max_iter;
    cfg["tol_diff"] = rule.tol_diff;
    cfg["tol_div"] = rule.tol_div;
    return rule;
}

KernelSpec kernel_from_json(const json& cfg, ConfigErrors& errs) {
    const std::string kind = cfg.value("kind", "");
    const double sigma = cfg.value("sigma", 0.05);
    if (kind == "exponential-rate") return KernelSpec::exponential_rate();
    if (kind == "normal-location") {
        errs.require(sigma > 0, "kernel.sigma must be > 0");
        return KernelSpec::normal_location(sigma > 0 ? sigma : 1.0);
    }
    if (kind == "normal-scale") return KernelSpec::normal_scale();
    if (kind == "tabulated") {
        const std::string file = cfg.value("file", "");
        errs.require(!file.empty(), "kernel.file required for tabulated kernels");
        if (file.empty()) return KernelSpec::exponential_rate();
        auto m = std::make_shared<const KernelMatrix>(read_kernel_matrix_csv(file));
        return KernelSpec::tabulated(std::move(m));
    }
    errs.require(false, "kernel.kind must be one of exponential-rate, normal-location, "
                        "normal-scale, tabulated");
    return KernelSpec::exponential_rate();
}

int cmd_demo(json cfg, const fs::path& out) {
    demos::DemoConfig dc;
    dc.name = cfg.value("name", "");
    if (dc.name.empty()) {
        json j{{"error", "invalid config"}, {"details", {"demo: missing name"}}};
        throw std::runtime_error(j.dump());
    }
    dc.seed = cfg.value("seed", std::uint64_t{0});
    dc.t = cfg.value("t", 50.0);
    if (cfg.contains("iterations")) dc.iterations = cfg["iterations"].get<int>();
    if (cfg.contains("data")) dc.data_file = cfg["data"].get<std::string>();
    dc.mc_samples = cfg.value("mc_samples", std::size_t{5000});
    dc.simulate_paths = cfg.value("simulate_paths", std::size_t{0});
    dc.simulate_dt = cfg.value("simulate_dt", 1e-3);
    dc.simulate_tmax = cfg.value("simulate_tmax", 50.0);

    RunContext ctx(out);
    ctx.resolved_config = json{{"command", "demo"},
                               {"name", dc.name},
                               {"seed", dc.seed},
                               {"t", dc.t},
                               {"mc_samples", dc.mc_samples},
                               {"simulate_paths", dc.simulate_paths},
                               {"simulate_dt", dc.simulate_dt},
                               {"simulate_tmax", dc.simulate_tmax}};
    if (dc.iterations) ctx.resolved_config["iterations"] = *dc.iterations;
    if (dc.data_file) ctx.resolved_config["data"] = *dc.data_file;

    ctx.timer.start("total");
    const demos::DemoOutput res = demos::run_demo(dc);
    ctx.timer.stop(ctx.diagnostics["timings_ms"]);

    ctx.diagnostics["command"] = "demo";
    ctx.diagnostics["name"] = dc.name;
    fill_solver_diag(ctx.diagnostics, res.iterations, res.termination, res.divergence_history,
                     res.warnings);
    for (const auto& [k, v] : res.mass_diagnostics)
        ctx.diagnostics["mass_diagnostics"][k] = v;
    for (const auto& [name, fn] : res.csv_functions) ctx.write_function(name, fn);
    for (const auto& [name, col] : res.csv_columns)
        write_column_csv(ctx.out_dir / (name + ".csv"), col, name);
    ctx.finish();
    return 0;
}

int cmd_mixdens(json cfg, const fs::path& out) {
    ConfigErrors errs;
    const std::string data_file = cfg.value("data", "");
    errs.require(!data_file.empty(), "mixdens: missing data file");
    errs.require(data_file.empty() || fs::exists(data_file),
                 "mixdens: data file does not exist: " + data_file);
    KernelSpec kernel = kernel_from_json(cfg.value("kernel", json::object()), errs);
    errs.raise_if_any();

    SampleData data(read_column_csv(data_file));

    json tg = cfg.value("theta_grid", json::object());
    GridPtr theta;
    if (tg.contains("min")) {
        theta = grid_from_json(tg, "theta_grid", errs);
        errs.raise_if_any();
    } else {
        const auto [lo, hi] =
            std::minmax_element(data.observations.begin(), data.observations.end());
        theta = make_uniform_grid(*lo, *hi, tg.value("nodes", std::size_t{401}));
    }
    cfg["theta_grid"] = {{"min", theta->front()}, {"max", theta->back()}, {"nodes", theta->size()}};

    KDEConfig kc;
    if (cfg.contains("bandwidth") && cfg["bandwidth"].is_number())
        kc.fixed_bandwidth = cfg["bandwidth"].get<double>();
    const std::string method_s = cfg.value("method", "kde");
    cfg["method"] = method_s;
    const MixingMethod method = method_s == "em" ? MixingMethod::Em : MixingMethod::KdePlugin;
    StoppingRule rule = rule_from_json(cfg);
    cfg["seed"] = cfg.value("seed", 0);

    RunContext ctx(out);
    cfg["command"] = "mixdens";
    cfg["data"] = data_file;
    ctx.resolved_config = cfg;

    ctx.timer.start("total");
    const MixingResult res = estimate_mixing(data, kernel, theta, kc, rule, method);
    ctx.timer.stop(ctx.diagnostics["timings_ms"]);

    ctx.diagnostics["command"] = "mixdens";
    fill_solver_diag(ctx.diagnostics, res.solve.iterations, to_string(res.solve.termination),
                     res.solve.divergence_history, res.solve.warnings);
    for (const auto& w : res.warnings) ctx.diagnostics["warnings"].push_back(w);
    ctx.diagnostics["mass_diagnostics"]["bandwidth"] = res.bandwidth;
    ctx.write_function("p_final", res.solve.p_final);
    if (method == MixingMethod::KdePlugin) {
        ctx.write_function("f_final", res.solve.f_final);
        ctx.write_function("f_kde", res.f_target);
        ctx.diagnostics["mass_diagnostics"]["l1_f_final_vs_kde"] =
            l1_distance(res.solve.f_final, res.f_target);
    }
    ctx.finish();
    return 0;
}

int cmd_fpt(json cfg, const fs::path& out) {
    ConfigErrors errs;
    const double a = cfg.value("a", 1.0);
    const double b = cfg.value("b", 0.1);
    const std::string bname = cfg.value("boundary", "sqrt");
    errs.require(a > 0, "fpt: a must be > 0");
    errs.require(b > 0, "fpt: b must be > 0");
    BoundarySpec boundary = level_boundary(1.0);
    if (bname == "sqrt")
        boundary = sqrt_boundary(a, b);
    else if (bname == "level")
        boundary = level_boundary(a);
    else if (bname == "power")
        boundary = power_boundary(a, b, cfg.value("gamma", 0.5));
    else if (bname == "tabulated") {
        const std::string file = cfg.value("boundary_file", "");
        errs.require(!file.empty(), "fpt: boundary_file required for tabulated boundaries");
        if (!file.empty()) boundary = tabulated_boundary(a, b, read_grid_function_csv(file));
    } else {
        errs.require(false, "fpt: boundary must be sqrt, level, power or tabulated");
    }
    errs.raise_if_any();

    const double theta_max = cfg.value("theta_max", 50.0);
    const std::size_t theta_nodes = cfg.value("theta_nodes", std::size_t{1000});
    std::vector<double> nodes(theta_nodes);
    const double h = theta_max / static_cast<double>(theta_nodes);
    for (std::size_t j = 0; j < theta_nodes; ++j) nodes[j] = h * static_cast<double>(j + 1);
    GridPtr theta = make_grid(std::move(nodes));

    MCConfig mc;
    mc.samples = cfg.value("mc_samples", std::size_t{5000});
    mc.seed = cfg.value("seed", std::uint64_t{0});
    mc.resample_each_iteration = cfg.value("resample_each_iteration", true);
    GridFunction p0 = tabulate(theta, [](double t) { return 0.01 * std::exp(-0.01 * t); });
    FPTProblem problem(boundary, theta, mc, std::move(p0));

    StoppingRule rule;
    rule.max_iter = cfg.value("iterations", 200);
    cfg["command"] = "fpt";
    cfg["a"] = a;
    cfg["b"] = b;
    cfg["boundary"] = bname;
    cfg["theta_max"] = theta_max;
    cfg["theta_nodes"] = theta_nodes;
    cfg["mc_samples"] = mc.samples;
    cfg["seed"] = mc.seed;
    cfg["resample_each_iteration"] = mc.resample_each_iteration;
    cfg["iterations"] = rule.max_iter;
    const std::size_t sim_paths = cfg.value("simulate_paths", std::size_t{0});
    cfg["simulate_paths"] = sim_paths;
    const double sim_dt = cfg.value("simulate_dt", 1e-3);
    const double sim_tmax = cfg.value("simulate_tmax", theta_max);
    cfg["simulate_dt"] = sim_dt;
    cfg["simulate_tmax"] = sim_tmax;

    RunContext ctx(out);
    ctx.resolved_config = cfg;

    ctx.timer.start("solve");
    const FPTResult res = solve_fpt(problem, rule);
    ctx.timer.stop(ctx.diagnostics["timings_ms"]);

    ctx.diagnostics["command"] = "fpt";
    fill_solver_diag(ctx.diagnostics, res.tilde.iterations, to_string(res.tilde.termination),
                     res.tilde.divergence_history, res.tilde.warnings);
    ctx.diagnostics["mass_diagnostics"]["p_mass"] = res.p_mass;
    ctx.write_function("tilde_p", res.tilde.p_final);
    ctx.write_function("p", res.p);

    if (sim_paths > 0) {
        ctx.timer.start("simulate");
        const SimulationResult sim =
            simulate_fpt(boundary, sim_paths, sim_dt, sim_tmax, mc.seed + 1);
        ctx.timer.stop(ctx.diagnostics["timings_ms"]);
        for (const auto& w : sim.warnings) ctx.diagnostics["warnings"].push_back(w);
        ctx.diagnostics["mass_diagnostics"]["censored_fraction"] =
            static_cast<double>(sim.censored) / static_cast<double>(sim.paths);
        ctx.diagnostics["mass_diagnostics"]["sup_cdf_distance"] = sup_cdf_distance(sim, res.p);
        write_column_csv(ctx.out_dir / "simulated_hitting_times.csv", sim.hitting_times,
                         "hitting_time");
    }
    ctx.finish();
    return 0;
}

int cmd_solve(json cfg, const fs::path& out) {
    ConfigErrors errs;
    const std::string f_file = cfg.value("f", "");
    errs.require(!f_file.empty(), "solve: missing f (CSV of the target function)");
    errs.require(f_file.empty() || fs::exists(f_file), "solve: f file does not exist: " + f_file);
    KernelSpec kernel = kernel_from_json(cfg.value("kernel", json::object()), errs);
    json tg = cfg.value("theta_grid", json::object());
    errs.require(tg.contains("min") && tg.contains("max"),
                 "solve: theta_grid {min,max,nodes} required");
    errs.raise_if_any();
    GridPtr theta = grid_from_json(tg, "theta_grid", errs);
    errs.raise_if_any();

    GridFunction f = read_grid_function_csv(f_file);
    KernelMatrixPtr matrix = build_matrix_ptr(kernel, f.grid, theta);

    const std::string transform = cfg.value("transform", "normalize-kernel");
    const double t = cfg.value("t", 0.0);  // <= 0 = auto
    StoppingRule rule = rule_from_json(cfg);
    const bool renormalize = cfg.value("renormalize", true);

    cfg["command"] = "solve";
    cfg["f"] = f_file;
    cfg["transform"] = transform;
    cfg["t"] = t;
    cfg["renormalize"] = renormalize;
    cfg["seed"] = cfg.value("seed", 0);
    cfg["theta_grid"] = {{"min", theta->front()}, {"max", theta->back()}, {"nodes", theta->size()}};

    TransformedProblem tp;
    if (transform == "normalize-kernel") {
        tp = normalize_kernel_transform(matrix, normalize_to_density(f));
    } else if (transform == "shift") {
        tp = shift_transform(matrix, f, t);
    } else if (transform == "split") {
        const json mk = cfg.value("kernel_minus", json::object());
        ConfigErrors e2;
        KernelSpec kminus = kernel_from_json(mk, e2);
        e2.raise_if_any();
        KernelMatrixPtr mminus = build_matrix_ptr(kminus, f.grid, theta);
        tp = split_kernel_transform(*matrix, *mminus, f, t);
    } else {
        json j{{"error", "invalid config"},
               {"details", {"solve: transform must be normalize-kernel, shift or split"}}};
        throw std::runtime_error(j.dump());
    }

    RunContext ctx(out);
    ctx.resolved_config = cfg;
    ctx.timer.start("solve");
    SolveOptions opts;
    opts.renormalize = renormalize;
    const SolverResult sol = solve(tp.canonical_problem(), rule, opts);
    const Recovered rec = recover(tp, sol);
    ctx.timer.stop(ctx.diagnostics["timings_ms"]);

    ctx.diagnostics["command"] = "solve";
    fill_solver_diag(ctx.diagnostics, sol.iterations, to_string(sol.termination),
                     sol.divergence_history, sol.warnings);
    for (const auto& w : rec.warnings) ctx.diagnostics["warnings"].push_back(w);
    for (const auto& w : mass_deficit_warnings(*matrix))
        ctx.diagnostics["warnings"].push_back(w);
    ctx.diagnostics["mass_diagnostics"]["shift_t"] = tp.shift_t;
    ctx.diagnostics["mass_diagnostics"]["mass_scale"] = tp.mass_scale;
    if (tp.doubled)
        ctx.diagnostics["mass_diagnostics"]["split_discrepancy_l1"] = rec.split_discrepancy_l1;
    ctx.write_function("p_final", rec.p);
    ctx.write_function("f_canonical", tp.canonical_f);
    ctx.finish();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iterative solvers for Fredholm integral equations of the first kind"};
    app.require_subcommand(1);

    std::string config_file, out_dir = "runs/latest", demo_name, data_file;
    std::optional<std::uint64_t> seed;
    std::optional<double> t_override, sigma;
    std::optional<int> iterations;
    std::optional<std::size_t> sim_paths;
    bool list_demos = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_file, "JSON config file");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed, "RNG seed");
    };

    CLI::App* demo = app.add_subcommand("demo", "run a named built-in experiment");
    demo->add_option("name", demo_name, "demo name");
    demo->add_flag("--list", list_demos, "list demo names");
    demo->add_option("--t", t_override, "shift constant for the signed demos");
    demo->add_option("--iterations", iterations, "override the preset iteration count");
    demo->add_option("--data", data_file, "input data CSV (galaxy demo)");
    demo->add_option("--simulate-paths", sim_paths, "fpt-sqrt: also run the path-simulation oracle");
    add_common(demo);

    CLI::App* mixdens = app.add_subcommand("mixdens", "estimate a mixing density from data");
    mixdens->add_option("--data", data_file, "univariate CSV sample");
    mixdens->add_option("--sigma", sigma, "normal-location kernel sigma");
    mixdens->add_option("--iterations", iterations, "max iterations");
    add_common(mixdens);

    CLI::App* fpt = app.add_subcommand("fpt", "first-passage-time density");
    fpt->add_option("--iterations", iterations, "iteration count");
    fpt->add_option("--simulate-paths", sim_paths, "also run the path-simulation oracle");
    add_common(fpt);

    CLI::App* solve = app.add_subcommand("solve", "solve a configured Fredholm problem");
    add_common(solve);

    CLI11_PARSE(app, argc, argv);

    try {
        json cfg = config_file.empty() ? json::object() : load_config_file(config_file);

        if (demo->parsed()) {
            if (list_demos) {
                for (const auto& n : demos::demo_names()) std::cout << n << "\n";
                return 0;
            }
            if (!demo_name.empty()) cfg["name"] = demo_name;
            if (seed) cfg["seed"] = *seed;
            if (t_override) cfg["t"] = *t_override;
            if (iterations) cfg["iterations"] = *iterations;
            if (!data_file.empty()) cfg["data"] = data_file;
            if (sim_paths) cfg["simulate_paths"] = *sim_paths;
            return cmd_demo(cfg, out_dir);
        }
        if (mixdens->parsed()) {
            if (!data_file.empty()) cfg["data"] = data_file;
            if (seed) cfg["seed"] = *seed;
            if (iterations) cfg["max_iter"] = *iterations;
            if (sigma) cfg["kernel"] = json{{"kind", "normal-location"}, {"sigma", *sigma}};
            if (!cfg.contains("kernel"))
                cfg["kernel"] = json{{"kind", "normal-location"}, {"sigma", 0.05}};
            return cmd_mixdens(cfg, out_dir);
        }
        if (fpt->parsed()) {
            if (seed) cfg["seed"] = *seed;
            if (iterations) cfg["iterations"] = *iterations;
            if (sim_paths) cfg["simulate_paths"] = *sim_paths;
            return cmd_fpt(cfg, out_dir);
        }
        if (solve->parsed()) {
            if (seed) cfg["seed"] = *seed;
            return cmd_solve(cfg, out_dir);
        }
    } catch (const std::exception& e) {
        // machine-readable error JSON on stdout, nonzero exit
        std::string msg = e.what();
        json j;
        if (!msg.empty() && msg.front() == '{') {
            try {
                j = json::parse(msg);
            } catch (...) {
                j = json{{"error", msg}};
            }
        } else {
            j = json{{"error", msg}};
        }
        std::cout << j.dump(2) << std::endl;
        return 1;
    }
    return 0;
}
