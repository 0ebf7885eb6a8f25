#include "fredholm/mixing.hpp"

#include "fredholm/compute.hpp"
#include "fredholm/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fredholm {

SampleData::SampleData(std::vector<double> obs) : observations(std::move(obs)) {
    if (observations.size() < 2)
        throw std::invalid_argument("SampleData: need at least 2 observations");
    for (double v : observations)
        if (!std::isfinite(v)) throw std::invalid_argument("SampleData: non-finite observation");
}

namespace {
double sample_sd(const std::vector<double>& xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double v : xs) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : xs) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0));
}

// linear-interpolation quantile (R type 7)
double quantile(std::vector<double> sorted, double p) {
    const double pos = p * (static_cast<double>(sorted.size()) - 1.0);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}
} // namespace

double rule_of_thumb_bandwidth(const SampleData& data) {
    const double sd = sample_sd(data.observations);
    std::vector<double> sorted = data.observations;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (iqr == 0.0) spread = sd;  // heavily tied samples fall back to sd
    if (!(spread > 0.0)) throw std::runtime_error("rule_of_thumb_bandwidth: degenerate sample");
    return 0.9 * spread * std::pow(static_cast<double>(data.size()), -0.2);
}

double kde_bandwidth(const SampleData& data, const KDEConfig& config) {
    if (config.fixed_bandwidth) {
        if (!(*config.fixed_bandwidth > 0.0))
            throw std::invalid_argument("KDEConfig: fixed bandwidth must be > 0");
        return *config.fixed_bandwidth;
    }
    return rule_of_thumb_bandwidth(data);
}

GridFunction kde(const SampleData& data, const KDEConfig& config) {
    const double h = kde_bandwidth(data, config);
    GridPtr grid = config.x_grid;
    if (!grid) {
        const auto [lo, hi] =
            std::minmax_element(data.observations.begin(), data.observations.end());
        grid = make_uniform_grid(*lo - 4.0 * h, *hi + 4.0 * h, config.auto_grid_nodes);
    }
    std::vector<double> out(grid->size());
    const double scale = 1.0 / (static_cast<double>(data.size()) * h);
    compute::kde_sum(data.observations, 1.0 / h, scale, grid->nodes(), out);
    return {std::move(grid), std::move(out)};
}

MixingResult estimate_mixing(const SampleData& data, const KernelSpec& kernel,
                             GridPtr theta_grid, const KDEConfig& kde_config,
                             const StoppingRule& rule, MixingMethod method) {
    MixingResult res;
    const GridFunction p0 = normalize_to_density(constant(theta_grid, 1.0));
    if (method == MixingMethod::Em) {
        EmpiricalProblem problem(kernel, theta_grid, data.observations);
        res.solve = solve_empirical(problem, p0, rule);
        return res;
    }
    res.bandwidth = kde_bandwidth(data, kde_config);
    KDEConfig cfg = kde_config;
    const GridFunction f_raw = kde(data, cfg);
    res.f_target = normalize_to_density(f_raw);
    auto matrix = build_matrix_ptr(kernel, res.f_target.grid, theta_grid);
    res.warnings = mass_deficit_warnings(*matrix);
    const auto transformed = normalize_kernel_transform(matrix, res.f_target, p0);
    res.solve = solve(transformed.canonical_problem(), rule);
    // the kernel is already a density in x, so the canonical solution is the
    // mixing density up to the per-column truncation masses
    const auto rec = recover(transformed, res.solve);
    res.solve.p_final = rec.p;
    res.solve.f_final = mixture(*matrix, rec.p);
    return res;
}

SampleData sample_scenario(const MixingScenario& scenario, std::uint64_t seed) {
    const auto& grid = *scenario.true_mixing.grid;
    const auto& p = scenario.true_mixing.values;
    // cumulative trapezoid CDF over the tabulated density
    std::vector<double> cdf(grid.size(), 0.0);
    for (std::size_t j = 1; j < grid.size(); ++j)
        cdf[j] = cdf[j - 1] + 0.5 * (p[j] + p[j - 1]) * (grid.node(j) - grid.node(j - 1));
    const double total = cdf.back();
    if (!(total > 0.0)) throw std::runtime_error("sample_scenario: mixing density has zero mass");
    for (auto& v : cdf) v /= total;

    Rng rng(seed);
    std::vector<double> xs(scenario.n);
    for (std::size_t i = 0; i < scenario.n; ++i) {
        const double u = rng.uniform();
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        std::size_t j = static_cast<std::size_t>(it - cdf.begin());
        double theta;
        if (j == 0) {
            theta = grid.node(0);
        } else {
            const double c0 = cdf[j - 1], c1 = cdf[j];
            const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.0;
            theta = grid.node(j - 1) + frac * (grid.node(j) - grid.node(j - 1));
        }
        switch (scenario.kernel.kind()) {
            case KernelSpec::Kind::NormalLocation:
                xs[i] = theta + scenario.kernel.sigma() * rng.normal();
                break;
            case KernelSpec::Kind::NormalScale:
                xs[i] = std::sqrt(theta) * rng.normal();
                break;
            case KernelSpec::Kind::ExponentialRate:
                xs[i] = rng.exponential(theta);
                break;
            default:
                throw std::invalid_argument("sample_scenario: no sampler for kernel " +
                                            scenario.kernel.name());
        }
    }
    return SampleData(std::move(xs));
}

MixingScenario builtin_scenario(const std::string& name) {
    if (name == "deconv-1" || name == "deconv-2") {
        GridPtr theta = make_uniform_grid(0.0, 1.0, 401);
        auto raw = tabulate(theta, [&](double t) {
            if (name == "deconv-1") return std::pow(t, 4.0) * std::pow(1.0 - t, 4.0);
            return normal_pdf((t - 0.3) / 0.1) + 2.0 * normal_pdf((t - 0.7) / 0.1);
        });
        return {name, KernelSpec::normal_location(0.05), normalize_to_density(raw), 300, theta};
    }
    if (name == "scale-1" || name == "scale-2") {
        GridPtr theta = name == "scale-1" ? make_uniform_grid(0.01, 10.0, 401)
                                          : make_uniform_grid(0.005, 2.0, 401);
        auto raw = tabulate(theta, [&](double t) {
            if (name == "scale-1") return std::pow(t, -3.0) * std::exp(-1.0 / t);
            return std::exp(-5.0 * t);
        });
        return {name, KernelSpec::normal_scale(), normalize_to_density(raw), 300, theta};
    }
    throw std::invalid_argument("unknown scenario: " + name);
}

} // namespace fredholm
