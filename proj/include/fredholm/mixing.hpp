#pragma once

#include "fredholm/solver.hpp"
#include "fredholm/transforms.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fredholm {

struct SampleData {
    std::vector<double> observations;

    explicit SampleData(std::vector<double> obs);
    std::size_t size() const { return observations.size(); }
};

/// Bandwidth is either fixed or the normal-reference rule
/// 0.9 min(sd, IQR/1.34) n^{-1/5}.
struct KDEConfig {
    std::optional<double> fixed_bandwidth;  // empty = rule of thumb
    GridPtr x_grid;                         // null = data range +- 4h
    std::size_t auto_grid_nodes = 1001;
};

double rule_of_thumb_bandwidth(const SampleData& data);

/// Gaussian kernel density estimate tabulated on the configured grid.
GridFunction kde(const SampleData& data, const KDEConfig& config);
double kde_bandwidth(const SampleData& data, const KDEConfig& config);

enum class MixingMethod { KdePlugin, Em };

struct MixingResult {
    SolverResult solve;
    GridFunction f_target;   // normalized KDE (KdePlugin method only)
    double bandwidth = 0.0;  // KDE bandwidth used (KdePlugin method only)
    std::vector<std::string> warnings;
};

/// Plug-in estimator: KDE of the data, normalized on-grid, solved against the
/// column-normalized kernel from a uniform start.
MixingResult estimate_mixing(const SampleData& data, const KernelSpec& kernel,
                             GridPtr theta_grid, const KDEConfig& kde_config,
                             const StoppingRule& rule,
                             MixingMethod method = MixingMethod::KdePlugin);

/// Simulation scenario: a named truth with its kernel and grids.
struct MixingScenario {
    std::string name;
    KernelSpec kernel;
    GridFunction true_mixing;  // density on theta_grid
    std::size_t n = 0;
    GridPtr theta_grid;
};

/// Draw theta_i by inverse-CDF on the tabulated mixing density, then X_i from
/// kernel(., theta_i).  Deterministic given the seed.
SampleData sample_scenario(const MixingScenario& scenario, std::uint64_t seed);

/// The four simulation-study scenarios: deconv-1, deconv-2 (location mixtures,
/// sigma = 0.05), scale-1, scale-2 (scale mixtures).
MixingScenario builtin_scenario(const std::string& name);

} // namespace fredholm
