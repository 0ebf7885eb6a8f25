#pragma once

#include "fredholm/fpt.hpp"
#include "fredholm/mixing.hpp"
#include "fredholm/transforms.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fredholm::demos {

double beta_pdf(double alpha, double beta, double t);
double gamma_pdf(double shape, double t);   // unit rate
double pareto_pdf(double a, double x);      // a (x+1)^{-(a+1)} on x > 0
double half_cauchy_pdf(double t);

/// Gamma mixture of exponentials behind the Pareto target.
struct ParetoDemo {
    GridPtr theta_grid, x_grid;
    KernelMatrixPtr matrix;          // raw exponential-rate kernel
    TransformedProblem transformed;  // column-normalized canonical problem
    GridFunction f_target;           // normalized tabulated Pareto
    GridFunction p_truth;            // normalized tabulated Gamma(a, 1)
    int iterations = 200;
};
ParetoDemo make_pareto(double a = 5.0);

/// Signed-solution / signed-kernel experiments; f generated by quadrature
/// from the tabulated truth.
struct SignedDemo {
    std::string name;
    GridPtr theta_grid, x_grid;
    KernelMatrixPtr k_plus;   // full kernel when !split
    KernelMatrixPtr k_minus;  // only when split
    GridFunction p_truth;     // signed
    GridFunction f;
    bool split = false;
    int iterations = 10;

    TransformedProblem transform(double t) const;
};
SignedDemo make_signed(int which);     // 1: b_{2,5}-b_{4,1}   2: b_{10,1}-b_{1,10}
SignedDemo make_genkernel(int which);  // 1: b_{2,3}-b_{3,2}   2: b_{2,7}+b_{3,4}-1

FPTProblem make_fpt_sqrt(std::uint64_t seed = 0);

/// Everything a demo run produces; the CLI owns laying it out on disk.
struct DemoOutput {
    std::vector<std::pair<std::string, GridFunction>> csv_functions;
    std::vector<std::pair<std::string, std::vector<double>>> csv_columns;
    int iterations = 0;
    std::string termination;
    std::vector<double> divergence_history;
    std::vector<std::string> warnings;
    std::map<std::string, double> mass_diagnostics;
};

struct DemoConfig {
    std::string name;
    std::uint64_t seed = 0;
    double t = 50.0;                     // shift for the signed demos
    std::optional<int> iterations;       // override the preset's count
    std::optional<std::string> data_file;  // galaxy
    std::size_t mc_samples = 5000;       // fpt-sqrt
    std::size_t simulate_paths = 0;      // fpt-sqrt: 0 = skip the oracle
    double simulate_dt = 1e-3;
    double simulate_tmax = 50.0;
};

const std::vector<std::string>& demo_names();
DemoOutput run_demo(const DemoConfig& config);

} // namespace fredholm::demos
