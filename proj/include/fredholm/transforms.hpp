#pragma once

#include "fredholm/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace fredholm {

enum class TransformKind { NormalizeKernel, Shift, SplitKernel };

std::string to_string(TransformKind k);

/// A general problem mapped to canonical density form, together with the
/// bookkeeping needed to map solutions back.  Forward composition is
/// split (if any) -> shift (if any) -> column normalization -> mass scale;
/// recover() inverts in the opposite order.
struct TransformedProblem {
    TransformKind kind{};
    KernelMatrixPtr canonical_matrix;  // unit-mass columns
    GridFunction canonical_f;          // unit quadrature mass
    GridFunction canonical_p0;         // strictly positive starting density
    double shift_t = 0.0;
    double mass_scale = 1.0;                // M = mass of the shifted target
    std::vector<double> column_masses;      // pre-normalization column masses
    GridPtr original_theta;                 // theta-grid of the original problem
    bool doubled = false;                   // SplitKernel doubles the theta domain

    ProblemSpec canonical_problem() const {
        return {canonical_matrix, canonical_f, canonical_p0};
    }
};

/// Rewrites f = int k p with a column-normalized kernel; the canonical
/// solution is q = p * column_mass.  Throws "degenerate kernel column" if a
/// column mass is <= 1e-300, unless allow_zero_columns is set (then all-zero
/// columns are carried through and recover as 0).
TransformedProblem normalize_kernel_transform(KernelMatrixPtr matrix, const GridFunction& f,
                                              std::optional<GridFunction> p0 = std::nullopt,
                                              bool allow_zero_columns = false);

/// Signed-solution shift: tilde-p = p + t, tilde-f = f + t * row_mass.
/// Throws "shift too small" if tilde-f < 0 at any node.  t = auto (pass <= 0)
/// selects 50 * max(1, sup|f|).
TransformedProblem shift_transform(KernelMatrixPtr matrix, const GridFunction& f, double t,
                                   std::optional<GridFunction> p0 = std::nullopt);

double auto_shift(const GridFunction& f);

/// Signed-kernel split k = k+ - k- on a doubled theta-domain
/// [alpha, 2 beta - alpha], then shift_transform with t.
TransformedProblem split_kernel_transform(const KernelMatrix& k_plus,
                                          const KernelMatrix& k_minus, const GridFunction& f,
                                          double t);

struct Recovered {
    GridFunction p;                  // on the original theta-grid
    double split_discrepancy_l1 = 0; // l1 norm of the two-half disagreement
    std::vector<std::string> warnings;
};

/// Inverts mass scale, column normalization, shift, and (for SplitKernel)
/// the domain doubling: p = ((s - t) + (t - s(.+L)))/2 with the two-half
/// discrepancy reported.
Recovered recover(const TransformedProblem& transformed, const SolverResult& solved);

} // namespace fredholm
