#include "fredholm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fredholm {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kInvSqrt2 = 0.70710678118654752440;
} // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

KernelSpec KernelSpec::exponential_rate() {
    KernelSpec k;
    k.kind_ = Kind::ExponentialRate;
    k.density_in_x_ = true;
    k.non_negative_ = true;
    return k;
}

KernelSpec KernelSpec::normal_location(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("NormalLocation: sigma must be > 0");
    KernelSpec k;
    k.kind_ = Kind::NormalLocation;
    k.density_in_x_ = true;
    k.non_negative_ = true;
    k.sigma_ = sigma;
    return k;
}

KernelSpec KernelSpec::normal_location_reflected(double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("NormalLocationReflected: sigma must be > 0");
    KernelSpec k;
    k.kind_ = Kind::NormalLocationReflected;
    k.density_in_x_ = true;
    k.non_negative_ = true;
    k.sigma_ = sigma;
    return k;
}

KernelSpec KernelSpec::normal_scale() {
    KernelSpec k;
    k.kind_ = Kind::NormalScale;
    k.density_in_x_ = true;
    k.non_negative_ = true;
    return k;
}

KernelSpec KernelSpec::truncated_normal_fpt(double b, std::function<double(double)> h) {
    if (!(b > 0.0)) throw std::invalid_argument("TruncatedNormalFPT: b must be > 0");
    if (!h) throw std::invalid_argument("TruncatedNormalFPT: missing boundary function");
    KernelSpec k;
    k.kind_ = Kind::TruncatedNormalFPT;
    k.density_in_x_ = true;  // density on x > 0 for each theta > 0
    k.non_negative_ = true;
    k.fpt_b_ = b;
    k.fpt_h_ = std::move(h);
    return k;
}

KernelSpec KernelSpec::tabulated(std::shared_ptr<const KernelMatrix> matrix) {
    if (!matrix) throw std::invalid_argument("Tabulated: null matrix");
    KernelSpec k;
    k.kind_ = Kind::Tabulated;
    k.non_negative_ =
        std::all_of(matrix->entries().begin(), matrix->entries().end(),
                    [](double v) { return v >= 0.0; });
    k.density_in_x_ = false;
    k.table_ = std::move(matrix);
    return k;
}

KernelSpec KernelSpec::difference(KernelSpec plus, KernelSpec minus) {
    KernelSpec k;
    k.kind_ = Kind::Difference;
    k.density_in_x_ = false;
    k.non_negative_ = false;
    k.plus_ = std::make_shared<const KernelSpec>(std::move(plus));
    k.minus_ = std::make_shared<const KernelSpec>(std::move(minus));
    return k;
}

double KernelSpec::evaluate(double x, double theta) const {
    switch (kind_) {
        case Kind::ExponentialRate:
            if (theta < 0.0)
                throw std::domain_error("ExponentialRate: theta must be >= 0");
            if (x < 0.0) return 0.0;
            return theta * std::exp(-theta * x);
        case Kind::NormalLocation:
            return normal_pdf((x - theta) / sigma_) / sigma_;
        case Kind::NormalLocationReflected:
            return normal_pdf((x + theta) / sigma_) / sigma_;
        case Kind::NormalScale: {
            if (!(theta > 0.0)) throw std::domain_error("NormalScale: theta must be > 0");
            const double sd = std::sqrt(theta);
            return normal_pdf(x / sd) / sd;
        }
        case Kind::TruncatedNormalFPT: {
            if (!(theta > 0.0)) throw std::domain_error("TruncatedNormalFPT: theta must be > 0");
            if (x <= 0.0) return 0.0;
            const double sq = std::sqrt(theta);
            const double mu = fpt_b_ * fpt_h_(theta) / theta;
            // Psi(-b h/sqrt(theta)) = Phi(b h/sqrt(theta)) = Phi(mu sqrt(theta))
            const double norm = normal_cdf(mu * sq);
            return normal_pdf((x - mu) * sq) * sq / norm;
        }
        case Kind::Tabulated: {
            const auto& xs = table_->x_grid()->nodes();
            const auto& ts = table_->theta_grid()->nodes();
            auto locate = [](std::span<const double> v, double key, const char* what) {
                auto it = std::lower_bound(v.begin(), v.end(), key);
                if (it != v.end() && *it == key)
                    return static_cast<std::size_t>(it - v.begin());
                throw std::domain_error(std::string("Tabulated kernel: ") + what +
                                        " is not a grid node");
            };
            return (*table_)(locate(xs, x, "x"), locate(ts, theta, "theta"));
        }
        case Kind::Difference:
            return plus_->evaluate(x, theta) - minus_->evaluate(x, theta);
    }
    throw std::logic_error("KernelSpec: unknown kind");
}

std::string KernelSpec::name() const {
    switch (kind_) {
        case Kind::ExponentialRate: return "exponential-rate";
        case Kind::NormalLocation: return "normal-location";
        case Kind::NormalLocationReflected: return "normal-location-reflected";
        case Kind::NormalScale: return "normal-scale";
        case Kind::TruncatedNormalFPT: return "truncated-normal-fpt";
        case Kind::Tabulated: return "tabulated";
        case Kind::Difference: return "difference";
    }
    return "?";
}

KernelMatrix::KernelMatrix(GridPtr x_grid, GridPtr theta_grid, std::vector<double> entries)
    : x_grid_(std::move(x_grid)), theta_grid_(std::move(theta_grid)),
      entries_(std::move(entries)) {
    if (!x_grid_ || !theta_grid_) throw std::invalid_argument("KernelMatrix: null grid");
    if (entries_.size() != x_grid_->size() * theta_grid_->size())
        throw std::invalid_argument("KernelMatrix: entries/grid dimension mismatch");
}

KernelMatrix build_matrix(const KernelSpec& kernel, GridPtr x_grid, GridPtr theta_grid) {
    const std::size_t rows = x_grid->size();
    const std::size_t cols = theta_grid->size();
    std::vector<double> entries(rows * cols);
    std::string error;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(rows);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const double x = x_grid->node(static_cast<std::size_t>(i));
        double* row = entries.data() + static_cast<std::size_t>(i) * cols;
        for (std::size_t j = 0; j < cols; ++j) {
            try {
                row[j] = kernel.evaluate(x, theta_grid->node(j));
            } catch (const std::exception& e) {
#pragma omp critical
                if (error.empty())
                    error = std::string(e.what()) + " (at entry i=" + std::to_string(i) +
                            ", j=" + std::to_string(j) + ")";
            }
        }
    }
    if (!error.empty()) throw std::domain_error("build_matrix: " + error);
    return {std::move(x_grid), std::move(theta_grid), std::move(entries)};
}

KernelMatrixPtr build_matrix_ptr(const KernelSpec& kernel, GridPtr x_grid, GridPtr theta_grid) {
    return std::make_shared<const KernelMatrix>(
        build_matrix(kernel, std::move(x_grid), std::move(theta_grid)));
}

double column_mass(const KernelMatrix& m, std::size_t j) {
    if (j >= m.cols()) throw std::out_of_range("column_mass: bad column index");
    const auto& xg = *m.x_grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += xg.weight(i) * m(i, j);
    return acc;
}

std::vector<double> column_masses(const KernelMatrix& m) {
    std::vector<double> masses(m.cols());
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(m.cols());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j)
        masses[j] = column_mass(m, static_cast<std::size_t>(j));
    return masses;
}

std::vector<double> row_masses(const KernelMatrix& m) {
    std::vector<double> masses(m.rows());
    const auto& tg = *m.theta_grid();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) acc += tg.weight(j) * m(i, j);
        masses[i] = acc;
    }
    return masses;
}

KernelMatrix normalize_columns(const KernelMatrix& m, const std::vector<double>& masses) {
    if (masses.size() != m.cols())
        throw std::invalid_argument("normalize_columns: masses size mismatch");
    std::vector<double> entries(m.entries().begin(), m.entries().end());
    const std::size_t cols = m.cols();
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (masses[j] > 0.0) entries[i * cols + j] /= masses[j];
    return {m.x_grid(), m.theta_grid(), std::move(entries)};
}

std::vector<std::string> mass_deficit_warnings(const KernelMatrix& m, double deficit_tol) {
    std::vector<std::string> warnings;
    const auto masses = column_masses(m);
    std::size_t worst = 0;
    double worst_deficit = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < masses.size(); ++j) {
        const double deficit = 1.0 - masses[j];
        if (deficit > deficit_tol) {
            ++count;
            if (deficit > worst_deficit) {
                worst_deficit = deficit;
                worst = j;
            }
        }
    }
    if (count > 0) {
        std::ostringstream ss;
        ss << count << " kernel column(s) lose more than " << deficit_tol
           << " of their mass to x-grid truncation; worst at theta="
           << m.theta_grid()->node(worst) << " (mass " << masses[worst] << ")";
        warnings.push_back(ss.str());
    }
    return warnings;
}

void write_kernel_matrix_csv(const std::filesystem::path& path, const KernelMatrix& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << "theta\\x";
    for (std::size_t i = 0; i < m.rows(); ++i) out << ',' << m.x_grid()->node(i);
    out << "\n";
    for (std::size_t j = 0; j < m.cols(); ++j) {
        out << m.theta_grid()->node(j);
        for (std::size_t i = 0; i < m.rows(); ++i) out << ',' << m(i, j);
        out << "\n";
    }
}

KernelMatrix read_kernel_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    std::vector<double> x_nodes;
    {
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // corner cell, ignored
        while (std::getline(ss, cell, ',')) x_nodes.push_back(std::stod(cell));
    }
    std::vector<double> theta_nodes;
    std::vector<std::vector<double>> body;  // one row per theta
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');
        theta_nodes.push_back(std::stod(cell));
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() != x_nodes.size())
            throw std::runtime_error(path.string() + ": ragged row in kernel CSV");
        body.push_back(std::move(row));
    }
    const std::size_t rows = x_nodes.size(), cols = theta_nodes.size();
    std::vector<double> entries(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) entries[i * cols + j] = body[j][i];
    return {make_grid(std::move(x_nodes)), make_grid(std::move(theta_nodes)),
            std::move(entries)};
}

} // namespace fredholm
