#include "fredholm/csv.hpp"
#include "fredholm/grid.hpp"
#include "fredholm/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace fredholm;

namespace {

// independent summation route: accumulate per-interval trapezoid areas
double interval_area_integral(const GridFunction& fn) {
    double acc = 0.0;
    for (std::size_t i = 1; i < fn.size(); ++i)
        acc += 0.5 * (fn.values[i] + fn.values[i - 1]) * (fn.grid->node(i) - fn.grid->node(i - 1));
    return acc;
}

GridPtr random_grid(Rng& rng, std::size_t n, double lo = 0.0, double span = 2.0) {
    std::vector<double> nodes(n);
    double x = lo;
    for (auto& v : nodes) {
        x += span * (0.05 + rng.uniform()) / static_cast<double>(n);
        v = x;
    }
    return make_grid(std::move(nodes));
}

GridFunction random_density(Rng& rng, GridPtr grid) {
    std::vector<double> v(grid->size());
    for (auto& x : v) x = 0.05 + rng.uniform();
    return normalize_to_density({std::move(grid), std::move(v)});
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

} // namespace

TEST_CASE("Grid1D construction and weights") {
    auto g = Grid1D::uniform(0.0, 1.0, 11);
    CHECK(g.size() == 11);
    CHECK(g.node(0) == 0.0);
    CHECK(g.node(10) == 1.0);
    CHECK(g.weight(0) == doctest::Approx(0.05).epsilon(1e-14));
    CHECK(g.weight(5) == doctest::Approx(0.1).epsilon(1e-14));

    SUBCASE("weights sum to the span") {
        Rng rng(3);
        for (int rep = 0; rep < 20; ++rep) {
            auto grid = random_grid(rng, 2 + static_cast<std::size_t>(rng.uniform() * 50));
            double sum = 0.0;
            for (std::size_t i = 0; i < grid->size(); ++i) sum += grid->weight(i);
            CHECK(sum == doctest::Approx(grid->back() - grid->front()).epsilon(1e-12));
        }
    }

    SUBCASE("rejects bad node sets") {
        CHECK_THROWS_AS(Grid1D({1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Grid1D({0.0, 0.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Grid1D({0.0, 2.0, 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(Grid1D({0.0, std::nan("")}), std::invalid_argument);
        CHECK_THROWS_AS(Grid1D::uniform(1.0, 0.0, 5), std::invalid_argument);
    }

    SUBCASE("value length must match") {
        auto grid = make_uniform_grid(0.0, 1.0, 4);
        CHECK_THROWS_AS(GridFunction(grid, {1.0, 2.0}), std::invalid_argument);
    }
}

TEST_CASE("trapezoid_integrate") {
    auto grid = make_uniform_grid(0.0, 1.0, 11);
    CHECK(trapezoid_integrate(constant(grid, 1.0)) == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("exact for linear functions on arbitrary grids") {
        Rng rng(11);
        for (int rep = 0; rep < 20; ++rep) {
            auto g = random_grid(rng, 3 + static_cast<std::size_t>(rng.uniform() * 60), 0.0, 1.0);
            // rescale to [0,1] exactly: integrate identity on whatever grid came out
            auto id = tabulate(g, [](double x) { return x; });
            const double span = g->back() - g->front();
            const double expected = 0.5 * (g->back() * g->back() - g->front() * g->front());
            CHECK(trapezoid_integrate(id) == doctest::Approx(expected).epsilon(1e-12));
            CHECK(span > 0.0);
        }
    }

    SUBCASE("e^{-x} on [0,5] matches the closed form") {
        auto g = make_uniform_grid(0.0, 5.0, 501);
        const double val = trapezoid_integrate(tabulate(g, [](double x) { return std::exp(-x); }));
        CHECK(val == doctest::Approx(1.0 - std::exp(-5.0)).epsilon(1e-4));
    }

    SUBCASE("agrees with the per-interval-area summation on random data") {
        Rng rng(17);
        for (int rep = 0; rep < 20; ++rep) {
            auto g = random_grid(rng, 2 + static_cast<std::size_t>(rng.uniform() * 100));
            std::vector<double> v(g->size());
            for (auto& x : v) x = rng.normal();
            GridFunction fn{g, std::move(v)};
            CHECK(trapezoid_integrate(fn) ==
                  doctest::Approx(interval_area_integral(fn)).epsilon(1e-12));
        }
    }
}

TEST_CASE("kl_divergence") {
    auto grid = make_uniform_grid(-8.0, 8.0, 1601);
    auto f = tabulate(grid, [](double x) { return std_normal_pdf(x); });
    auto g = tabulate(grid, [](double x) { return std_normal_pdf(x - 0.5); });

    CHECK(kl_divergence(f, f) == doctest::Approx(0.0).epsilon(1e-14));
    // unit-variance normals: KL = mu^2/2
    CHECK(kl_divergence(f, g) == doctest::Approx(0.125).epsilon(1e-3));

    SUBCASE("support violation") {
        GridFunction z = g;
        z.values[800] = 0.0;  // f > 0 there
        CHECK_THROWS_WITH_AS(kl_divergence(f, z), doctest::Contains("support violation"),
                             std::runtime_error);
    }

    SUBCASE("0 log 0 convention: zeros in f are fine") {
        GridFunction fz = f;
        fz.values[0] = 0.0;
        GridFunction gz = g;
        gz.values[0] = 0.0;
        CHECK(std::isfinite(kl_divergence(fz, gz)));
    }

    SUBCASE("different grids are rejected") {
        auto other = tabulate(make_uniform_grid(-8.0, 8.0, 1600),
                              [](double x) { return std_normal_pdf(x); });
        CHECK_THROWS_AS(kl_divergence(f, other), std::invalid_argument);
    }

    SUBCASE("Gibbs inequality on random density pairs") {
        Rng rng(23);
        for (int rep = 0; rep < 30; ++rep) {
            auto g2 = random_grid(rng, 2 + static_cast<std::size_t>(rng.uniform() * 40));
            auto a = random_density(rng, g2);
            auto b = random_density(rng, g2);
            CHECK(kl_divergence(a, b) >= -1e-10);
        }
    }
}

TEST_CASE("l1_distance") {
    auto grid = make_uniform_grid(0.0, 1.0, 1001);
    auto ones = constant(grid, 1.0);
    auto zeros = constant(grid, 0.0);
    CHECK(l1_distance(ones, ones) == 0.0);
    CHECK(l1_distance(ones, zeros) == doctest::Approx(1.0).epsilon(1e-14));

    SUBCASE("tabulated beta densities against the summation oracle") {
        auto b25 = tabulate(grid, [](double t) { return 30.0 * t * std::pow(1.0 - t, 4.0); });
        auto b41 = tabulate(grid, [](double t) { return 4.0 * t * t * t; });
        GridFunction diff = b25;
        for (std::size_t i = 0; i < diff.size(); ++i)
            diff.values[i] = std::abs(diff.values[i] - b41.values[i]);
        const double oracle = interval_area_integral(diff);
        CHECK(l1_distance(b25, b41) == doctest::Approx(oracle).epsilon(1e-6));
        // and against a fine midpoint evaluation of the analytic integrand
        double fine = 0.0;
        const std::size_t n = 1 << 21;
        for (std::size_t i = 0; i < n; ++i) {
            const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
            fine += std::abs(30.0 * t * std::pow(1.0 - t, 4.0) - 4.0 * t * t * t);
        }
        fine /= static_cast<double>(n);
        CHECK(l1_distance(b25, b41) == doctest::Approx(fine).epsilon(5e-6));
    }

    SUBCASE("metric properties") {
        Rng rng(29);
        for (int rep = 0; rep < 30; ++rep) {
            auto g = random_grid(rng, 2 + static_cast<std::size_t>(rng.uniform() * 40));
            auto a = random_density(rng, g);
            auto b = random_density(rng, g);
            auto c = random_density(rng, g);
            CHECK(l1_distance(a, b) == l1_distance(b, a));  // exact symmetry
            CHECK(l1_distance(a, c) <= l1_distance(a, b) + l1_distance(b, c) + 1e-12);
        }
    }
}

TEST_CASE("normalize_to_density") {
    auto grid = make_uniform_grid(0.0, 1.0, 1001);
    auto two = constant(grid, 2.0);
    auto n = normalize_to_density(two);
    for (double v : n.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    SUBCASE("density maps to itself") {
        Rng rng(31);
        auto d = random_density(rng, grid);
        auto nd = normalize_to_density(d);
        for (std::size_t i = 0; i < d.size(); ++i)
            CHECK(nd.values[i] == doctest::Approx(d.values[i]).epsilon(1e-13));
    }

    SUBCASE("unnormalized Beta(5,5) shape matches the closed-form density") {
        auto raw = tabulate(grid, [](double t) { return std::pow(t * (1.0 - t), 4.0); });
        auto d = normalize_to_density(raw);
        // 1/B(5,5) = 630
        double sup = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i)
            sup = std::max(sup, std::abs(d.values[i] - 630.0 * raw.values[i]));
        CHECK(sup < 1e-4);
    }

    SUBCASE("unit mass within 1e-14") {
        Rng rng(37);
        for (int rep = 0; rep < 20; ++rep) {
            auto g = random_grid(rng, 2 + static_cast<std::size_t>(rng.uniform() * 40));
            std::vector<double> v(g->size());
            for (auto& x : v) x = rng.uniform() * 10.0;
            auto d = normalize_to_density({g, std::move(v)});
            CHECK(std::abs(trapezoid_integrate(d) - 1.0) <= 1e-14);
        }
    }

    SUBCASE("zero and negative rejected") {
        CHECK_THROWS_WITH_AS(normalize_to_density(constant(grid, 0.0)),
                             doctest::Contains("zero mass"), std::runtime_error);
        CHECK_THROWS_AS(normalize_to_density(constant(grid, -1.0)), std::runtime_error);
    }
}

TEST_CASE("grid function CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "fredholm_test_gf.csv";
    Rng rng(41);
    auto g = random_grid(rng, 57);
    std::vector<double> v(g->size());
    for (auto& x : v) x = rng.normal() * 1e3;
    GridFunction fn{g, v};
    write_grid_function_csv(path, fn);
    auto back = read_grid_function_csv(path);
    REQUIRE(back.size() == fn.size());
    for (std::size_t i = 0; i < fn.size(); ++i) {
        CHECK(back.grid->node(i) == fn.grid->node(i));  // 17 significant digits round-trip
        CHECK(back.values[i] == fn.values[i]);
    }
    std::filesystem::remove(path);
}
