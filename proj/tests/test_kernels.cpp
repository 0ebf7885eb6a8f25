#include "fredholm/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace fredholm;

TEST_CASE("kernel evaluation") {
    SUBCASE("exponential rate") {
        auto k = KernelSpec::exponential_rate();
        CHECK(k.density_in_x());
        CHECK(k.non_negative());
        CHECK(k.evaluate(0.0, 2.0) == 2.0);
        CHECK(k.evaluate(1.0, 1.0) == doctest::Approx(std::exp(-1.0)));
        CHECK(k.evaluate(3.0, 0.0) == 0.0);  // degenerate rate: zero column
        CHECK(k.evaluate(-1.0, 2.0) == 0.0);
        CHECK_THROWS_AS(k.evaluate(1.0, -0.5), std::domain_error);
    }

    SUBCASE("normal location peaks at 1/(sigma sqrt(2 pi))") {
        auto k = KernelSpec::normal_location(0.05);
        CHECK(k.evaluate(0.3, 0.3) == doctest::Approx(7.978845608028654).epsilon(1e-12));
        CHECK_THROWS_AS(KernelSpec::normal_location(0.0), std::invalid_argument);
    }

    SUBCASE("normal scale") {
        auto k = KernelSpec::normal_scale();
        CHECK(k.evaluate(0.0, 4.0) == doctest::Approx(normal_pdf(0.0) / 2.0).epsilon(1e-14));
        CHECK_THROWS_AS(k.evaluate(0.0, 0.0), std::domain_error);
    }

    SUBCASE("difference kernel is antisymmetric at the origin") {
        auto k = KernelSpec::difference(KernelSpec::normal_location(0.05),
                                        KernelSpec::normal_location_reflected(0.05));
        CHECK(!k.non_negative());
        CHECK(!k.density_in_x());
        CHECK(k.evaluate(0.0, 0.0) == 0.0);
        // equals plus - minus exactly
        auto plus = KernelSpec::normal_location(0.05);
        auto minus = KernelSpec::normal_location_reflected(0.05);
        for (double x : {0.1, 0.4, 0.9})
            for (double t : {0.2, 0.5, 0.8})
                CHECK(k.evaluate(x, t) == plus.evaluate(x, t) - minus.evaluate(x, t));
    }
}

TEST_CASE("build_matrix") {
    SUBCASE("entries match pointwise evaluation") {
        auto k = KernelSpec::normal_location(0.1);
        auto xg = make_uniform_grid(0.0, 1.0, 2);
        auto tg = make_uniform_grid(0.0, 1.0, 2);
        auto m = build_matrix(k, xg, tg);
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                CHECK(m(i, j) == k.evaluate(xg->node(i), tg->node(j)));
    }

    SUBCASE("domain violations carry the offending entry") {
        auto k = KernelSpec::normal_scale();
        auto xg = make_uniform_grid(0.0, 1.0, 3);
        auto tg = make_uniform_grid(0.0, 1.0, 3);  // theta = 0 invalid
        CHECK_THROWS_WITH_AS(build_matrix(k, xg, tg), doctest::Contains("theta must be > 0"),
                             std::domain_error);
    }

    SUBCASE("normal location matrix is symmetric on a shared grid") {
        auto k = KernelSpec::normal_location(0.05);
        auto g = make_uniform_grid(0.0, 1.0, 201);
        auto m = build_matrix(k, g, g);
        for (std::size_t i = 0; i < 201; i += 17)
            for (std::size_t j = 0; j < 201; j += 13) CHECK(m(i, j) == m(j, i));
    }
}

TEST_CASE("column masses") {
    SUBCASE("exponential column integrates to ~1 on a truncated grid") {
        auto m = build_matrix(KernelSpec::exponential_rate(), make_uniform_grid(0.0, 20.0, 2001),
                              make_uniform_grid(1.0, 2.0, 2));
        // trapezoid carries an O(h^2) surplus of ~8.3e-6 here
        CHECK(column_mass(m, 0) == doctest::Approx(1.0).epsilon(1e-5));
    }

    SUBCASE("normal location: interior vs boundary columns") {
        auto m = build_matrix(KernelSpec::normal_location(0.05), make_uniform_grid(0.0, 1.0, 2001),
                              make_grid({0.0, 0.5}));
        CHECK(column_mass(m, 1) == doctest::Approx(1.0).epsilon(1e-12));  // 10 sigma interior
        CHECK(column_mass(m, 0) == doctest::Approx(0.5).epsilon(1e-6));   // half mass below 0
    }

    SUBCASE("density kernels never exceed unit mass materially") {
        auto m = build_matrix(KernelSpec::normal_location(0.05), make_uniform_grid(-0.5, 1.5, 2001),
                              make_uniform_grid(0.0, 1.0, 101));
        for (double c : column_masses(m)) {
            CHECK(c >= 0.0);
            CHECK(c <= 1.0 + 1e-9);
        }
    }

    SUBCASE("mass deficit warnings fire on truncated columns") {
        auto narrow = build_matrix(KernelSpec::normal_location(0.05),
                                   make_uniform_grid(0.0, 1.0, 501),
                                   make_uniform_grid(0.0, 1.0, 51));
        auto warnings = mass_deficit_warnings(narrow);
        REQUIRE(warnings.size() == 1);  // the sigma-reach of edge columns is cut
        CHECK(warnings[0].find("truncation") != std::string::npos);

        auto wide = build_matrix(KernelSpec::normal_location(0.05),
                                 make_uniform_grid(-0.5, 1.5, 501),
                                 make_uniform_grid(0.0, 1.0, 51));
        CHECK(mass_deficit_warnings(wide).empty());
    }

    SUBCASE("normalize_columns yields unit masses") {
        auto m = build_matrix(KernelSpec::normal_location(0.05), make_uniform_grid(0.0, 1.0, 501),
                              make_uniform_grid(0.0, 1.0, 51));
        auto masses = column_masses(m);
        auto n = normalize_columns(m, masses);
        for (std::size_t j = 0; j < n.cols(); ++j)
            CHECK(column_mass(n, j) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("tabulated kernel CSV round trip") {
    auto k = KernelSpec::normal_location(0.2);
    auto xg = make_uniform_grid(-0.3, 1.1, 17);
    auto tg = make_uniform_grid(0.0, 1.0, 9);
    auto m = build_matrix(k, xg, tg);
    const auto path = std::filesystem::temp_directory_path() / "fredholm_test_kernel.csv";
    write_kernel_matrix_csv(path, m);
    auto back = read_kernel_matrix_csv(path);
    REQUIRE(back.rows() == m.rows());
    REQUIRE(back.cols() == m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            CHECK(back(i, j) == doctest::Approx(m(i, j)).epsilon(1e-12));

    SUBCASE("tabulated kernels evaluate at grid nodes only") {
        auto spec = KernelSpec::tabulated(std::make_shared<const KernelMatrix>(back));
        CHECK(spec.evaluate(back.x_grid()->node(3), back.theta_grid()->node(2)) == back(3, 2));
        CHECK_THROWS_AS(spec.evaluate(0.123456, back.theta_grid()->node(2)), std::domain_error);
    }
    std::filesystem::remove(path);
}
