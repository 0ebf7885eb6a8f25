#include "fredholm/compute.hpp"

#include "fredholm/rng.hpp"

#include <doctest.h>

#include <vector>

using namespace fredholm;

// The OpenMP kernels distribute whole output elements and keep the per-element
// accumulation order of the serial reference, so they must agree bit for bit.

TEST_CASE("parallel matvecs match the serial reference exactly") {
    Rng rng(5);
    for (auto [rows, cols] : {std::pair<std::size_t, std::size_t>{37, 53},
                              {211, 89},
                              {401, 401},
                              {1, 64},
                              {64, 1}}) {
        std::vector<double> a(rows * cols), wp(cols), wr(rows);
        for (auto& v : a) v = rng.normal();
        for (auto& v : wp) v = rng.normal();
        for (auto& v : wr) v = rng.normal();

        std::vector<double> r1(rows), r2(rows), c1(cols), c2(cols);
        compute::serial::matvec_rows(a, rows, cols, wp, r1);
        compute::matvec_rows(a, rows, cols, wp, r2);
        CHECK(r1 == r2);

        compute::serial::matvec_cols(a, rows, cols, wr, c1);
        compute::matvec_cols(a, rows, cols, wr, c2);
        CHECK(c1 == c2);
    }
}

TEST_CASE("parallel KDE matches the serial reference exactly") {
    Rng rng(6);
    std::vector<double> xs(300), nodes(513);
    for (auto& v : xs) v = rng.normal();
    for (std::size_t i = 0; i < nodes.size(); ++i)
        nodes[i] = -4.0 + 8.0 * static_cast<double>(i) / 512.0;
    std::vector<double> o1(nodes.size()), o2(nodes.size());
    compute::serial::kde_sum(xs, 1.0 / 0.3, 1.0 / (300 * 0.3), nodes, o1);
    compute::kde_sum(xs, 1.0 / 0.3, 1.0 / (300 * 0.3), nodes, o2);
    CHECK(o1 == o2);
}

TEST_CASE("matvec correctness on a hand-computed case") {
    // 2x3 matrix [1 2 3; 4 5 6]
    std::vector<double> a{1, 2, 3, 4, 5, 6};
    std::vector<double> wp{1, 0.5, 2};
    std::vector<double> out(2);
    compute::serial::matvec_rows(a, 2, 3, wp, out);
    CHECK(out[0] == 8.0);   // 1 + 1 + 6
    CHECK(out[1] == 18.5);  // 4 + 2.5 + 12

    std::vector<double> wr{2, 1};
    std::vector<double> cols(3);
    compute::serial::matvec_cols(a, 2, 3, wr, cols);
    CHECK(cols[0] == 6.0);
    CHECK(cols[1] == 9.0);
    CHECK(cols[2] == 12.0);
}
