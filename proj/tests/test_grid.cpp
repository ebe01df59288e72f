#include <doctest.h>

#include "strongcomp/grid.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace strongcomp;

namespace {

const double pi = std::numbers::pi;

ScalarField sample(const Grid& g, double (*f)(double, double)) {
    ScalarField s(g);
    for (std::size_t q = 0; q < g.size(); ++q) s[q] = f(g.coord(q, 0), g.dim() == 2 ? g.coord(q, 1) : 0.0);
    return s;
}

ScalarField random_field(const Grid& g, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    ScalarField s(g);
    for (auto& v : s.values) v = U(rng);
    return s;
}

}  // namespace

TEST_CASE("grid construction") {
    const Grid g = Grid::rectangle(2.0, 1.0, 5, 3);
    CHECK(g.size() == 15);
    CHECK(g.spacing(0) == 0.5);
    CHECK(g.spacing(1) == 0.5);
    CHECK(g.measure() == 2.0);
    CHECK(g.coord(7, 0) == doctest::Approx(1.0));
    CHECK(g.coord(7, 1) == doctest::Approx(0.5));
    double total = 0.0;
    for (double w : g.quadrature_weights()) total += w;
    CHECK(total == doctest::Approx(2.0));
    CHECK_THROWS(Grid::interval(1.0, 2));
    CHECK_THROWS(Grid::interval(-1.0, 11));
}

TEST_CASE("laplacian maps constants to zero exactly") {
    for (const Grid& g : {Grid::interval(3.0, 17), Grid::rectangle(1.0, 2.0, 9, 13)}) {
        const auto out = laplacian_neumann(ScalarField(g, 2.75), 1.7);
        for (double v : out.values) CHECK(v == 0.0);
    }
}

TEST_CASE("laplacian on the Neumann eigenfunction cos(pi x)") {
    const Grid g = Grid::interval(1.0, 101);
    const auto f = sample(g, [](double x, double) { return std::cos(pi * x); });
    const auto out = laplacian_neumann(f, 1.0);
    const double h = g.spacing(0);
    // Discrete symbol of the 3-point stencil on cos(πx): (2cos(πh) − 2)/h².
    const double symbol = (2.0 * std::cos(pi * h) - 2.0) / (h * h);
    double err = 0.0, err_symbol = 0.0;
    for (std::size_t q = 0; q < g.size(); ++q) {
        err = std::max(err, std::abs(out[q] + pi * pi * f[q]));
        err_symbol = std::max(err_symbol, std::abs(out[q] - symbol * f[q]));
    }
    CHECK(err_symbol < 1e-9);
    CHECK(err == doctest::Approx(std::pow(pi, 4) * h * h / 12.0).epsilon(0.01));
    CHECK(err < 1e-3);
}

TEST_CASE("5-point stencil is exact on x^2 + y^2 at interior nodes") {
    const Grid g = Grid::rectangle(1.0, 1.0, 21, 21);
    const auto f = sample(g, [](double x, double y) { return x * x + y * y; });
    const auto out = laplacian_neumann(f, 0.5);
    for (std::size_t q = 0; q < g.size(); ++q) {
        const auto ix = g.axis_index(q, 0), iy = g.axis_index(q, 1);
        if (ix == 0 || iy == 0 || ix == 20 || iy == 20) continue;
        CHECK(out[q] == doctest::Approx(4.0 * 0.5).epsilon(1e-9));
    }
}

TEST_CASE("integrate examples") {
    CHECK(integrate(ScalarField(Grid::interval(1.0, 37), 1.0)) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t n : {3u, 4u, 10u, 101u, 1000u}) {
        const Grid g = Grid::interval(1.0, n);
        CHECK(std::abs(integrate(sample(g, [](double x, double) { return x; })) - 0.5) < 1e-15);
    }
    const Grid g = Grid::interval(1.0, 201);
    CHECK(std::abs(integrate(sample(g, [](double x, double) { return std::cos(pi * x); }))) < 1e-12);
    const Grid r = Grid::rectangle(2.0, 3.0, 11, 7);
    CHECK(integrate(sample(r, [](double x, double y) { return x + 2.0 * y; })) ==
          doctest::Approx(2.0 * 3.0 * (1.0 + 3.0)));
}

TEST_CASE("lambda1_restricted examples") {
    const Grid g = Grid::interval(1.0, 201);
    const double h = g.spacing(0);

    CHECK(lambda1_restricted(SupportMask(g, true), g) <= 1e-10);

    SupportMask interior(g);
    for (std::size_t q = 1; q + 1 < g.size(); ++q) interior.set(q, true);
    const double l_dir = lambda1_restricted(interior, g);
    CHECK(std::abs(l_dir - pi * pi) / (pi * pi) < 0.01);
    // Exact eigenvalue of the discrete Dirichlet problem on 199 interior nodes.
    const double discrete = 4.0 / (h * h) * std::pow(std::sin(pi * h / 2.0), 2);
    CHECK(l_dir == doctest::Approx(discrete).epsilon(1e-8));

    SupportMask left(g);
    for (std::size_t q = 0; q < 100; ++q) left.set(q, true);
    const double l_half = lambda1_restricted(left, g);
    const double quarter_wave = std::pow(pi / (2.0 * 0.5), 2);
    CHECK(std::abs(l_half - quarter_wave) / quarter_wave < 0.01);

    SupportMask right(g);
    for (std::size_t q = 101; q < 201; ++q) right.set(q, true);
    CHECK(lambda1_restricted(right, g) == doctest::Approx(l_half).epsilon(1e-10));

    CHECK_THROWS_WITH(lambda1_restricted(SupportMask(g), g), "empty support");
}

TEST_CASE("lambda1_restricted takes the minimum over components") {
    const Grid g = Grid::interval(1.0, 201);
    SupportMask wide(g), narrow(g), both(g);
    for (std::size_t q = 0; q < 80; ++q) wide.set(q, true);
    for (std::size_t q = 150; q < 170; ++q) narrow.set(q, true);
    for (std::size_t q = 0; q < g.size(); ++q) both.set(q, wide[q] || narrow[q]);
    CHECK(connected_components(both).size() == 2);
    CHECK(lambda1_restricted(both, g) == doctest::Approx(lambda1_restricted(wide, g)));
    CHECK(lambda1_restricted(narrow, g) > lambda1_restricted(wide, g));
}

TEST_CASE("lambda1 in 2D: full Neumann strip factor") {
    // Dirichlet at x = 1 edge only: first mode cos(πx/2) in x, constant in y.
    const Grid g = Grid::rectangle(1.0, 0.5, 41, 21);
    SupportMask m(g);
    for (std::size_t q = 0; q < g.size(); ++q) m.set(q, g.axis_index(q, 0) < 40);
    const double l = lambda1_restricted(m, g);
    CHECK(std::abs(l - pi * pi / 4.0) / (pi * pi / 4.0) < 0.01);
}

TEST_CASE("ball_nodes examples") {
    const Grid g = Grid::interval(1.0, 101);
    const double mid[] = {0.5};
    CHECK(ball_nodes(g, mid, 0.1).count() == 21);
    CHECK(ball_nodes(g, mid, 0.2 * g.spacing(0)).count() == 1);
    CHECK(ball_nodes(g, mid, 0.2 * g.spacing(0))[50]);
    CHECK(ball_nodes(g, mid, 5.0).count() == g.size());
    const Grid r = Grid::rectangle(1.0, 1.0, 11, 11);
    const double corner[] = {0.0, 0.0};
    CHECK(ball_nodes(r, corner, 2.0).count() == r.size());
}

TEST_CASE("property: discrete conservation of the Neumann laplacian") {
    std::mt19937_64 rng(5);
    for (const Grid& g : {Grid::interval(2.0, 51), Grid::rectangle(1.0, 3.0, 17, 23)}) {
        for (int t = 0; t < 50; ++t) {
            const auto f = random_field(g, rng);
            const double total = integrate(laplacian_neumann(f, 1.0));
            const double scale = f.sup() / (g.spacing(0) * g.spacing(0));
            CHECK(std::abs(total) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("property: laplacian is linear") {
    std::mt19937_64 rng(6);
    const Grid g = Grid::rectangle(1.0, 1.0, 15, 9);
    for (int t = 0; t < 30; ++t) {
        const auto f = random_field(g, rng), h = random_field(g, rng);
        const double a = 1.7, b = -0.4;
        ScalarField c(g);
        for (std::size_t q = 0; q < g.size(); ++q) c[q] = a * f[q] + b * h[q];
        const auto lc = laplacian_neumann(c, 2.0), lf = laplacian_neumann(f, 2.0), lh = laplacian_neumann(h, 2.0);
        for (std::size_t q = 0; q < g.size(); ++q)
            CHECK(lc[q] == doctest::Approx(a * lf[q] + b * lh[q]).epsilon(1e-12).scale(1e3));
    }
}

TEST_CASE("property: dirichlet form equals minus the weighted laplacian pairing") {
    std::mt19937_64 rng(8);
    for (const Grid& g : {Grid::interval(1.5, 31), Grid::rectangle(2.0, 1.0, 13, 9)}) {
        const auto w = g.quadrature_weights();
        for (int t = 0; t < 20; ++t) {
            const auto f = random_field(g, rng), h = random_field(g, rng);
            const auto lf = laplacian_neumann(f, 1.0);
            double pairing = 0.0;
            for (std::size_t q = 0; q < g.size(); ++q) pairing -= w[q] * lf[q] * h[q];
            CHECK(dirichlet_form(g, f.values, h.values) == doctest::Approx(pairing).epsilon(1e-11));
        }
    }
}

TEST_CASE("property: lambda1 is monotone under mask inclusion") {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<int> coin(0, 3);
    for (const Grid& g : {Grid::interval(1.0, 81), Grid::rectangle(1.0, 1.0, 15, 15)}) {
        for (int t = 0; t < 10; ++t) {
            SupportMask outer(g), inner(g);
            for (std::size_t q = 0; q < g.size(); ++q) {
                const bool in_outer = coin(rng) != 0;
                outer.set(q, in_outer);
                inner.set(q, in_outer && coin(rng) != 0);
            }
            if (inner.count() == 0) continue;
            CHECK(lambda1_restricted(inner, g) >= lambda1_restricted(outer, g) * (1.0 - 1e-9));
        }
    }
}
