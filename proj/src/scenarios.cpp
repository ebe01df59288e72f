#include "strongcomp/scenarios.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace strongcomp::scenarios {

ModelParams a_params() { return ModelParams::identical(1, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0, 0.0, 0.2); }

Grid a_grid() { return Grid::interval(1.0, 201); }

FieldSet a_initial() {
    const double w[] = {0.1};
    return FieldSet::constant(a_grid(), 1.0, w);
}

ModelParams b_params(double beta) {
    return ModelParams::identical(2, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0, beta, 0.2);
}

Grid b_grid() { return Grid::interval(4.0, 401); }

FieldSet b_initial() {
    const Grid g = b_grid();
    FieldSet s(g, 2);
    const std::size_t m = g.size();
    for (std::size_t q = 0; q < m; ++q) {
        const double x = g.coord(q, 0) - 1.0;
        s.u[q] = 1.0;
        s.w[0][q] = std::exp(-2.5 * x * x);
    }
    for (std::size_t q = 0; q < m; ++q) s.w[1][q] = s.w[0][m - 1 - q];
    return s;
}

SolveSettings b_settings() {
    SolveSettings s;
    s.tau = 0.1;
    s.tol_residual = 1e-8;
    s.tol_update = 1e-10;
    s.max_steps = 200000;
    return s;
}

std::vector<double> b_betas() { return {10.0, 1e2, 1e3, 1e4, 1e5}; }

ModelParams packed_params(std::size_t n, double beta) {
    return ModelParams::identical(n, 1.0, 1.0, 1.0, 1.0, 0.2, 1.0, 1.0, beta, 0.2);
}

Grid packed_grid() { return Grid::interval(4.0, 401); }

FieldSet packed_initial(std::size_t n, std::uint64_t seed) {
    const Grid g = packed_grid();
    FieldSet s(g, n);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double pi = std::numbers::pi;
    for (std::size_t q = 0; q < g.size(); ++q) s.u[q] = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double c[8];
        for (double& v : c) v = unit(rng) - 0.5;
        for (std::size_t q = 0; q < g.size(); ++q) {
            double v = 0.0;
            for (int m = 0; m < 8; ++m) v += c[m] * std::cos((m + 1) * pi * g.coord(q, 0) / g.extent(0));
            s.w[i][q] = 0.1 * std::max(v, 0.0);
        }
    }
    return s;
}

ModelParams random_admissible(std::size_t n, double beta, std::uint64_t seed) {
    constexpr double delta = 0.2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logu(std::log(delta), std::log(1.0 / delta));
    auto draw = [&] { return std::exp(logu(rng)); };
    ModelParams p;
    p.n = n;
    p.delta = delta;
    p.beta = beta;
    p.d.resize(n);
    p.omega.resize(n);
    p.k.resize(n);
    p.a.assign(n * n, 0.0);
    do {
        p.D = draw();
        p.lambda = draw();
        p.mu = draw();
        for (std::size_t i = 0; i < n; ++i) {
            p.d[i] = draw();
            p.k[i] = draw();
            p.omega[i] = draw();
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) p.a[i * n + j] = p.a[j * n + i] = draw();
    } while (!validate_uniform(p).admissible);
    return p;
}

}  // namespace strongcomp::scenarios
